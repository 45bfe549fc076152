#include "mprim/spline.hpp"

#include <cmath>

#include "mprim/errors.hpp"

namespace mprim {

namespace {

double simpson(const std::function<double(double)>& f, double a, double fa,
               double b, double fb, double m, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double simpson_rec(const std::function<double(double)>& f, double a, double fa,
                   double b, double fb, double m, double fm, double whole,
                   double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(f, a, fa, m, fm, lm, flm);
    const double right = simpson(f, m, fm, b, fb, rm, frm);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_rec(f, a, fa, m, fm, lm, flm, left, tol * 0.5, depth - 1) +
           simpson_rec(f, m, fm, b, fb, rm, frm, right, tol * 0.5, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = simpson(f, a, fa, b, fb, m, fm);
    return simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, 40);
}

SplineTrajectory::SplineTrajectory(const std::vector<double>& times,
                                   const std::vector<Eigen::Vector3d>& points) {
    const std::size_t n = times.size();
    if (n < 2 || points.size() != n)
        throw DegenerateInput("spline needs at least 2 samples");
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(times[i]) || !points[i].allFinite())
            throw DegenerateInput("non-finite spline sample");
        if (i > 0 && times[i] <= times[i - 1])
            throw DegenerateInput("spline times must be strictly increasing");
    }
    knots_ = times;
    const std::size_t m = n - 1;  // intervals
    a_.resize(m); b_.resize(m); c_.resize(m); d_.resize(m);

    // Natural cubic spline per coordinate: tridiagonal solve for the second
    // derivatives M_i, zero at both ends.
    std::vector<double> h(m);
    for (std::size_t i = 0; i < m; ++i) h[i] = times[i + 1] - times[i];

    for (int dim = 0; dim < 3; ++dim) {
        std::vector<double> M(n, 0.0);
        if (n > 2) {
            const std::size_t sz = n - 2;
            std::vector<double> diag(sz), rhs(sz), upper(sz, 0.0);
            for (std::size_t i = 0; i < sz; ++i) {
                diag[i] = 2.0 * (h[i] + h[i + 1]);
                const double d1 = (points[i + 2][dim] - points[i + 1][dim]) / h[i + 1];
                const double d0 = (points[i + 1][dim] - points[i][dim]) / h[i];
                rhs[i] = 6.0 * (d1 - d0);
                if (i + 1 < sz) upper[i] = h[i + 1];
            }
            // Thomas algorithm; sub-diagonal equals the upper one.
            for (std::size_t i = 1; i < sz; ++i) {
                const double w = h[i] / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            M[sz] = rhs[sz - 1] / diag[sz - 1];
            for (std::size_t i = sz - 1; i-- > 0;)
                M[i + 1] = (rhs[i] - upper[i] * M[i + 2]) / diag[i];
        }
        for (std::size_t i = 0; i < m; ++i) {
            a_[i][dim] = points[i][dim];
            c_[i][dim] = 0.5 * M[i];
            d_[i][dim] = (M[i + 1] - M[i]) / (6.0 * h[i]);
            b_[i][dim] = (points[i + 1][dim] - points[i][dim]) / h[i] -
                         h[i] * (2.0 * M[i] + M[i + 1]) / 6.0;
        }
    }
}

void SplineTrajectory::check_domain(double t) const {
    const double eps = 1e-9 * std::max(1.0, std::abs(knots_.back()));
    if (t < knots_.front() - eps || t > knots_.back() + eps)
        throw OutOfDomain("time outside trajectory domain");
}

int SplineTrajectory::interval_of(double t) const {
    if (t <= knots_.front()) return 0;
    if (t >= knots_.back()) return static_cast<int>(knots_.size()) - 2;
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    return static_cast<int>(it - knots_.begin()) - 1;
}

Eigen::Vector3d SplineTrajectory::derivative(double t, int order) const {
    check_domain(t);
    const int i = interval_of(t);
    const double dt = t - knots_[i];
    switch (order) {
        case 0: return a_[i] + dt * (b_[i] + dt * (c_[i] + dt * d_[i]));
        case 1: return b_[i] + dt * (2.0 * c_[i] + 3.0 * dt * d_[i]);
        case 2: return 2.0 * c_[i] + 6.0 * dt * d_[i];
        case 3: return 6.0 * d_[i];
        default: throw OutOfDomain("derivative order must be in {0,1,2,3}");
    }
}

double SplineTrajectory::arc_length(double t0, double t1) const {
    check_domain(t0);
    check_domain(t1);
    if (t0 > t1) throw OutOfDomain("arc_length needs t0 <= t1");
    if (t0 == t1) return 0.0;
    const auto speed = [this](double t) { return derivative(t, 1).norm(); };
    // Integrate piecewise so the integrand is smooth on every panel.
    double total = 0.0;
    double a = t0;
    for (std::size_t i = interval_of(t0); a < t1; ++i) {
        const double b = (i + 1 < knots_.size()) ? std::min(knots_[i + 1], t1) : t1;
        if (b > a) total += adaptive_simpson(speed, a, b, 1e-8);
        a = b;
        if (i + 2 >= knots_.size()) break;
    }
    return total;
}

std::pair<double, double> SplineTrajectory::curvature_torsion(double t) const {
    const Eigen::Vector3d v = derivative(t, 1);
    const double speed = v.norm();
    if (speed < kSpeedEps) throw SingularVelocity("speed below floor");
    const Eigen::Vector3d acc = derivative(t, 2);
    const Eigen::Vector3d cross = v.cross(acc);
    const double cn = cross.norm();
    const double kappa = cn / (speed * speed * speed);
    double tau = 0.0;
    if (cn >= kCurvatureEps) {
        const Eigen::Vector3d jerk = derivative(t, 3);
        tau = cross.dot(jerk) / (cn * cn);
    }
    return {kappa, tau};
}

FrenetFrame SplineTrajectory::frenet_frame(double t) const {
    const Eigen::Vector3d v = derivative(t, 1);
    const double speed = v.norm();
    if (speed < kSpeedEps) throw SingularVelocity("speed below floor");
    const Eigen::Vector3d acc = derivative(t, 2);
    FrenetFrame f;
    f.t = v / speed;
    const Eigen::Vector3d an = acc - acc.dot(f.t) * f.t;
    if (v.cross(acc).norm() < kCurvatureEps || an.norm() < kCurvatureEps)
        throw VanishingCurvature("curvature below floor");
    f.n = an.normalized();
    f.b = f.t.cross(f.n);
    f.point = position(t);
    f.s = arc_length(t_first(), t);
    return f;
}

SplineTrajectory SplineTrajectory::scaled(double factor) const {
    SplineTrajectory out = *this;
    for (auto* coef : {&out.a_, &out.b_, &out.c_, &out.d_})
        for (auto& v : *coef) v *= factor;
    return out;
}

std::vector<CurvePoint> decimate(const std::vector<CurvePoint>& samples, int factor) {
    if (factor < 1) throw DegenerateInput("decimation factor must be >= 1");
    std::vector<CurvePoint> out;
    for (std::size_t i = 0; i < samples.size(); i += factor) out.push_back(samples[i]);
    if (!samples.empty() && (samples.size() - 1) % factor != 0)
        out.push_back(samples.back());
    return out;
}

}  // namespace mprim
