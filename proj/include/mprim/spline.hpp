#ifndef MPRIM_SPLINE_HPP
#define MPRIM_SPLINE_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace mprim {

// Velocity floor and curvature floor for Frenet quantities.
inline constexpr double kSpeedEps = 1e-6;      // m/s
inline constexpr double kCurvatureEps = 1e-9;

/// Orthonormal (tangent, normal, binormal) triad at a curve point.
struct FrenetFrame {
    Eigen::Vector3d t, n, b;
    Eigen::Vector3d point;
    double s = 0.0;  // arc length from the trajectory start

    Eigen::Matrix3d basis() const {
        Eigen::Matrix3d m;
        m.col(0) = t; m.col(1) = n; m.col(2) = b;
        return m;
    }
};

/// Natural cubic spline through timestamped 3D samples. C² on the interior,
/// zero second derivative at the endpoints.
class SplineTrajectory {
public:
    /// Fit through the samples. Throws DegenerateInput on fewer than 2
    /// samples, non-increasing times, or non-finite values.
    SplineTrajectory(const std::vector<double>& times,
                     const std::vector<Eigen::Vector3d>& points);

    double t_first() const { return knots_.front(); }
    double t_last() const { return knots_.back(); }
    const std::vector<double>& knots() const { return knots_; }

    /// Value or exact analytic derivative of the piecewise cubic.
    /// order ∈ {0,1,2,3}; order 3 is the piecewise-constant jerk.
    Eigen::Vector3d derivative(double t, int order) const;
    Eigen::Vector3d position(double t) const { return derivative(t, 0); }

    /// ∫‖ξ̇‖ over [t0,t1] by adaptive Simpson quadrature, abs tol 1e-8.
    double arc_length(double t0, double t1) const;

    /// κ = ‖ξ̇×ξ̈‖/‖ξ̇‖³, τ = ((ξ̇×ξ̈)·ξ⃛)/‖ξ̇×ξ̈‖².
    /// τ = 0 when ‖ξ̇×ξ̈‖ < kCurvatureEps. Throws SingularVelocity below the
    /// speed floor.
    std::pair<double, double> curvature_torsion(double t) const;

    /// Frenet frame at t. Throws SingularVelocity / VanishingCurvature.
    FrenetFrame frenet_frame(double t) const;

    /// Uniform scaling of the curve by a constant factor.
    SplineTrajectory scaled(double factor) const;

private:
    void check_domain(double t) const;
    int interval_of(double t) const;

    std::vector<double> knots_;
    // Per interval i: p(t) = a + b*dt + c*dt^2 + d*dt^3, dt = t - knots_[i].
    std::vector<Eigen::Vector3d> a_, b_, c_, d_;
};

/// A sampled curve point with attached curvature/torsion.
struct CurvePoint {
    Eigen::Vector3d p;
    double kappa = 0.0;
    double tau = 0.0;
};

/// Keep indices 0, factor, 2*factor, ... and always the last sample.
std::vector<CurvePoint> decimate(const std::vector<CurvePoint>& samples, int factor);

/// Adaptive Simpson quadrature with absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f,
                        double a, double b, double tol);

}  // namespace mprim

#endif
