#include "mprim/flux.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include "mprim/errors.hpp"

namespace mprim {

void FluxParams::validate() const {
    if (beta_v < 0 || beta_s < 0) throw OutOfDomain("beta weights must be >= 0");
    if (grid_step <= 0) throw OutOfDomain("grid_step must be positive");
    if (std::abs(g.norm() - 1.0) > 1e-9) throw OutOfDomain("g must be a unit vector");
}

GroupKinematics make_group_kinematics(const SkeletonSequence& seq, int group,
                                      const SkeletonSpec& spec) {
    const auto series = group_positions(seq, group, spec);
    GroupKinematics kin;
    kin.group = group;
    double chain = 0.0;
    for (int i = 0; i < kJointsPerGroup; ++i)
        kin.trajectories.emplace_back(series[i].times, series[i].points);
    const std::size_t n = series[0].points.size();
    for (std::size_t k = 0; k < n; ++k)
        chain += (series[1].points[k] - series[0].points[k]).norm() +
                 (series[2].points[k] - series[1].points[k]).norm();
    kin.limb_length = chain / static_cast<double>(n);
    return kin;
}

namespace {

// ∫|f| over [a,b] for f linear with endpoint values fa, fb: split at the sign
// change, each side integrates to a triangle area.
double abs_linear_integral(double a, double fa, double b, double fb) {
    const double len = b - a;
    if (fa * fb >= 0.0) return 0.5 * (std::abs(fa) + std::abs(fb)) * len;
    const double r = fa / (fa - fb);  // root position in [0,1]
    return 0.5 * (std::abs(fa) * r + std::abs(fb) * (1.0 - r)) * len;
}

// Σ_j ∫ |v̇_j·g| over one span that contains no interior knots. The projected
// acceleration of a cubic is linear there, so the integral is exact.
double flux_span(const GroupKinematics& kin, double a, double b,
                 const Eigen::Vector3d& g) {
    double total = 0.0;
    for (const auto& traj : kin.trajectories) {
        const double fa = traj.derivative(a, 2).dot(g);
        const double fb = traj.derivative(b, 2).dot(g);
        total += abs_linear_integral(a, fa, b, fb);
    }
    return total;
}

}  // namespace

double motion_flux(const GroupKinematics& kin, double t1, double t2,
                   const Eigen::Vector3d& g) {
    if (t1 > t2) throw OutOfDomain("motion_flux needs t1 <= t2");
    const auto& knots = kin.trajectories.front().knots();
    if (t1 < knots.front() - 1e-9 || t2 > knots.back() + 1e-9)
        throw OutOfDomain("flux interval outside trajectory domain");
    double total = 0.0;
    double a = std::max(t1, knots.front());
    const double end = std::min(t2, knots.back());
    auto it = std::upper_bound(knots.begin(), knots.end(), a);
    while (a < end) {
        const double b = (it != knots.end()) ? std::min(*it, end) : end;
        if (b > a) total += flux_span(kin, a, b, g);
        a = b;
        if (it != knots.end()) ++it;
    }
    return total;
}

double energy(const GroupKinematics& kin, double rho, double t0,
              const FluxParams& params) {
    if (t0 > rho) throw OutOfDomain("energy needs t0 <= rho");
    double vel = 0.0, len = 0.0;
    for (const auto& traj : kin.trajectories) {
        vel += traj.derivative(rho, 1).squaredNorm() + traj.derivative(t0, 1).squaredNorm();
        len += traj.arc_length(t0, rho);
    }
    return motion_flux(kin, t0, rho, params.g) - 0.5 * params.beta_v * vel +
           params.beta_s_sign * params.beta_s * len;
}

namespace {

struct EnergyGrid {
    std::vector<double> times;
    std::vector<double> value;   // P(times[i]; t0)
    std::vector<double> speed;   // Σ_j ‖v_j‖
};

// One incremental pass: flux and arc length accumulate over grid steps.
EnergyGrid evaluate_grid(const GroupKinematics& kin, double t0, double t_seq,
                         const FluxParams& params) {
    EnergyGrid grid;
    for (double t = t0; t < t_seq; t += params.grid_step) grid.times.push_back(t);
    grid.times.push_back(t_seq);

    const std::size_t n = grid.times.size();
    grid.value.resize(n);
    grid.speed.resize(n);
    double v0_sq = 0.0;
    for (const auto& traj : kin.trajectories) {
        v0_sq += traj.derivative(t0, 1).squaredNorm();
        grid.speed[0] += traj.derivative(t0, 1).norm();
    }
    double flux_cum = 0.0, len_cum = 0.0;
    grid.value[0] = -params.beta_v * v0_sq;
    for (std::size_t i = 1; i < n; ++i) {
        flux_cum += motion_flux(kin, grid.times[i - 1], grid.times[i], params.g);
        double v_sq = 0.0;
        for (const auto& traj : kin.trajectories) {
            len_cum += traj.arc_length(grid.times[i - 1], grid.times[i]);
            v_sq += traj.derivative(grid.times[i], 1).squaredNorm();
            grid.speed[i] += traj.derivative(grid.times[i], 1).norm();
        }
        grid.value[i] = flux_cum - 0.5 * params.beta_v * (v_sq + v0_sq) +
                        params.beta_s_sign * params.beta_s * len_cum;
    }
    return grid;
}

// Golden-section maximization of P(·;t0) on [lo, hi].
double golden_refine(const GroupKinematics& kin, double t0, double lo, double hi,
                     const FluxParams& params) {
    constexpr double inv_phi = 0.6180339887498949;
    const double tol = params.grid_step / 100.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = energy(kin, c, t0, params);
    double fd = energy(kin, d, t0, params);
    while (b - a > tol) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - inv_phi * (b - a);
            fc = energy(kin, c, t0, params);
        } else {
            a = c; c = d; fc = fd;
            d = a + inv_phi * (b - a);
            fd = energy(kin, d, t0, params);
        }
    }
    return 0.5 * (a + b);
}

// Golden-section minimization of the group speed on [lo, hi].
double rest_refine(const GroupKinematics& kin, double lo, double hi, double tol) {
    const auto speed = [&kin](double t) {
        double s = 0.0;
        for (const auto& traj : kin.trajectories) s += traj.derivative(t, 1).norm();
        return s;
    };
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = speed(c), fd = speed(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - inv_phi * (b - a);
            fc = speed(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + inv_phi * (b - a);
            fd = speed(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

std::optional<double> next_endpoint(const GroupKinematics& kin, double t0,
                                    double t_seq, const FluxParams& params) {
    params.validate();
    if (t0 >= t_seq) return std::nullopt;
    const EnergyGrid grid = evaluate_grid(kin, t0, t_seq, params);
    const std::size_t n = grid.times.size();
    if (n < 2) return std::nullopt;

    const double p0 = grid.value[0];
    std::size_t best = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (grid.value[i] > grid.value[best]) best = i;
    if (grid.value[best] <= p0 + params.min_gain) return std::nullopt;  // no motion

    // Earliest stationary point where the energy has accumulated and the
    // group has come back to rest relative to its speed peak since t0. The
    // endpoint is refined to the local speed minimum: there dP/drho vanishes
    // term by term (flux rate, velocity penalty, and length rate all scale
    // with the group speed).
    double peak = grid.speed[0];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        peak = std::max(peak, grid.speed[i]);
        if (peak < 1e-12) continue;
        if (grid.value[i] < p0 + params.min_gain) continue;
        if (grid.speed[i] > params.rest_speed_frac * peak + 1e-12) continue;
        const double floor = 1e-4 * peak;
        while (i + 1 < n && grid.speed[i + 1] < grid.speed[i] && grid.speed[i] > floor)
            ++i;
        const double tol = params.grid_step / 100.0;
        if (grid.speed[i] <= floor) {
            // Earliest instant the group reaches rest: bisect the crossing.
            double lo = grid.times[i - 1], hi = grid.times[i];
            while (hi - lo > tol) {
                const double mid = 0.5 * (lo + hi);
                double sp = 0.0;
                for (const auto& traj : kin.trajectories)
                    sp += traj.derivative(mid, 1).norm();
                (sp <= floor ? hi : lo) = mid;
            }
            return 0.5 * (lo + hi);
        }
        return rest_refine(kin, grid.times[i - 1], grid.times[std::min(i + 1, n - 1)],
                           tol);
    }

    // Monotone energy with no rest (e.g. beta_v = beta_s = 0): the grid
    // argmax, refined, which is t_seq for a nondecreasing energy.
    if (best == n - 1) return t_seq;
    if (best == 0) return std::nullopt;
    return golden_refine(kin, t0, grid.times[best - 1], grid.times[best + 1], params);
}

namespace {

SplineTrajectory restrict_trajectory(const SplineTrajectory& traj, double t_start,
                                     double t_end) {
    std::vector<double> times;
    std::vector<Eigen::Vector3d> pts;
    times.push_back(t_start);
    pts.push_back(traj.position(t_start));
    for (double k : traj.knots())
        if (k > t_start + 1e-9 && k < t_end - 1e-9) {
            times.push_back(k);
            pts.push_back(traj.position(k));
        }
    times.push_back(t_end);
    pts.push_back(traj.position(t_end));
    return SplineTrajectory(times, pts);
}

}  // namespace

std::vector<MotionPrimitive> segment_sequence(const GroupKinematics& kin,
                                              const FluxParams& params,
                                              const std::string& sequence_id) {
    params.validate();
    std::vector<MotionPrimitive> out;
    const double t_seq = kin.t_last();
    double t_cur = kin.t_first();
    const double min_len = 3.0 * params.grid_step;  // 3 frames
    while (t_cur < t_seq - params.grid_step) {
        const auto rho = next_endpoint(kin, t_cur, t_seq, params);
        if (!rho) break;
        if (*rho - t_cur >= min_len) {
            MotionPrimitive prim;
            prim.group = kin.group;
            prim.t_start = t_cur;
            prim.t_end = *rho;
            prim.sequence_id = sequence_id;
            for (const auto& traj : kin.trajectories)
                prim.trajectories.push_back(restrict_trajectory(traj, t_cur, *rho));
            out.push_back(std::move(prim));
        }
        if (*rho <= t_cur + 1e-12) break;  // no forward progress
        t_cur = *rho;
    }
    return out;
}

MotionPrimitive anatomical_normalize(const MotionPrimitive& prim,
                                     const GroupKinematics& kin) {
    if (kin.limb_length <= 1e-6) throw DegenerateLimb("limb length below 1e-6 m");
    const double k_g = 1.0 / kin.limb_length;
    MotionPrimitive out = prim;
    out.scale = prim.scale * k_g;
    for (auto& traj : out.trajectories) traj = traj.scaled(k_g);
    return out;
}

Eigen::Vector3d direction_g(const SkeletonSequence& seq, int group,
                            const SkeletonSpec& spec) {
    const auto [a, b] = spec.direction_anchors(group);
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const auto& frame : seq.frames)
        mean += frame.joints[b].translation - frame.joints[a].translation;
    mean /= static_cast<double>(seq.frames.size());
    const double norm = mean.norm();
    if (norm < 1e-9) throw DegenerateDirection("anchor joints coincide");
    return mean / norm;
}

void write_primitive_csv(const std::vector<PrimitiveRecord>& rows, std::ostream& out) {
    out << "sequence_id,group,start_frame,end_frame,label\n";
    for (const auto& r : rows)
        out << r.sequence_id << ',' << r.group << ',' << r.start_frame << ','
            << r.end_frame << ',' << r.label << '\n';
}

std::vector<PrimitiveRecord> read_primitive_csv(std::istream& in) {
    std::vector<PrimitiveRecord> rows;
    std::string line;
    if (!std::getline(in, line)) throw MalformedInput("empty primitive CSV");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        PrimitiveRecord r;
        std::string cell;
        std::getline(row, r.sequence_id, ',');
        std::getline(row, cell, ',');
        r.group = std::stoi(cell);
        std::getline(row, cell, ',');
        r.start_frame = std::stol(cell);
        std::getline(row, cell, ',');
        r.end_frame = std::stol(cell);
        std::getline(row, r.label, ',');
        rows.push_back(r);
    }
    return rows;
}

}  // namespace mprim
