#ifndef MPRIM_FLUX_HPP
#define MPRIM_FLUX_HPP

#include <optional>
#include <string>
#include <vector>

#include "mprim/skeleton.hpp"
#include "mprim/spline.hpp"

namespace mprim {

/// Hyperparameters of the flux energy maximization.
struct FluxParams {
    double beta_v = 0.5;       // velocity penalty weight (s)
    double beta_s = 0.05;      // trajectory-length regularizer weight
    double beta_s_sign = 1.0;  // +1 favors length as the energy is written; -1 penalizes
    double grid_step = 0.02;   // evaluation grid step (s); one frame at 50 Hz
    Eigen::Vector3d g = Eigen::Vector3d::UnitZ();  // stationary-pose direction, unit
    double min_gain = 5e-3;    // minimum energy rise over P(t0) to accept an endpoint
    double rest_speed_frac = 0.1;  // endpoint group speed must be below this fraction
                                   // of the peak group speed in the search window
    void validate() const;
};

/// Full-sequence spline kinematics of one group's 3 joints (inner -> outer).
struct GroupKinematics {
    int group = 0;
    std::vector<SplineTrajectory> trajectories;  // size 3
    double limb_length = 0.0;                    // ℓ_G (m)

    double t_first() const { return trajectories.front().t_first(); }
    double t_last() const { return trajectories.front().t_last(); }
};

/// A discovered motion primitive: the group's 3 trajectory segments over a
/// common interval.
struct MotionPrimitive {
    int group = 0;
    double t_start = 0.0;
    double t_end = 0.0;
    std::vector<SplineTrajectory> trajectories;  // size 3, domain [t_start, t_end]
    std::string sequence_id;
    double scale = 1.0;  // applied k_G (1/m); 1 when unscaled
    std::string label;   // empty when unknown
};

/// Build GroupKinematics from a normalized sequence: fit splines to the
/// group's joint translations and measure the mean inner->middle->outer
/// chain length over frames.
GroupKinematics make_group_kinematics(const SkeletonSequence& seq, int group,
                                      const SkeletonSpec& spec = SkeletonSpec::canonical());

/// Motion flux Σ_j ∫ |v̇_j·g| dt over [t1,t2]. The integrand is piecewise
/// linear in t, so intervals are split at knots and at sign changes of the
/// projected acceleration.
double motion_flux(const GroupKinematics& kin, double t1, double t2,
                   const Eigen::Vector3d& g);

/// Energy P(ρ;t0) = Φ(ρ,t0) − (β_v/2)Σ_j(‖v_j(ρ)‖²+‖v_j(t0)‖²)
///                 ± β_s Σ_j(s_j(ρ)−s_j(t0)).
double energy(const GroupKinematics& kin, double rho, double t0,
              const FluxParams& params);

/// Next primitive endpoint after t0: the earliest stationary local maximum of
/// P(·;t0) on the evaluation grid, refined by golden-section search to
/// grid_step/100. Falls back to the grid argmax when P is monotone (no
/// interior maximum). Returns nullopt when no point improves on P(t0) (rest).
std::optional<double> next_endpoint(const GroupKinematics& kin, double t0,
                                    double t_seq, const FluxParams& params);

/// Sequential discovery: iterate next_endpoint from the sequence start until
/// exhaustion. Returned intervals are contiguous; primitives shorter than 3
/// frames (3 * grid_step) are discarded.
std::vector<MotionPrimitive> segment_sequence(const GroupKinematics& kin,
                                              const FluxParams& params,
                                              const std::string& sequence_id = "");

/// Scale all trajectory coordinates by k_G = 1/ℓ_G.
/// Throws DegenerateLimb when ℓ_G ≤ 1e-6 m.
MotionPrimitive anatomical_normalize(const MotionPrimitive& prim,
                                     const GroupKinematics& kin);

/// Unit stationary-pose direction for a group: the anchor-pair offset
/// averaged over frames. Throws DegenerateDirection on coincident anchors.
Eigen::Vector3d direction_g(const SkeletonSequence& seq, int group,
                            const SkeletonSpec& spec = SkeletonSpec::canonical());

/// Primitive CSV row as published: sequence_id,group,start_frame,end_frame,label.
struct PrimitiveRecord {
    std::string sequence_id;
    int group = 0;
    long start_frame = 0;
    long end_frame = 0;
    std::string label;
};

void write_primitive_csv(const std::vector<PrimitiveRecord>& rows, std::ostream& out);
std::vector<PrimitiveRecord> read_primitive_csv(std::istream& in);

}  // namespace mprim

#endif
