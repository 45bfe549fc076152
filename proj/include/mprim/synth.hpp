#ifndef MPRIM_SYNTH_HPP
#define MPRIM_SYNTH_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mprim/flux.hpp"
#include "mprim/skeleton.hpp"

namespace mprim {

/// Number of parametric motion families per group.
inline constexpr int kNumFamilies = 6;

struct SyntheticEvent {
    int family = 0;          // 0..kNumFamilies-1
    double duration = 1.0;   // s, > 0
    double amplitude = 1.0;  // relative template amplitude
    double dwell_before = 0.0;  // rest before the event (s)
};

struct SyntheticScript {
    int group = 3;  // arm group by default
    std::vector<SyntheticEvent> events;
    double rate = 50.0;
    std::uint64_t seed = 0;
    double limb_scale = 1.0;     // multiplies the nominal limb lengths
    double trailing_dwell = 0.0; // rest appended after the last event (s)
};

/// One ground-truth (start, end) endpoint pair per event, in frames (1-based,
/// fractional when the instant falls between frames).
struct EndpointPair {
    double start_frame = 0.0;
    double end_frame = 0.0;
};

struct GeneratedSequence {
    SkeletonSequence sequence;  // position-only; non-group joints rest at nominal pose
    std::vector<EndpointPair> endpoints;
    Eigen::Vector3d g = Eigen::Vector3d::UnitZ();  // stationary direction of the scene
};

/// Render the script: each event interpolates group joint angles between
/// family-specific poses under a minimum-jerk profile (zero velocity and
/// acceleration at both endpoints), chaining pose-continuously from event to
/// event, with optional rest dwells. An empty event list yields a pure rest
/// sequence with no endpoints. Throws InvalidScript.
GeneratedSequence generate_sequence(const SyntheticScript& script);

/// A single isolated primitive of a family, as discovery would return it:
/// 3 spline trajectories over the event interval, anatomically normalized.
/// Used by the recognition benchmark.
MotionPrimitive generate_primitive(int group, int family, double amplitude,
                                   double limb_scale, double duration, double rate,
                                   std::uint64_t seed);

/// Discovered-vs-truth endpoints of one sequence, in frames, paired by order.
struct EndpointRecord {
    std::vector<double> truth;
    std::vector<double> discovered;
};

struct EndpointMetrics {
    double mae = 0.0;
    double rmse = 0.0;
    double miss_rate = 0.0;  // fraction of sequences with count mismatch
    int n_scored = 0;        // sequences entering MAE/RMSE
};

/// Per-sequence mean absolute / squared endpoint error, averaged over the
/// sequences whose discovered count matches the truth; mismatches are
/// reported as the miss rate and excluded.
EndpointMetrics endpoint_metrics(const std::vector<EndpointRecord>& records);

struct BenchReport {
    int n = 0;
    EndpointMetrics metrics;
    std::vector<std::pair<int, EndpointMetrics>> per_group;
    std::uint64_t seed = 0;
    FluxParams params;
};

/// Generate n random scripts cycling through the six limb groups, segment
/// them with the flux method, and score the endpoints.
BenchReport run_benchmark(int n_sequences, const FluxParams& params,
                          std::uint64_t seed);

void write_bench_report(const BenchReport& report, std::ostream& out);

}  // namespace mprim

#endif
