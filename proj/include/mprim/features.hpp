#ifndef MPRIM_FEATURES_HPP
#define MPRIM_FEATURES_HPP

#include <Eigen/Dense>
#include <vector>

#include "mprim/spline.hpp"

namespace mprim {

/// Feature vector dimension: 9 coordinates of 3 contiguous decimated points,
/// 3 curvatures, 3 torsions, and the 2 recoverability indicators.
inline constexpr int kFeatureDim = 17;

using FeatureVector = Eigen::Matrix<double, kFeatureDim, 1>;

inline constexpr int kIndexIndicator = 15;  // ν̂ position
inline constexpr int kCountIndicator = 16;  // ν̂_{|F|} position

struct Bounds {
    double min = 0.0;
    double max = 0.0;
};

/// All feature vectors for a set of enumerated trajectories, indicators
/// normalized to [0,1] with the recorded bounds.
struct FeatureSet {
    std::vector<FeatureVector> features;
    Bounds index_bounds;  // over ν
    Bounds count_bounds;  // over ν_{|F|}
    int group = 0;
};

/// Sliding 3-point windows (stride 1) over a decimated trajectory; the two
/// indicator slots hold the raw trajectory index nu and the window count n-2.
/// Throws TooShort on fewer than 3 points.
std::vector<FeatureVector> extract_features(const std::vector<CurvePoint>& decimated,
                                            double nu);

/// (v - min)/(max - min); 0 when the bounds collapse.
double normalize_indicator(double value, const Bounds& bounds);

/// Inverse map, rounded to the nearest integer for index recovery.
long denormalize_indicator(double v_hat, const Bounds& bounds);

/// Assemble a FeatureSet from per-trajectory raw feature lists: computes
/// indicator bounds over the whole collection and normalizes both indicators
/// in place.
FeatureSet build_feature_set(std::vector<std::vector<FeatureVector>> per_trajectory,
                             int group);

/// Sample a trajectory at the given rate over its domain, attach curvature
/// and torsion (0 at samples below the speed or curvature floor), and
/// decimate. Used by both clustering and recognition feature pipelines.
std::vector<CurvePoint> sample_and_decimate(const SplineTrajectory& traj,
                                            double rate, int factor = 5);

}  // namespace mprim

#endif
