#ifndef MPRIM_RECOGNITION_HPP
#define MPRIM_RECOGNITION_HPP

#include <string>
#include <vector>

#include "mprim/classes.hpp"
#include "mprim/dpm.hpp"
#include "mprim/features.hpp"
#include "mprim/flux.hpp"

namespace mprim {

/// A polyline curve segment with discrete Frenet data and ruled-surface
/// normals, the unit of comparison in the geometric recognition cost.
struct CurveSegment {
    std::vector<Eigen::Vector3d> points;
    std::vector<FrenetFrame> frames;
    std::vector<Eigen::Vector3d> ruled_normals;
};

/// Build a segment from ordered points: discrete tangents/normals by central
/// differences, ruled-surface normal (n × n')/‖n × n'‖ with binormal fallback
/// when the cross product degenerates. Needs at least 2 points.
CurveSegment make_curve_segment(const std::vector<Eigen::Vector3d>& points);

/// Per-class recognizer state: a DPM over all 3 joint trajectories of the
/// class members plus the precomputed per-component manifolds.
struct ClassModel {
    int group = 0;
    int class_index = 0;
    std::string label;
    DpmModel dpm;
    std::vector<std::vector<CurveSegment>> manifolds;  // per component
};

/// Decimated-trajectory view of a primitive used by recognition: the 17-dim
/// features of its 3 trajectories and the manifold of its curve segments.
struct PrimitiveObservation {
    std::vector<FeatureVector> features;
    std::vector<CurveSegment> manifold;
};

/// Features + manifold for one primitive (all 3 joint trajectories, same
/// decimation scheme as clustering).
PrimitiveObservation observe_primitive(const MotionPrimitive& prim, double rate,
                                       int decimation = 5);

/// Fit one ClassModel per class from its member primitives.
std::vector<ClassModel> fit_class_models(const std::vector<PrimitiveClass>& classes,
                                         const std::vector<MotionPrimitive>& primitives,
                                         double rate, const McmcOptions& mcmc);

struct Hypothesis {
    int model = 0;      // index into the ClassModel list
    int component = 0;  // component j within that model
    double loglik = 0.0;
    double cost = 0.0;
};

/// All (class, component) pairs whose joint feature log-likelihood is within
/// delta of the best, sorted by descending log-likelihood.
std::vector<Hypothesis> hypothesis_set(const std::vector<ClassModel>& models,
                                       const std::vector<FeatureVector>& features,
                                       double delta);

/// Ruled-surface projection distance and Frenet rotation distance between two
/// segments: delta = ‖q − q'‖ for the closest pair (q in yu, q' in the
/// projection of y), F_R = trace((I−R)(I−R)ᵀ) for the rotation aligning the
/// frames at q and q'.
std::pair<double, double> segment_distance(const CurveSegment& yu, const CurveSegment& y);

/// max over segment pairs of (delta + F_R). Throws EmptyManifold.
double component_cost(const std::vector<CurveSegment>& component_manifold,
                      const std::vector<CurveSegment>& unknown_manifold);

enum class CostMode { full, delta_only, likelihood_only };

struct RecognitionResult {
    std::string label;
    int class_index = -1;
    int component = -1;
    double loglik = 0.0;
    double cost = 0.0;
};

/// Eq.-style two-stage recognition: likelihood tier of width delta, then the
/// cost-minimizing entry wins (ties -> higher loglik, then lower class index).
RecognitionResult recognize(const std::vector<ClassModel>& models,
                            const PrimitiveObservation& obs, double delta,
                            CostMode mode = CostMode::full);

}  // namespace mprim

#endif
