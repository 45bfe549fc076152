#ifndef MPRIM_CLASSES_HPP
#define MPRIM_CLASSES_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "mprim/dpm.hpp"
#include "mprim/features.hpp"
#include "mprim/flux.hpp"

namespace mprim {

/// Broadening applied to the empirical-covariance prior scale when clustering
/// group-level features. Primitive feature clouds are thin curved sheets; the
/// broader prior keeps the sampler from slicing one motion into several
/// components, which would starve the 80% membership rule below.
inline constexpr double kGroupPriorScale = 6.0;

/// A labeled class of primitives backed by one DPM component.
struct PrimitiveClass {
    int group = 0;
    int component = 0;                 // index w into the group model
    std::vector<int> members;          // indices into the primitive list
    std::string label;
    int representative = -1;           // index into members
};

/// Per-primitive bookkeeping linking features back to their trajectory.
struct FeatureProvenance {
    std::vector<int> trajectory_of;  // per feature: recovered ν (0-based)
    std::vector<int> count_of;       // per feature: recovered ν_{|F|}
};

/// Recover both indicators for every feature in the set.
/// Throws InconsistentIndicators when a recovered ν falls outside [0, n_traj).
FeatureProvenance recover_provenance(const FeatureSet& fs, int n_trajectories);

/// Algorithm: assign primitive ν to component w iff at least 80% of its
/// feature vectors were hard-assigned to w; a primitive joins only the class
/// with the largest share (ties -> lower w).
std::vector<PrimitiveClass> classes_from_components(
    const DpmModel& model, const FeatureSet& fs, int n_primitives, int group);

/// Representative: member maximizing the mean component density over its own
/// features that landed in the class's component. Ties -> lower member index.
int class_representative(const PrimitiveClass& cls, const DpmModel& model,
                         const FeatureSet& fs, const FeatureProvenance& prov);

/// Symmetric Hausdorff distance between two point lists (Euclidean).
double hausdorff(const std::vector<Eigen::Vector3d>& a,
                 const std::vector<Eigen::Vector3d>& b);

/// Label file rows: group,class_index,label. Last entry wins on duplicates.
struct LabelEntry {
    int group = 0;
    int class_index = 0;
    std::string label;
};

std::vector<LabelEntry> read_label_csv(std::istream& in);

/// Attach labels; throws UnknownClassRef when an entry names a class that
/// does not exist for its group.
void apply_labels(std::vector<PrimitiveClass>& classes,
                  const std::vector<LabelEntry>& labels);

}  // namespace mprim

#endif
