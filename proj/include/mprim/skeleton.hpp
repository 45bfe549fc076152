#ifndef MPRIM_SKELETON_HPP
#define MPRIM_SKELETON_HPP

#include <Eigen/Dense>
#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace mprim {

/// Rigid transform in SE(3): orthonormal rotation + translation (meters).
struct Se3Transform {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    static Se3Transform identity() { return {}; }

    Se3Transform inverse() const;
    Se3Transform operator*(const Se3Transform& rhs) const;

    /// ‖RᵀR − I‖_F and det checks against the given tolerance.
    bool is_valid_rotation(double tol = 1e-9) const;
};

/// Number of joints and groups in the canonical skeleton.
inline constexpr int kNumJoints = 18;
inline constexpr int kNumGroups = 6;
inline constexpr int kJointsPerGroup = 3;

struct JointInfo {
    std::string name;
    int group = 0;           // 1..6
    std::string parent;      // parent joint within the group (root's parent is itself)
};

/// Static description of the 18-joint, 6-group skeleton hierarchy.
/// Groups: G1 head, G2 torso, G3 right arm, G4 left arm, G5 right leg, G6 left leg.
/// Each group lists its joints inner -> outer; the inner joint is the group parent.
class SkeletonSpec {
public:
    static const SkeletonSpec& canonical();

    const std::vector<JointInfo>& joints() const { return joints_; }
    const std::string& root() const { return root_; }

    int joint_index(const std::string& name) const;  // -1 if unknown
    /// Joint indices of a group, ordered inner -> outer.
    std::array<int, kJointsPerGroup> group_joints(int group) const;
    /// The group-parent joint index for a group.
    int group_parent(int group) const;
    /// Direction anchor joint pair (a, b): g points from a to b.
    std::pair<int, int> direction_anchors(int group) const;

private:
    SkeletonSpec();
    std::vector<JointInfo> joints_;
    std::string root_;
};

/// A motion-capture sequence: per-frame SE(3) poses of all 18 joints.
/// Frame k (0-based) is at time k / rate seconds.
struct SkeletonSequence {
    struct Frame {
        std::array<Se3Transform, kNumJoints> joints;
    };

    std::vector<Frame> frames;
    double rate = 0.0;  // Hz
    std::string id;
    bool position_only = false;

    double duration() const { return frames.empty() ? 0.0 : (frames.size() - 1) / rate; }
    double time_of(std::size_t frame) const { return frame / rate; }
};

enum class SequenceFormat { json, csv };

/// Parse a sequence from the documented JSON or CSV format.
/// Throws MalformedInput on missing joints, non-finite values, or rotations
/// failing the 1e-6 orthonormality tolerance.
SkeletonSequence parse_sequence(std::istream& in, SequenceFormat format);
SkeletonSequence parse_sequence_file(const std::string& path);

/// Serialize to the JSON format; parse ∘ serialize is the identity.
void serialize_sequence(const SkeletonSequence& seq, std::ostream& out);

/// Resample to target_rate. Translations are interpolated by natural cubic
/// spline, rotations by quaternion slerp between bracketing frames. First and
/// last timestamps are preserved.
SkeletonSequence resample(const SkeletonSequence& seq, double target_rate);

/// Root-sequence pose normalization: each joint pose is expressed relative to
/// its group parent at the same frame and the frame-1 root-to-parent transform.
/// Throws PositionOnlyInput when rotations are absent; such sequences instead
/// go through position_normalize.
SkeletonSequence root_sequence_normalize(const SkeletonSequence& seq,
                                         const SkeletonSpec& spec = SkeletonSpec::canonical());

/// Fallback for position-only inputs: subtract the frame-1 root translation.
SkeletonSequence position_normalize(const SkeletonSequence& seq,
                                    const SkeletonSpec& spec = SkeletonSpec::canonical());

/// Timestamped position series of one joint.
struct JointSeries {
    std::vector<double> times;
    std::vector<Eigen::Vector3d> points;
};

/// Translation series of a group's 3 joints, ordered inner -> outer.
std::array<JointSeries, kJointsPerGroup> group_positions(
    const SkeletonSequence& seq, int group,
    const SkeletonSpec& spec = SkeletonSpec::canonical());

}  // namespace mprim

#endif
