#ifndef MPRIM_TRACKING_HPP
#define MPRIM_TRACKING_HPP

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <vector>

#include "mprim/skeleton.hpp"

namespace mprim {

/// The 5 slow-moving anchor joints used for frame-to-frame association:
/// left hip, right hip, left clavicle, right clavicle, head.
struct AnchorSet {
    std::array<Eigen::Vector3d, 5> points;
    std::array<double, 5> weights = {1, 1, 1, 1, 1};
};

struct RigidFit {
    Eigen::Matrix3d rotation;
    Eigen::Vector3d translation;
    double residual = 0.0;  // weighted RMS alignment error
};

/// Extract the anchor set from a skeleton frame.
AnchorSet anchors_of(const SkeletonSequence::Frame& frame,
                     const SkeletonSpec& spec = SkeletonSpec::canonical());

/// Weighted least-squares rigid alignment: SVD of the weighted cross
/// covariance of the centered sets, det(R)=+1 enforced by the sign of
/// det(VUᵀ). Throws DegenerateConfiguration when the covariance rank < 2.
RigidFit weighted_kabsch(const AnchorSet& src, const AnchorSet& dst);

struct TrackerOptions {
    double r_max = 0.5;  // association residual gate (m)
};

/// One-to-one assignment between the skeletons of two consecutive frames
/// minimizing the total alignment residual; exhaustive for up to 4 skeletons
/// per frame, greedy above. -1 marks an unmatched source.
std::vector<int> associate(const std::vector<AnchorSet>& frame_t,
                           const std::vector<AnchorSet>& frame_t1,
                           const TrackerOptions& opts = {});

struct SubjectTrack {
    int id = 0;
    long first_frame = 0;
    std::vector<int> detections;  // per frame: detection index
    std::vector<RigidFit> steps;  // per consecutive pair
};

/// Multi-skeleton detections for one frame.
struct DetectionFrame {
    std::vector<SkeletonSequence::Frame> skeletons;
};

/// Chain associations across frames. An empty frame closes every open track;
/// re-appearing subjects start new tracks (no re-identification).
std::vector<SubjectTrack> track_sequence(const std::vector<DetectionFrame>& frames,
                                         const TrackerOptions& opts = {},
                                         const SkeletonSpec& spec = SkeletonSpec::canonical());

/// Single-subject sequence of one track, for downstream segmentation.
SkeletonSequence track_to_sequence(const SubjectTrack& track,
                                   const std::vector<DetectionFrame>& frames,
                                   double rate);

}  // namespace mprim

#endif
