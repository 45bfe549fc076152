#include "mprim/tracking.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mprim/errors.hpp"

namespace mprim {

AnchorSet anchors_of(const SkeletonSequence::Frame& frame, const SkeletonSpec& spec) {
    static const char* names[5] = {"lfemur", "rfemur", "lclavicle", "rclavicle", "head"};
    AnchorSet anchors;
    for (int i = 0; i < 5; ++i)
        anchors.points[i] = frame.joints[spec.joint_index(names[i])].translation;
    return anchors;
}

RigidFit weighted_kabsch(const AnchorSet& src, const AnchorSet& dst) {
    const double wsum = std::accumulate(src.weights.begin(), src.weights.end(), 0.0);
    if (wsum <= 0) throw DegenerateConfiguration("non-positive total weight");

    Eigen::Vector3d c_src = Eigen::Vector3d::Zero(), c_dst = Eigen::Vector3d::Zero();
    for (int i = 0; i < 5; ++i) {
        c_src += src.weights[i] * src.points[i];
        c_dst += src.weights[i] * dst.points[i];
    }
    c_src /= wsum;
    c_dst /= wsum;

    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (int i = 0; i < 5; ++i)
        cov += src.weights[i] * (dst.points[i] - c_dst) * (src.points[i] - c_src).transpose();

    Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    // Rank < 2 leaves a rotation axis unconstrained.
    if (sv(1) <= 1e-12 * std::max(sv(0), 1.0))
        throw DegenerateConfiguration("anchor configuration is collinear");

    const Eigen::Matrix3d u = svd.matrixU(), v = svd.matrixV();
    Eigen::Matrix3d h = Eigen::Matrix3d::Identity();
    h(2, 2) = (u * v.transpose()).determinant() < 0 ? -1.0 : 1.0;

    RigidFit fit;
    fit.rotation = u * h * v.transpose();
    fit.translation = c_dst - fit.rotation * c_src;
    double sq = 0.0;
    for (int i = 0; i < 5; ++i)
        sq += src.weights[i] *
              (dst.points[i] - fit.rotation * src.points[i] - fit.translation).squaredNorm();
    fit.residual = std::sqrt(sq / wsum);
    return fit;
}

namespace {

// Residual matrix between all source/destination skeleton pairs.
Eigen::MatrixXd residual_matrix(const std::vector<AnchorSet>& a,
                                const std::vector<AnchorSet>& b) {
    Eigen::MatrixXd r(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) {
            try {
                r(i, j) = weighted_kabsch(a[i], b[j]).residual;
            } catch (const DegenerateConfiguration&) {
                r(i, j) = std::numeric_limits<double>::infinity();
            }
        }
    return r;
}

}  // namespace

std::vector<int> associate(const std::vector<AnchorSet>& frame_t,
                           const std::vector<AnchorSet>& frame_t1,
                           const TrackerOptions& opts) {
    std::vector<int> match(frame_t.size(), -1);
    if (frame_t.empty() || frame_t1.empty()) return match;
    const Eigen::MatrixXd r = residual_matrix(frame_t, frame_t1);
    const int n = static_cast<int>(frame_t.size());
    const int m = static_cast<int>(frame_t1.size());

    if (n <= 4 && m <= 4) {
        // Exhaustive search over injective assignments: maximize matches,
        // then minimize total residual.
        struct Best {
            std::vector<int> assign;
            int matches = -1;
            double cost = std::numeric_limits<double>::infinity();
        } record;
        std::vector<int> cur(n, -1);
        std::vector<bool> taken(m, false);
        auto search = [&](auto&& self, int i, int matches, double cost) -> void {
            if (i == n) {
                if (matches > record.matches ||
                    (matches == record.matches && cost < record.cost)) {
                    record = {cur, matches, cost};
                }
                return;
            }
            for (int j = 0; j < m; ++j) {
                if (taken[j] || r(i, j) > opts.r_max) continue;
                taken[j] = true;
                cur[i] = j;
                self(self, i + 1, matches + 1, cost + r(i, j));
                taken[j] = false;
            }
            cur[i] = -1;
            self(self, i + 1, matches, cost);
        };
        search(search, 0, 0, 0.0);
        return record.assign;
    }

    // Greedy: repeatedly take the globally cheapest admissible pair.
    std::vector<bool> src_done(n, false), dst_done(m, false);
    while (true) {
        double best = opts.r_max;
        int bi = -1, bj = -1;
        for (int i = 0; i < n; ++i) {
            if (src_done[i]) continue;
            for (int j = 0; j < m; ++j) {
                if (dst_done[j] || r(i, j) > best) continue;
                best = r(i, j);
                bi = i;
                bj = j;
            }
        }
        if (bi < 0) break;
        match[bi] = bj;
        src_done[bi] = true;
        dst_done[bj] = true;
    }
    return match;
}

std::vector<SubjectTrack> track_sequence(const std::vector<DetectionFrame>& frames,
                                         const TrackerOptions& opts,
                                         const SkeletonSpec& spec) {
    std::vector<SubjectTrack> tracks;
    std::vector<int> open;  // track index per detection of the previous frame
    std::vector<AnchorSet> prev;
    int next_id = 0;

    for (std::size_t f = 0; f < frames.size(); ++f) {
        std::vector<AnchorSet> curr;
        for (const auto& skel : frames[f].skeletons) curr.push_back(anchors_of(skel, spec));

        std::vector<int> curr_track(curr.size(), -1);
        if (!prev.empty() && !curr.empty()) {
            const auto match = associate(prev, curr, opts);
            for (std::size_t i = 0; i < match.size(); ++i) {
                if (match[i] < 0) continue;
                const int t = open[i];
                tracks[t].detections.push_back(match[i]);
                tracks[t].steps.push_back(weighted_kabsch(prev[i], curr[match[i]]));
                curr_track[match[i]] = t;
            }
        }
        for (std::size_t j = 0; j < curr.size(); ++j) {
            if (curr_track[j] >= 0) continue;
            SubjectTrack t;
            t.id = next_id++;
            t.first_frame = static_cast<long>(f);
            t.detections.push_back(static_cast<int>(j));
            curr_track[j] = static_cast<int>(tracks.size());
            tracks.push_back(std::move(t));
        }
        open.clear();
        prev = std::move(curr);
        open.resize(prev.size());
        for (std::size_t j = 0; j < prev.size(); ++j) open[j] = curr_track[j];
    }
    return tracks;
}

SkeletonSequence track_to_sequence(const SubjectTrack& track,
                                   const std::vector<DetectionFrame>& frames,
                                   double rate) {
    if (track.detections.empty()) throw EmptyData("track has no detections");
    SkeletonSequence seq;
    seq.rate = rate;
    seq.position_only = true;
    seq.id = "track-" + std::to_string(track.id);
    for (std::size_t k = 0; k < track.detections.size(); ++k) {
        const auto& frame = frames.at(track.first_frame + k);
        seq.frames.push_back(frame.skeletons.at(track.detections[k]));
    }
    return seq;
}

}  // namespace mprim
