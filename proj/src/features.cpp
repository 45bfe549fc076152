#include "mprim/features.hpp"

#include <cmath>

#include "mprim/errors.hpp"

namespace mprim {

std::vector<FeatureVector> extract_features(const std::vector<CurvePoint>& decimated,
                                            double nu) {
    const std::size_t n = decimated.size();
    if (n < 3) throw TooShort("feature extraction needs >= 3 decimated points");
    const double count = static_cast<double>(n - 2);
    std::vector<FeatureVector> out;
    out.reserve(n - 2);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        FeatureVector f;
        for (int w = 0; w < 3; ++w) {
            const auto& p = decimated[i - 1 + w];
            f.segment<3>(3 * w) = p.p;
            f[9 + w] = p.kappa;
            f[12 + w] = p.tau;
        }
        f[kIndexIndicator] = nu;
        f[kCountIndicator] = count;
        if (!f.allFinite()) throw DegenerateInput("non-finite feature vector");
        out.push_back(f);
    }
    return out;
}

double normalize_indicator(double value, const Bounds& bounds) {
    if (bounds.max <= bounds.min) return 0.0;
    return (value - bounds.min) / (bounds.max - bounds.min);
}

long denormalize_indicator(double v_hat, const Bounds& bounds) {
    return std::lround(v_hat * (bounds.max - bounds.min) + bounds.min);
}

FeatureSet build_feature_set(std::vector<std::vector<FeatureVector>> per_trajectory,
                             int group) {
    FeatureSet fs;
    fs.group = group;
    bool first = true;
    for (const auto& traj : per_trajectory)
        for (const auto& f : traj) {
            if (first) {
                fs.index_bounds = {f[kIndexIndicator], f[kIndexIndicator]};
                fs.count_bounds = {f[kCountIndicator], f[kCountIndicator]};
                first = false;
            }
            fs.index_bounds.min = std::min(fs.index_bounds.min, f[kIndexIndicator]);
            fs.index_bounds.max = std::max(fs.index_bounds.max, f[kIndexIndicator]);
            fs.count_bounds.min = std::min(fs.count_bounds.min, f[kCountIndicator]);
            fs.count_bounds.max = std::max(fs.count_bounds.max, f[kCountIndicator]);
        }
    for (auto& traj : per_trajectory)
        for (auto& f : traj) {
            f[kIndexIndicator] = normalize_indicator(f[kIndexIndicator], fs.index_bounds);
            f[kCountIndicator] = normalize_indicator(f[kCountIndicator], fs.count_bounds);
            fs.features.push_back(f);
        }
    return fs;
}

std::vector<CurvePoint> sample_and_decimate(const SplineTrajectory& traj,
                                            double rate, int factor) {
    std::vector<CurvePoint> samples;
    const double t0 = traj.t_first(), t1 = traj.t_last();
    const long n = std::max(2L, std::lround((t1 - t0) * rate) + 1);
    for (long k = 0; k < n; ++k) {
        const double t = t0 + (t1 - t0) * static_cast<double>(k) / (n - 1);
        CurvePoint p;
        p.p = traj.position(t);
        // Rest samples and straight stretches carry zero curvature/torsion so
        // the feature map stays total.
        try {
            std::tie(p.kappa, p.tau) = traj.curvature_torsion(t);
        } catch (const SingularVelocity&) {
            p.kappa = p.tau = 0.0;
        }
        samples.push_back(p);
    }
    return decimate(samples, factor);
}

}  // namespace mprim
