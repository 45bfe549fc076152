#include "mprim/recognition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mprim/errors.hpp"

namespace mprim {

namespace {

Eigen::Vector3d safe_unit(const Eigen::Vector3d& v, const Eigen::Vector3d& fallback) {
    const double n = v.norm();
    return n > 1e-12 ? Eigen::Vector3d(v / n) : fallback;
}

Eigen::Vector3d any_orthogonal(const Eigen::Vector3d& u) {
    const Eigen::Vector3d probe =
        std::abs(u.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
    return safe_unit(u.cross(probe), Eigen::Vector3d::UnitZ());
}

}  // namespace

CurveSegment make_curve_segment(const std::vector<Eigen::Vector3d>& points) {
    const int n = static_cast<int>(points.size());
    if (n < 2) throw EmptyCurve("curve segment needs at least 2 points");

    CurveSegment seg;
    seg.points = points;
    seg.frames.resize(n);

    // Discrete tangents: central differences on the interior.
    std::vector<Eigen::Vector3d> tangents(n);
    for (int i = 0; i < n; ++i) {
        const Eigen::Vector3d diff = i == 0         ? points[1] - points[0]
                                     : i == n - 1   ? points[n - 1] - points[n - 2]
                                                    : points[i + 1] - points[i - 1];
        tangents[i] = safe_unit(diff, i ? tangents[i - 1] : Eigen::Vector3d::UnitX());
    }
    double arclen = 0.0;
    for (int i = 0; i < n; ++i) {
        if (i) arclen += (points[i] - points[i - 1]).norm();
        const Eigen::Vector3d dt = i == 0       ? tangents[1] - tangents[0]
                                   : i == n - 1 ? tangents[n - 1] - tangents[n - 2]
                                                : tangents[i + 1] - tangents[i - 1];
        // Normal: tangent derivative orthogonalized against the tangent.
        const Eigen::Vector3d raw = dt - dt.dot(tangents[i]) * tangents[i];
        const Eigen::Vector3d normal =
            raw.norm() > 1e-12 ? Eigen::Vector3d(raw.normalized())
                               : any_orthogonal(tangents[i]);
        auto& f = seg.frames[i];
        f.t = tangents[i];
        f.n = normal;
        f.b = f.t.cross(f.n);
        f.point = points[i];
        f.s = arclen;
    }

    // Ruled-surface normal along the segment: n × n' between neighbouring
    // normals, falling back to the binormal when they are parallel.
    seg.ruled_normals.resize(n);
    for (int i = 0; i < n; ++i) {
        const int j = i + 1 < n ? i + 1 : i - 1;
        const Eigen::Vector3d cross = seg.frames[i].n.cross(seg.frames[j].n);
        seg.ruled_normals[i] =
            cross.norm() > 1e-12 ? Eigen::Vector3d(cross.normalized()) : seg.frames[i].b;
    }
    return seg;
}

PrimitiveObservation observe_primitive(const MotionPrimitive& prim, double rate,
                                       int decimation) {
    PrimitiveObservation obs;
    std::vector<std::vector<FeatureVector>> per_traj;
    for (const auto& traj : prim.trajectories) {
        const auto dec = sample_and_decimate(traj, rate, decimation);
        per_traj.push_back(extract_features(dec, static_cast<double>(per_traj.size())));
        std::vector<Eigen::Vector3d> pts;
        for (const auto& cp : dec) pts.push_back(cp.p);
        obs.manifold.push_back(make_curve_segment(pts));
    }
    const FeatureSet fs = build_feature_set(std::move(per_traj), prim.group);
    obs.features = fs.features;
    return obs;
}

std::vector<ClassModel> fit_class_models(const std::vector<PrimitiveClass>& classes,
                                         const std::vector<MotionPrimitive>& primitives,
                                         double rate, const McmcOptions& mcmc) {
    std::vector<ClassModel> out;
    for (const auto& cls : classes) {
        if (cls.members.empty()) throw EmptyClass("cannot model an empty class");
        ClassModel cm;
        cm.group = cls.group;
        cm.class_index = cls.component;
        cm.label = cls.label;

        // Decimated polylines for every member trajectory, plus their features.
        std::vector<std::vector<Eigen::Vector3d>> polylines;
        std::vector<std::vector<FeatureVector>> per_traj;
        for (int p : cls.members) {
            const auto& prim = primitives.at(p);
            for (const auto& traj : prim.trajectories) {
                const auto dec = sample_and_decimate(traj, rate, 5);
                const double nu = static_cast<double>(per_traj.size());
                per_traj.push_back(extract_features(dec, nu));
                std::vector<Eigen::Vector3d> pts;
                for (const auto& cp : dec) pts.push_back(cp.p);
                polylines.push_back(std::move(pts));
            }
        }
        FeatureSet fs = build_feature_set(std::move(per_traj), cls.group);
        if (fs.features.empty()) throw NoFeatures("class produced no features");

        std::vector<Eigen::VectorXd> data;
        for (const auto& f : fs.features) data.emplace_back(f);
        cm.dpm = fit_dpm(data, NormalWishartPrior::from_data(data), 1.0, mcmc);

        // Component manifolds: runs of consecutive windows on one trajectory
        // that share a component merge into one curve segment.
        const auto prov = recover_provenance(fs, static_cast<int>(polylines.size()));
        std::vector<int> window_of(fs.features.size());
        {
            std::vector<int> next(polylines.size(), 0);
            for (std::size_t i = 0; i < fs.features.size(); ++i)
                window_of[i] = next[prov.trajectory_of[i]]++;
        }
        std::vector<int> comp_of(fs.features.size());
        for (int w = 0; w < cm.dpm.k(); ++w)
            for (int i : cm.dpm.components[w].members) comp_of[i] = w;

        cm.manifolds.resize(cm.dpm.k());
        std::size_t i = 0;
        while (i < fs.features.size()) {
            const int traj = prov.trajectory_of[i];
            const int comp = comp_of[i];
            std::size_t j = i + 1;
            while (j < fs.features.size() && prov.trajectory_of[j] == traj &&
                   comp_of[j] == comp && window_of[j] == window_of[j - 1] + 1)
                ++j;
            // Windows [w_i .. w_{j-1}] cover decimated points [w_i, w_{j-1}+3).
            const int first = window_of[i];
            const int last = window_of[j - 1] + 3;
            std::vector<Eigen::Vector3d> pts(polylines[traj].begin() + first,
                                             polylines[traj].begin() + last);
            cm.manifolds[comp].push_back(make_curve_segment(pts));
            i = j;
        }
        out.push_back(std::move(cm));
    }
    return out;
}

std::vector<Hypothesis> hypothesis_set(const std::vector<ClassModel>& models,
                                       const std::vector<FeatureVector>& features,
                                       double delta) {
    if (models.empty()) throw EmptyHypotheses("no class models");
    if (features.empty()) throw NoFeatures("no observation features");

    std::vector<Hypothesis> all;
    for (std::size_t m = 0; m < models.size(); ++m) {
        const auto& dpm = models[m].dpm;
        for (int j = 0; j < dpm.k(); ++j) {
            const auto& comp = dpm.components[j];
            double ll = 0.0;
            for (const auto& f : features)
                ll += gaussian_logdensity(f, comp.mean, comp.cov);
            all.push_back({static_cast<int>(m), j, ll, 0.0});
        }
    }
    const double best = std::max_element(all.begin(), all.end(),
                                         [](const Hypothesis& a, const Hypothesis& b) {
                                             return a.loglik < b.loglik;
                                         })
                            ->loglik;
    std::vector<Hypothesis> tier;
    for (const auto& h : all)
        if (h.loglik >= best - delta) tier.push_back(h);
    std::sort(tier.begin(), tier.end(), [](const Hypothesis& a, const Hypothesis& b) {
        if (a.loglik != b.loglik) return a.loglik > b.loglik;
        if (a.model != b.model) return a.model < b.model;
        return a.component < b.component;
    });
    return tier;
}

std::pair<double, double> segment_distance(const CurveSegment& yu, const CurveSegment& y) {
    if (yu.points.empty() || y.points.empty())
        throw EmptyCurve("segment distance needs points");
    double best = std::numeric_limits<double>::infinity();
    int bi = 0, bj = 0;
    for (std::size_t i = 0; i < yu.points.size(); ++i)
        for (std::size_t j = 0; j < y.points.size(); ++j) {
            const double d = (yu.points[i] - y.points[j]).norm();
            if (d < best) {
                best = d;
                bi = static_cast<int>(i);
                bj = static_cast<int>(j);
            }
        }
    // Rotation aligning the Frenet triads at the closest pair;
    // trace((I-R)(I-R)ᵀ) = 6 - 2 tr(R).
    const Eigen::Matrix3d rot =
        y.frames[bj].basis() * yu.frames[bi].basis().transpose();
    const double fr = 6.0 - 2.0 * rot.trace();
    return {best, fr};
}

namespace {

double manifold_cost(const std::vector<CurveSegment>& component_manifold,
                     const std::vector<CurveSegment>& unknown_manifold,
                     bool include_frames) {
    if (component_manifold.empty() || unknown_manifold.empty())
        throw EmptyManifold("cost needs nonempty manifolds");
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& seg : component_manifold)
        for (const auto& useg : unknown_manifold) {
            const auto [delta, fr] = segment_distance(useg, seg);
            worst = std::max(worst, include_frames ? delta + fr : delta);
        }
    return worst;
}

}  // namespace

double component_cost(const std::vector<CurveSegment>& component_manifold,
                      const std::vector<CurveSegment>& unknown_manifold) {
    return manifold_cost(component_manifold, unknown_manifold, true);
}

RecognitionResult recognize(const std::vector<ClassModel>& models,
                            const PrimitiveObservation& obs, double delta,
                            CostMode mode) {
    auto tier = hypothesis_set(models, obs.features, delta);

    RecognitionResult result;
    if (mode == CostMode::likelihood_only) {
        const auto& h = tier.front();
        result.label = models[h.model].label;
        result.class_index = models[h.model].class_index;
        result.component = h.component;
        result.loglik = h.loglik;
        result.cost = 0.0;
        return result;
    }

    for (auto& h : tier)
        h.cost = manifold_cost(models[h.model].manifolds[h.component], obs.manifold,
                               mode == CostMode::full);
    const auto best = std::min_element(
        tier.begin(), tier.end(), [&](const Hypothesis& a, const Hypothesis& b) {
            if (a.cost != b.cost) return a.cost < b.cost;
            if (a.loglik != b.loglik) return a.loglik > b.loglik;
            return models[a.model].class_index < models[b.model].class_index;
        });
    result.label = models[best->model].label;
    result.class_index = models[best->model].class_index;
    result.component = best->component;
    result.loglik = best->loglik;
    result.cost = best->cost;
    return result;
}

}  // namespace mprim
