#include "mprim/classes.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <sstream>

#include "mprim/errors.hpp"

namespace mprim {

FeatureProvenance recover_provenance(const FeatureSet& fs, int n_trajectories) {
    FeatureProvenance prov;
    prov.trajectory_of.reserve(fs.features.size());
    prov.count_of.reserve(fs.features.size());
    for (const auto& f : fs.features) {
        const long nu = denormalize_indicator(f(kIndexIndicator), fs.index_bounds);
        const long count = denormalize_indicator(f(kCountIndicator), fs.count_bounds);
        if (nu < 0 || nu >= n_trajectories)
            throw InconsistentIndicators("recovered trajectory index out of range");
        prov.trajectory_of.push_back(static_cast<int>(nu));
        prov.count_of.push_back(static_cast<int>(count));
    }
    return prov;
}

std::vector<PrimitiveClass> classes_from_components(const DpmModel& model,
                                                    const FeatureSet& fs,
                                                    int n_primitives, int group) {
    if (n_primitives <= 0) throw EmptyData("no primitives");
    // One enumerated trajectory (the outer joint's) per primitive.
    const auto prov = recover_provenance(fs, n_primitives);

    std::vector<std::vector<int>> counts(n_primitives, std::vector<int>(model.k(), 0));
    std::vector<int> totals(n_primitives, 0);
    for (std::size_t i = 0; i < fs.features.size(); ++i) {
        const int prim = prov.trajectory_of[i];
        const int w = component_assign(model, fs.features[i]);
        ++counts[prim][w];
        ++totals[prim];
    }

    std::vector<PrimitiveClass> classes(model.k());
    for (int w = 0; w < model.k(); ++w) {
        classes[w].group = group;
        classes[w].component = w;
    }
    for (int p = 0; p < n_primitives; ++p) {
        if (totals[p] == 0) continue;
        int best_w = 0;
        for (int w = 1; w < model.k(); ++w)
            if (counts[p][w] > counts[p][best_w]) best_w = w;
        if (counts[p][best_w] >= 0.8 * totals[p])
            classes[best_w].members.push_back(p);
    }

    classes.erase(std::remove_if(classes.begin(), classes.end(),
                                 [](const PrimitiveClass& c) { return c.members.empty(); }),
                  classes.end());
    for (auto& cls : classes)
        cls.representative = class_representative(cls, model, fs, prov);
    return classes;
}

int class_representative(const PrimitiveClass& cls, const DpmModel& model,
                         const FeatureSet& fs, const FeatureProvenance& prov) {
    if (cls.members.empty()) throw EmptyClass("class has no members");
    const auto& comp = model.components.at(cls.component);

    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < cls.members.size(); ++m) {
        const int p = cls.members[m];
        double sum = 0.0;
        int count = 0;
        for (std::size_t i = 0; i < fs.features.size(); ++i) {
            if (prov.trajectory_of[i] != p) continue;
            if (component_assign(model, fs.features[i]) != cls.component) continue;
            sum += std::exp(gaussian_logdensity(fs.features[i], comp.mean, comp.cov));
            ++count;
        }
        const double score = count ? sum / count : -std::numeric_limits<double>::infinity();
        if (score > best_score + 1e-15) {
            best_score = score;
            best = static_cast<int>(m);
        }
    }
    return best;
}

double hausdorff(const std::vector<Eigen::Vector3d>& a,
                 const std::vector<Eigen::Vector3d>& b) {
    if (a.empty() || b.empty()) throw EmptyData("hausdorff needs nonempty sets");
    auto directed = [](const std::vector<Eigen::Vector3d>& from,
                       const std::vector<Eigen::Vector3d>& to) {
        double worst = 0.0;
        for (const auto& p : from) {
            double nearest = std::numeric_limits<double>::infinity();
            for (const auto& q : to) nearest = std::min(nearest, (p - q).norm());
            worst = std::max(worst, nearest);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

std::vector<LabelEntry> read_label_csv(std::istream& in) {
    std::vector<LabelEntry> out;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (first && line.rfind("group", 0) == 0) {
            first = false;
            continue;
        }
        first = false;
        std::istringstream row(line);
        std::string g, c, label;
        if (!std::getline(row, g, ',') || !std::getline(row, c, ',') ||
            !std::getline(row, label))
            throw MalformedInput("label row needs group,class_index,label");
        LabelEntry e;
        try {
            e.group = std::stoi(g);
            e.class_index = std::stoi(c);
        } catch (const std::exception&) {
            throw MalformedInput("non-numeric label row fields");
        }
        e.label = label;
        if (e.label.empty()) throw MalformedInput("empty label");
        out.push_back(std::move(e));
    }
    return out;
}

void apply_labels(std::vector<PrimitiveClass>& classes,
                  const std::vector<LabelEntry>& labels) {
    for (const auto& e : labels) {
        bool found = false;
        for (auto& cls : classes)
            if (cls.group == e.group && cls.component == e.class_index) {
                cls.label = e.label;
                found = true;
            }
        if (!found)
            throw UnknownClassRef("no class " + std::to_string(e.class_index) +
                                  " in group " + std::to_string(e.group));
    }
}

}  // namespace mprim
