#include "mprim/behavior.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mprim/errors.hpp"

namespace mprim {

using nlohmann::json;

PrimitiveEmbedding PrimitiveEmbedding::build(const std::vector<std::string>& vocabulary,
                                             std::uint64_t seed) {
    if (vocabulary.empty()) throw EmptyData("empty vocabulary");
    std::vector<std::string> sorted(vocabulary.begin(), vocabulary.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    PrimitiveEmbedding emb;
    std::set<double> taken;
    for (const auto& label : sorted) {
        double v = unif(rng);
        while (v <= 0.0 || v >= 1.0 || taken.count(v)) v = unif(rng);
        taken.insert(v);
        emb.map_[label] = v;
    }
    return emb;
}

PrimitiveEmbedding PrimitiveEmbedding::from_map(std::map<std::string, double> m) {
    std::set<double> seen;
    for (const auto& [label, v] : m) {
        if (v <= 0.0 || v >= 1.0 || !seen.insert(v).second)
            throw MalformedInput("embedding values must be distinct and in (0,1)");
    }
    PrimitiveEmbedding emb;
    emb.map_ = std::move(m);
    return emb;
}

double PrimitiveEmbedding::at(const std::string& label) const {
    const auto it = map_.find(label);
    if (it == map_.end()) throw UnknownClassRef("label not in embedding: " + label);
    return it->second;
}

std::vector<BehaviorSample> frames_to_samples(const std::vector<PrimitiveTimeline>& timelines,
                                              const PrimitiveEmbedding& embedding,
                                              int label) {
    std::vector<BehaviorSample> out;
    for (const auto& tl : timelines) {
        for (std::size_t f = 0; f < tl.frames.size(); ++f) {
            if (f > 0 && tl.frames[f] == tl.frames[f - 1]) continue;
            BehaviorSample s;
            for (int g = 0; g < 6; ++g) s.x(g) = embedding.at(tl.frames[f][g]);
            s.y = label;
            s.frame = static_cast<long>(f);
            s.subject = tl.subject;
            out.push_back(s);
        }
    }
    return out;
}

namespace {

double rbf(const BehaviorFeature& u, const BehaviorFeature& v, double eta_k) {
    return std::exp(-eta_k * (u - v).squaredNorm());
}

}  // namespace

double SvmModel::decision(const BehaviorFeature& x) const {
    double f = bias;
    for (std::size_t i = 0; i < support_vectors.size(); ++i)
        f += coefficients[i] * rbf(support_vectors[i], x, eta_k);
    return f;
}

SvmModel train_svm(const std::vector<BehaviorSample>& samples, const SvmOptions& opts) {
    const int n = static_cast<int>(samples.size());
    if (n < 2) throw EmptyData("need at least two samples");
    bool has_pos = false, has_neg = false;
    for (const auto& s : samples) {
        if (s.y == 1) has_pos = true;
        else if (s.y == -1) has_neg = true;
        else throw MalformedInput("labels must be +1/-1");
        if (!s.x.allFinite()) throw NonFiniteData("non-finite sample");
    }
    if (!has_pos || !has_neg) throw SingleClassData("both classes required");

    const double C = opts.lambda;
    Eigen::MatrixXd K(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            K(i, j) = K(j, i) = rbf(samples[i].x, samples[j].x, opts.eta_k);

    std::vector<double> alpha(n, 0.0);
    double b = 0.0;
    std::mt19937_64 rng(opts.seed);

    auto decision_i = [&](int i) {
        double f = b;
        for (int j = 0; j < n; ++j)
            if (alpha[j] > 0) f += alpha[j] * samples[j].y * K(i, j);
        return f;
    };

    // Sequential minimal optimization with random second-index selection.
    bool converged = false;
    for (int pass = 0; pass < opts.max_passes && !converged; ++pass) {
        int changed = 0;
        for (int i = 0; i < n; ++i) {
            const double yi = samples[i].y;
            const double ei = decision_i(i) - yi;
            if (!((yi * ei < -opts.tol && alpha[i] < C) ||
                  (yi * ei > opts.tol && alpha[i] > 0)))
                continue;
            std::uniform_int_distribution<int> pick(0, n - 2);
            int j = pick(rng);
            if (j >= i) ++j;
            const double yj = samples[j].y;
            const double ej = decision_i(j) - yj;

            const double ai_old = alpha[i], aj_old = alpha[j];
            double lo, hi;
            if (yi != yj) {
                lo = std::max(0.0, aj_old - ai_old);
                hi = std::min(C, C + aj_old - ai_old);
            } else {
                lo = std::max(0.0, ai_old + aj_old - C);
                hi = std::min(C, ai_old + aj_old);
            }
            if (hi - lo < 1e-12) continue;
            const double eta = 2.0 * K(i, j) - K(i, i) - K(j, j);
            if (eta >= 0) continue;
            double aj = aj_old - yj * (ei - ej) / eta;
            aj = std::clamp(aj, lo, hi);
            if (std::abs(aj - aj_old) < 1e-7) continue;
            const double ai = ai_old + yi * yj * (aj_old - aj);
            alpha[i] = ai;
            alpha[j] = aj;

            const double b1 = b - ei - yi * (ai - ai_old) * K(i, i) -
                              yj * (aj - aj_old) * K(i, j);
            const double b2 = b - ej - yi * (ai - ai_old) * K(i, j) -
                              yj * (aj - aj_old) * K(j, j);
            if (ai > 0 && ai < C) b = b1;
            else if (aj > 0 && aj < C) b = b2;
            else b = 0.5 * (b1 + b2);
            ++changed;
        }
        converged = changed == 0;
    }
    if (!converged) throw NonConvergence("SMO did not converge");

    SvmModel model;
    model.eta_k = opts.eta_k;
    model.lambda = opts.lambda;
    model.bias = b;
    for (int i = 0; i < n; ++i)
        if (alpha[i] > 1e-12) {
            model.support_vectors.push_back(samples[i].x);
            model.coefficients.push_back(alpha[i] * samples[i].y);
        }
    return model;
}

double PlattCalibrator::probability(double score) const {
    const double z = a * score + b;
    // Numerically safe logistic.
    return z >= 0 ? std::exp(-z) / (1.0 + std::exp(-z)) : 1.0 / (1.0 + std::exp(z));
}

PlattCalibrator platt_fit(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size() || scores.empty())
        throw DimensionMismatch("scores/labels size mismatch");
    int n_pos = 0, n_neg = 0;
    for (int y : labels) (y == 1 ? n_pos : n_neg)++;
    if (n_pos == 0 || n_neg == 0) throw SingleClassData("both classes required");
    for (double s : scores)
        if (!std::isfinite(s)) throw DegenerateScores("non-finite score");
    if (std::equal(scores.begin() + 1, scores.end(), scores.begin()))
        throw DegenerateScores("all scores identical");

    const double t_pos = (n_pos + 1.0) / (n_pos + 2.0);
    const double t_neg = 1.0 / (n_neg + 2.0);
    const int n = static_cast<int>(scores.size());

    auto nll = [&](double a, double b) {
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            const double t = labels[i] == 1 ? t_pos : t_neg;
            const double z = a * scores[i] + b;
            // -t log p - (1-t) log(1-p) with p = 1/(1+e^z), stabilized.
            sum += (z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z))) -
                   (1.0 - t) * z;
        }
        return sum;
    };

    double a = 0.0, b = std::log((n_neg + 1.0) / (n_pos + 1.0));
    double current = nll(a, b);
    for (int iter = 0; iter < 100; ++iter) {
        double ga = 0.0, gb = 0.0, haa = 1e-12, hab = 0.0, hbb = 1e-12;
        for (int i = 0; i < n; ++i) {
            const double t = labels[i] == 1 ? t_pos : t_neg;
            const double z = a * scores[i] + b;
            const double p = z >= 0 ? std::exp(-z) / (1.0 + std::exp(-z))
                                    : 1.0 / (1.0 + std::exp(z));
            const double d = t - p;                    // dNLL/dz
            const double w = std::max(p * (1.0 - p), 1e-12);
            ga += d * scores[i];
            gb += d;
            haa += w * scores[i] * scores[i];
            hab += w * scores[i];
            hbb += w;
        }
        if (std::sqrt(ga * ga + gb * gb) < 1e-10) break;
        const double det = haa * hbb - hab * hab;
        double da = -(hbb * ga - hab * gb) / det;
        double db = -(haa * gb - hab * ga) / det;
        // Backtracking keeps the NLL non-increasing.
        double step = 1.0;
        while (step > 1e-10 && nll(a + step * da, b + step * db) > current)
            step *= 0.5;
        if (step <= 1e-10) break;
        a += step * da;
        b += step * db;
        current = nll(a, b);
    }
    return {a, b};
}

double danger_probability(const std::vector<double>& subject_scores,
                          const PlattCalibrator& calibrator) {
    if (subject_scores.empty()) throw EmptyData("no subject scores");
    for (double s : subject_scores)
        if (!std::isfinite(s)) throw DegenerateScores("non-finite score");
    // Weights come from the calibrated probabilities, shifted so the least
    // dangerous subject drops out; uniform when all subjects tie.
    std::vector<double> p(subject_scores.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        p[i] = calibrator.probability(subject_scores[i]);
    const double lo = *std::min_element(p.begin(), p.end());
    double total = 0.0;
    for (double v : p) total += v - lo;

    double prob = 0.0;
    for (double v : p) {
        const double w = total > 0 ? (v - lo) / total : 1.0 / p.size();
        prob += w * v;
    }
    return prob;
}

RocCurve roc_auc(const std::vector<double>& probabilities, const std::vector<int>& labels) {
    if (probabilities.size() != labels.size() || probabilities.empty())
        throw DimensionMismatch("probabilities/labels size mismatch");
    int n_pos = 0, n_neg = 0;
    for (int y : labels) (y == 1 ? n_pos : n_neg)++;
    if (n_pos == 0 || n_neg == 0) throw SingleClassData("both classes required");
    for (double p : probabilities)
        if (!std::isfinite(p)) throw DegenerateScores("non-finite probability");

    std::vector<double> thresholds(probabilities);
    std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    RocCurve curve;
    curve.points.push_back({0.0, 0.0});
    for (double thr : thresholds) {
        int tp = 0, fp = 0;
        for (std::size_t i = 0; i < probabilities.size(); ++i) {
            if (probabilities[i] < thr) continue;
            (labels[i] == 1 ? tp : fp)++;
        }
        curve.points.push_back({static_cast<double>(fp) / n_neg,
                                static_cast<double>(tp) / n_pos});
    }
    if (curve.points.back().fpr != 1.0 || curve.points.back().tpr != 1.0)
        curve.points.push_back({1.0, 1.0});

    for (std::size_t i = 1; i < curve.points.size(); ++i)
        curve.auc += 0.5 * (curve.points[i].fpr - curve.points[i - 1].fpr) *
                     (curve.points[i].tpr + curve.points[i - 1].tpr);
    return curve;
}

void serialize_behavior_model(const BehaviorModel& model, std::ostream& out) {
    json doc;
    doc["svm"]["eta_k"] = model.svm.eta_k;
    doc["svm"]["lambda"] = model.svm.lambda;
    doc["svm"]["bias"] = model.svm.bias;
    doc["svm"]["coefficients"] = model.svm.coefficients;
    doc["svm"]["support_vectors"] = json::array();
    for (const auto& sv : model.svm.support_vectors)
        doc["svm"]["support_vectors"].push_back(
            std::vector<double>(sv.data(), sv.data() + 6));
    doc["platt"]["a"] = model.platt.a;
    doc["platt"]["b"] = model.platt.b;
    doc["embedding"] = model.embedding.map();
    out << doc.dump(2) << "\n";
}

BehaviorModel parse_behavior_model(std::istream& in) {
    json doc;
    in >> doc;
    BehaviorModel model;
    model.svm.eta_k = doc.at("svm").at("eta_k").get<double>();
    model.svm.lambda = doc.at("svm").at("lambda").get<double>();
    model.svm.bias = doc.at("svm").at("bias").get<double>();
    model.svm.coefficients = doc.at("svm").at("coefficients").get<std::vector<double>>();
    for (const auto& jv : doc.at("svm").at("support_vectors")) {
        const auto v = jv.get<std::vector<double>>();
        if (v.size() != 6) throw MalformedInput("support vector must have 6 entries");
        BehaviorFeature f;
        for (int i = 0; i < 6; ++i) f(i) = v[i];
        model.svm.support_vectors.push_back(f);
    }
    model.platt.a = doc.at("platt").at("a").get<double>();
    model.platt.b = doc.at("platt").at("b").get<double>();
    model.embedding = PrimitiveEmbedding::from_map(
        doc.at("embedding").get<std::map<std::string, double>>());
    return model;
}

void write_samples_csv(const std::vector<BehaviorSample>& samples, std::ostream& out) {
    out << "subject,frame,g1,g2,g3,g4,g5,g6,label\n";
    out.precision(17);  // round-trips doubles exactly
    for (const auto& s : samples) {
        out << s.subject << ',' << s.frame;
        for (int g = 0; g < 6; ++g) out << ',' << s.x(g);
        out << ',' << s.y << '\n';
    }
}

std::vector<BehaviorSample> read_samples_csv(std::istream& in) {
    std::vector<BehaviorSample> out;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first && line.rfind("subject", 0) == 0) {
            first = false;
            continue;
        }
        first = false;
        std::istringstream row(line);
        std::vector<std::string> cells;
        std::string cell;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        if (cells.size() != 9) throw MalformedInput("sample row needs 9 fields");
        try {
            BehaviorSample s;
            s.subject = std::stoi(cells[0]);
            s.frame = std::stol(cells[1]);
            for (int g = 0; g < 6; ++g) s.x(g) = std::stod(cells[2 + g]);
            s.y = std::stoi(cells[8]);
            out.push_back(s);
        } catch (const Error&) {
            throw;
        } catch (const std::exception&) {
            throw MalformedInput("non-numeric sample row");
        }
    }
    return out;
}

}  // namespace mprim
