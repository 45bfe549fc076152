// Command-line front end: discover, cluster, recognize, bench, track, behavior.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "mprim/behavior.hpp"
#include "mprim/classes.hpp"
#include "mprim/dpm.hpp"
#include "mprim/errors.hpp"
#include "mprim/features.hpp"
#include "mprim/flux.hpp"
#include "mprim/recognition.hpp"
#include "mprim/skeleton.hpp"
#include "mprim/synth.hpp"
#include "mprim/tracking.hpp"

namespace {

using namespace mprim;

SkeletonSequence load_normalized(const std::string& path, double target_rate) {
    SkeletonSequence seq = parse_sequence_file(path);
    if (target_rate > 0 && target_rate != seq.rate) seq = resample(seq, target_rate);
    return seq.position_only ? position_normalize(seq) : root_sequence_normalize(seq);
}

std::vector<MotionPrimitive> discover_group(const SkeletonSequence& seq, int group,
                                            FluxParams params) {
    params.g = direction_g(seq, group);
    const auto kin = make_group_kinematics(seq, group);
    return segment_sequence(kin, params, seq.id);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file " + path);
    return out;
}

int run_discover(const std::string& input, const std::string& output, int group,
                 double rate, const FluxParams& params) {
    const auto seq = load_normalized(input, rate);
    std::vector<PrimitiveRecord> rows;
    for (int g = 1; g <= kNumGroups; ++g) {
        if (group != 0 && group != g) continue;
        for (const auto& p : discover_group(seq, g, params))
            rows.push_back({seq.id, g, std::lround(p.t_start * seq.rate),
                            std::lround(p.t_end * seq.rate), p.label});
    }
    auto out = open_out(output);
    write_primitive_csv(rows, out);
    std::cerr << rows.size() << " primitives\n";
    return 0;
}

int run_cluster(const std::string& input, const std::string& output, int group,
                double rate, const FluxParams& params, const McmcOptions& mcmc,
                double alpha) {
    const auto seq = load_normalized(input, rate);
    const auto kin = make_group_kinematics(seq, group);
    auto prims = discover_group(seq, group, params);
    if (prims.empty()) throw EmptyData("no primitives discovered");

    // Group-level clustering looks at the outer joint only, one enumerated
    // trajectory per primitive.
    std::vector<std::vector<FeatureVector>> per_traj;
    for (auto& p : prims) {
        p = anatomical_normalize(p, kin);
        const auto dec = sample_and_decimate(p.trajectories[2], seq.rate);
        per_traj.push_back(
            extract_features(dec, static_cast<double>(per_traj.size())));
    }
    const FeatureSet fs = build_feature_set(std::move(per_traj), group);
    std::vector<Eigen::VectorXd> data;
    for (const auto& f : fs.features) data.emplace_back(f);
    auto prior = NormalWishartPrior::from_data(data);
    prior.psi *= kGroupPriorScale;
    const auto model = fit_dpm(data, prior, alpha, mcmc);
    auto out = open_out(output);
    serialize_dpm(model, out);
    std::cerr << "k=" << model.k() << " alpha=" << model.alpha << "\n";
    return 0;
}

// Closed-loop recognition: classes are built from the training sequence, then
// every primitive discovered in the query sequence is labeled.
int run_recognize(const std::string& train_path, const std::string& query_path,
                  int group, double rate, const FluxParams& params,
                  const McmcOptions& mcmc, double delta, const std::string& mode_name) {
    CostMode mode = CostMode::full;
    if (mode_name == "delta-only") mode = CostMode::delta_only;
    else if (mode_name == "likelihood-only") mode = CostMode::likelihood_only;
    else if (mode_name != "full") throw ConfigError("unknown cost mode " + mode_name);

    const auto train_seq = load_normalized(train_path, rate);
    const auto train_kin = make_group_kinematics(train_seq, group);
    auto train_prims = discover_group(train_seq, group, params);
    for (auto& p : train_prims) p = anatomical_normalize(p, train_kin);
    if (train_prims.empty()) throw EmptyData("no training primitives");

    std::vector<std::vector<FeatureVector>> per_traj;
    for (const auto& p : train_prims) {
        const auto dec = sample_and_decimate(p.trajectories[2], train_seq.rate);
        per_traj.push_back(
            extract_features(dec, static_cast<double>(per_traj.size())));
    }
    const FeatureSet fs = build_feature_set(std::move(per_traj), group);
    std::vector<Eigen::VectorXd> data;
    for (const auto& f : fs.features) data.emplace_back(f);
    auto prior = NormalWishartPrior::from_data(data);
    prior.psi *= kGroupPriorScale;
    const auto dpm = fit_dpm(data, prior, 1.0, mcmc);
    const auto classes = classes_from_components(
        dpm, fs, static_cast<int>(train_prims.size()), group);
    const auto models = fit_class_models(classes, train_prims, train_seq.rate, mcmc);

    const auto query_seq = load_normalized(query_path, rate);
    const auto query_kin = make_group_kinematics(query_seq, group);
    auto query_prims = discover_group(query_seq, group, params);
    for (auto& p : query_prims) {
        p = anatomical_normalize(p, query_kin);
        const auto obs = observe_primitive(p, query_seq.rate);
        const auto result = recognize(models, obs, delta, mode);
        std::cout << p.t_start << "," << p.t_end << ",class" << result.class_index
                  << "," << result.cost << "\n";
    }
    return 0;
}

int run_track(const std::string& input, const std::string& output, double r_max) {
    std::ifstream in(input);
    if (!in) throw ConfigError("cannot open " + input);
    nlohmann::json doc;
    in >> doc;
    const double rate = doc.at("rate").get<double>();
    const auto& spec = SkeletonSpec::canonical();

    std::vector<DetectionFrame> frames;
    for (const auto& jf : doc.at("frames")) {
        DetectionFrame df;
        for (const auto& js : jf.at("skeletons")) {
            SkeletonSequence::Frame frame;
            for (const auto& jj : js.at("joints")) {
                const int idx = spec.joint_index(jj.at("name").get<std::string>());
                if (idx < 0) throw MalformedInput("unknown joint name");
                const auto t = jj.at("t").get<std::vector<double>>();
                if (t.size() != 3) throw MalformedInput("translation needs 3 entries");
                frame.joints[idx].translation = Eigen::Vector3d(t[0], t[1], t[2]);
            }
            df.skeletons.push_back(frame);
        }
        frames.push_back(std::move(df));
    }

    TrackerOptions opts;
    opts.r_max = r_max;
    const auto tracks = track_sequence(frames, opts);
    nlohmann::json out_doc;
    out_doc["rate"] = rate;
    out_doc["tracks"] = nlohmann::json::array();
    for (const auto& t : tracks) {
        nlohmann::json jt;
        jt["id"] = t.id;
        jt["first_frame"] = t.first_frame;
        jt["detections"] = t.detections;
        out_doc["tracks"].push_back(jt);
    }
    auto out = open_out(output);
    out << out_doc.dump(2) << "\n";
    std::cerr << tracks.size() << " tracks\n";
    return 0;
}

int run_behavior_train(const std::string& input, const std::string& output,
                       const SvmOptions& opts) {
    std::ifstream in(input);
    if (!in) throw ConfigError("cannot open " + input);
    const auto samples = read_samples_csv(in);
    BehaviorModel model;
    model.svm = train_svm(samples, opts);
    std::vector<double> scores;
    std::vector<int> labels;
    for (const auto& s : samples) {
        scores.push_back(model.svm.decision(s.x));
        labels.push_back(s.y);
    }
    model.platt = platt_fit(scores, labels);
    auto out = open_out(output);
    serialize_behavior_model(model, out);
    std::cerr << model.svm.support_vectors.size() << " support vectors\n";
    return 0;
}

int run_behavior_eval(const std::string& input, const std::string& model_path,
                      const std::string& output) {
    std::ifstream in(input);
    if (!in) throw ConfigError("cannot open " + input);
    const auto samples = read_samples_csv(in);
    std::ifstream min(model_path);
    if (!min) throw ConfigError("cannot open " + model_path);
    const auto model = parse_behavior_model(min);

    std::vector<double> probs;
    std::vector<int> labels;
    for (const auto& s : samples) {
        probs.push_back(model.platt.probability(model.svm.decision(s.x)));
        labels.push_back(s.y);
    }
    const auto roc = roc_auc(probs, labels);
    nlohmann::json doc;
    doc["auc"] = roc.auc;
    doc["roc"] = nlohmann::json::array();
    for (const auto& p : roc.points)
        doc["roc"].push_back({{"fpr", p.fpr}, {"tpr", p.tpr}});
    auto out = open_out(output);
    out << doc.dump(2) << "\n";
    std::cout << "auc " << roc.auc << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Motion primitive discovery, recognition, and behavior analysis"};
    app.require_subcommand(1);

    FluxParams params;
    McmcOptions mcmc;
    double rate = 0.0;  // 0 = keep input rate
    int group = 0;
    std::string input, output = "out.csv";

    auto add_flux_flags = [&](CLI::App* cmd) {
        cmd->add_option("--beta-v", params.beta_v, "velocity penalty weight");
        cmd->add_option("--beta-s", params.beta_s, "length regularizer weight");
        cmd->add_option("--grid-step", params.grid_step, "search grid step (s)");
        cmd->add_option("--rate", rate, "resample rate (Hz, 0 keeps input)");
    };
    auto add_mcmc_flags = [&](CLI::App* cmd) {
        cmd->add_option("--iters", mcmc.iters, "MCMC iterations per chain");
        cmd->add_option("--burnin", mcmc.burnin, "burn-in iterations");
        cmd->add_option("--chains", mcmc.chains, "independent chains");
        cmd->add_option("--seed", mcmc.seed, "RNG seed");
    };

    auto* discover = app.add_subcommand("discover", "segment a sequence into primitives");
    discover->add_option("--input", input, "sequence file (json/csv)")->required();
    discover->add_option("--out", output, "primitive CSV output");
    discover->add_option("--group", group, "group 1-6, 0 = all");
    add_flux_flags(discover);

    double alpha = 1.0;
    auto* cluster = app.add_subcommand("cluster", "fit a mixture over primitive features");
    cluster->add_option("--input", input, "sequence file")->required();
    cluster->add_option("--out", output, "model JSON output");
    cluster->add_option("--group", group, "group 1-6")->required();
    cluster->add_option("--alpha", alpha, "concentration parameter");
    add_flux_flags(cluster);
    add_mcmc_flags(cluster);

    std::string query, mode_name = "full";
    double delta = std::log(10.0);
    auto* recog = app.add_subcommand("recognize", "label primitives of a query sequence");
    recog->add_option("--train", input, "training sequence")->required();
    recog->add_option("--query", query, "query sequence")->required();
    recog->add_option("--group", group, "group 1-6")->required();
    recog->add_option("--delta", delta, "hypothesis tier width (log-likelihood)");
    recog->add_option("--cost-mode", mode_name, "full | delta-only | likelihood-only");
    add_flux_flags(recog);
    add_mcmc_flags(recog);

    int bench_n = 100;
    std::uint64_t bench_seed = 0;
    auto* bench = app.add_subcommand("bench", "synthetic endpoint benchmark");
    bench->add_option("--n", bench_n, "number of sequences");
    bench->add_option("--seed", bench_seed, "RNG seed");
    bench->add_option("--out", output, "report JSON output");
    add_flux_flags(bench);

    double r_max = 0.5;
    auto* track = app.add_subcommand("track", "associate multi-subject detections");
    track->add_option("--input", input, "detections JSON")->required();
    track->add_option("--out", output, "tracks JSON output");
    track->add_option("--r-max", r_max, "association residual gate (m)");

    auto* behavior = app.add_subcommand("behavior", "dangerous-behavior classifier");
    behavior->require_subcommand(1);
    SvmOptions svm_opts;
    auto* btrain = behavior->add_subcommand("train", "train SVM + calibration");
    btrain->add_option("--input", input, "samples CSV")->required();
    btrain->add_option("--out", output, "model JSON output");
    btrain->add_option("--lambda", svm_opts.lambda, "box constraint");
    btrain->add_option("--eta-k", svm_opts.eta_k, "RBF kernel width");
    btrain->add_option("--seed", svm_opts.seed, "RNG seed");
    std::string model_path;
    auto* beval = behavior->add_subcommand("eval", "score samples and report ROC/AUC");
    beval->add_option("--input", input, "samples CSV")->required();
    beval->add_option("--model", model_path, "model JSON")->required();
    beval->add_option("--out", output, "ROC JSON output");

    CLI11_PARSE(app, argc, argv);

    try {
        params.validate();
        if (discover->parsed()) return run_discover(input, output, group, rate, params);
        if (cluster->parsed())
            return run_cluster(input, output, group, rate, params, mcmc, alpha);
        if (recog->parsed())
            return run_recognize(input, query, group, rate, params, mcmc, delta, mode_name);
        if (bench->parsed()) {
            const auto report = run_benchmark(bench_n, params, bench_seed);
            auto out = open_out(output);
            write_bench_report(report, out);
            std::cout << "mae " << report.metrics.mae << " rmse " << report.metrics.rmse
                      << " miss " << report.metrics.miss_rate << "\n";
            return 0;
        }
        if (track->parsed()) return run_track(input, output, r_max);
        if (btrain->parsed()) return run_behavior_train(input, output, svm_opts);
        if (beval->parsed()) return run_behavior_eval(input, model_path, output);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
