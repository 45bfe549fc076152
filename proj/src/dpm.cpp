#include "mprim/dpm.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <thread>

#include <json.hpp>

#include "mprim/errors.hpp"

namespace mprim {

using nlohmann::json;

void NormalWishartPrior::validate(int dim) const {
    if (mu0.size() != dim) throw InvalidPrior("mu0 dimension mismatch");
    if (kappa0 <= 0) throw InvalidPrior("kappa0 must be positive");
    if (nu0 <= dim - 1) throw InvalidPrior("nu0 must exceed d-1");
    if (psi.rows() != dim || psi.cols() != dim) throw InvalidPrior("psi dimension mismatch");
    Eigen::LLT<Eigen::MatrixXd> llt(psi);
    if (llt.info() != Eigen::Success) throw InvalidPrior("psi must be SPD");
}

NormalWishartPrior NormalWishartPrior::from_data(const std::vector<Eigen::VectorXd>& data) {
    if (data.empty()) throw EmptyData("no data for prior");
    const int d = static_cast<int>(data.front().size());
    NormalWishartPrior prior;
    prior.mu0 = Eigen::VectorXd::Zero(d);
    for (const auto& x : data) prior.mu0 += x;
    prior.mu0 /= static_cast<double>(data.size());
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
    for (const auto& x : data) {
        const Eigen::VectorXd c = x - prior.mu0;
        cov += c * c.transpose();
    }
    cov /= std::max<double>(1.0, static_cast<double>(data.size()) - 1.0);
    // Regularize so degenerate directions keep psi SPD.
    const double ridge = std::max(1e-8, 1e-6 * cov.trace() / d);
    prior.psi = cov + ridge * Eigen::MatrixXd::Identity(d, d);
    prior.kappa0 = 0.01;
    prior.nu0 = d + 2;
    return prior;
}

double gaussian_logdensity(const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                           const Eigen::MatrixXd& cov) {
    const int d = static_cast<int>(x.size());
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) throw NonFiniteData("covariance not SPD");
    const Eigen::VectorXd z = llt.matrixL().solve(x - mu);
    double logdet = 0.0;
    for (int i = 0; i < d; ++i) logdet += std::log(llt.matrixL()(i, i));
    return -0.5 * d * std::log(2.0 * M_PI) - logdet - 0.5 * z.squaredNorm();
}

namespace {

double log_multigamma(double a, int d) {
    double out = 0.25 * d * (d - 1) * std::log(M_PI);
    for (int i = 0; i < d; ++i) out += std::lgamma(a - 0.5 * i);
    return out;
}

/// Sufficient statistics and cached Normal-Wishart posterior of one cluster.
class Cluster {
public:
    Cluster(const NormalWishartPrior& prior, int dim)
        : prior_(&prior), d_(dim), sum_(Eigen::VectorXd::Zero(dim)),
          scatter_(Eigen::MatrixXd::Zero(dim, dim)) {}

    int size() const { return n_; }

    void add(const Eigen::VectorXd& x) {
        ++n_;
        sum_ += x;
        scatter_ += x * x.transpose();
        dirty_ = true;
    }
    void remove(const Eigen::VectorXd& x) {
        --n_;
        sum_ -= x;
        scatter_ -= x * x.transpose();
        dirty_ = true;
    }

    double kappa_n() const { return prior_->kappa0 + n_; }
    double nu_n() const { return prior_->nu0 + n_; }
    Eigen::VectorXd mu_n() const {
        return (prior_->kappa0 * prior_->mu0 + sum_) / kappa_n();
    }
    Eigen::MatrixXd psi_n() const {
        const Eigen::VectorXd mun = mu_n();
        // Psi + Σxxᵀ + κ0 μ0μ0ᵀ − κ_n μ_n μ_nᵀ  (the standard update, rearranged)
        return prior_->psi + scatter_ +
               prior_->kappa0 * prior_->mu0 * prior_->mu0.transpose() -
               kappa_n() * mun * mun.transpose();
    }

    /// Posterior-predictive (multivariate t) log density of x.
    double predictive_logdensity(const Eigen::VectorXd& x) const {
        refresh();
        const double dof = nu_n() - d_ + 1;
        const double scale = (kappa_n() + 1.0) / (kappa_n() * dof);
        const Eigen::VectorXd z = chol_.matrixL().solve(x - mu_cache_);
        const double maha = z.squaredNorm() / scale;
        return std::lgamma(0.5 * (dof + d_)) - std::lgamma(0.5 * dof) -
               0.5 * d_ * std::log(dof * M_PI) -
               0.5 * (logdet_cache_ + d_ * std::log(scale)) -
               0.5 * (dof + d_) * std::log1p(maha / dof);
    }

    /// log marginal likelihood of the cluster's members.
    double log_marginal() const {
        refresh();
        const double nu0 = prior_->nu0;
        Eigen::LLT<Eigen::MatrixXd> llt0(prior_->psi);
        double logdet0 = 0.0;
        for (int i = 0; i < d_; ++i) logdet0 += 2.0 * std::log(llt0.matrixL()(i, i));
        return -0.5 * n_ * d_ * std::log(M_PI) +
               log_multigamma(0.5 * nu_n(), d_) - log_multigamma(0.5 * nu0, d_) +
               0.5 * nu0 * logdet0 - 0.5 * nu_n() * logdet_cache_ +
               0.5 * d_ * (std::log(prior_->kappa0) - std::log(kappa_n()));
    }

    /// Posterior point estimates for the emitted component.
    Eigen::VectorXd mean_estimate() const { return mu_n(); }
    Eigen::MatrixXd cov_estimate() const {
        const double denom = nu_n() - d_ - 1;
        return psi_n() / (denom > 0 ? denom : 1.0);
    }

private:
    void refresh() const {
        if (!dirty_) return;
        mu_cache_ = mu_n();
        const Eigen::MatrixXd psi = psi_n();
        chol_.compute(psi);
        if (chol_.info() != Eigen::Success) {
            // Fall back to a jittered factorization.
            chol_.compute(psi + 1e-10 * psi.trace() * Eigen::MatrixXd::Identity(d_, d_));
        }
        logdet_cache_ = 0.0;
        for (int i = 0; i < d_; ++i)
            logdet_cache_ += 2.0 * std::log(chol_.matrixL()(i, i));
        dirty_ = false;
    }

    const NormalWishartPrior* prior_;
    int d_;
    int n_ = 0;
    Eigen::VectorXd sum_;
    Eigen::MatrixXd scatter_;
    mutable bool dirty_ = true;
    mutable Eigen::VectorXd mu_cache_;
    mutable Eigen::LLT<Eigen::MatrixXd> chol_;
    mutable double logdet_cache_ = 0.0;
};

int sample_categorical(const std::vector<double>& logp, std::mt19937_64& rng) {
    const double mx = *std::max_element(logp.begin(), logp.end());
    std::vector<double> w(logp.size());
    double total = 0.0;
    for (std::size_t i = 0; i < logp.size(); ++i) total += (w[i] = std::exp(logp[i] - mx));
    std::uniform_real_distribution<double> unif(0.0, total);
    double u = unif(rng);
    for (std::size_t i = 0; i < w.size(); ++i) {
        u -= w[i];
        if (u <= 0) return static_cast<int>(i);
    }
    return static_cast<int>(w.size()) - 1;
}

/// One MCMC chain over partitions: collapsed Gibbs sweeps with a split-merge
/// proposal per sweep.
class ChainSampler {
public:
    ChainSampler(const std::vector<Eigen::VectorXd>& data,
                 const NormalWishartPrior& prior, double alpha,
                 const McmcOptions& opts, std::uint64_t seed)
        : data_(data), prior_(prior), alpha_(alpha), opts_(opts), rng_(seed),
          d_(static_cast<int>(data.front().size())),
          n_(static_cast<int>(data.size())), assignment_(data.size(), -1),
          empty_(prior, d_) {}

    void run() {
        init_crp();
        best_logpost_ = log_posterior();
        best_assignment_ = assignment_;
        for (int iter = 0; iter < opts_.iters; ++iter) {
            gibbs_sweep();
            split_merge_step();
            if (opts_.sample_alpha) update_alpha();
            const double lp = log_posterior();
            if (lp > best_logpost_) {
                best_logpost_ = lp;
                best_assignment_ = assignment_;
            }
            if (iter >= opts_.burnin) {
                k_samples_.push_back(static_cast<int>(clusters_.size()));
                alpha_samples_.push_back(alpha_);
            }
        }
    }

    double best_logpost() const { return best_logpost_; }
    const std::vector<int>& best_assignment() const { return best_assignment_; }
    const std::vector<int>& k_samples() const { return k_samples_; }
    const std::vector<double>& alpha_samples() const { return alpha_samples_; }

private:
    void init_crp() {
        for (int i = 0; i < n_; ++i) assign_sampled(i);
    }

    void assign_sampled(int i) {
        std::vector<double> logp;
        std::vector<int> ids;
        for (auto& [id, c] : clusters_) {
            logp.push_back(std::log(static_cast<double>(c.size())) +
                           c.predictive_logdensity(data_[i]));
            ids.push_back(id);
        }
        logp.push_back(std::log(alpha_) + empty_.predictive_logdensity(data_[i]));
        ids.push_back(-1);
        const int pick = ids[sample_categorical(logp, rng_)];
        place(i, pick);
    }

    void place(int i, int cluster_id) {
        if (cluster_id < 0) {
            cluster_id = next_id_++;
            clusters_.emplace(cluster_id, Cluster(prior_, d_));
        }
        clusters_.at(cluster_id).add(data_[i]);
        assignment_[i] = cluster_id;
    }

    void unplace(int i) {
        const int id = assignment_[i];
        auto& c = clusters_.at(id);
        c.remove(data_[i]);
        if (c.size() == 0) clusters_.erase(id);
        assignment_[i] = -1;
    }

    void gibbs_sweep() {
        for (int i = 0; i < n_; ++i) {
            unplace(i);
            assign_sampled(i);
        }
    }

    // Jain-Neal split-merge with a sequentially refined launch state.
    void split_merge_step() {
        if (n_ < 2) return;
        std::uniform_int_distribution<int> pick(0, n_ - 1);
        const int i = pick(rng_);
        int j = pick(rng_);
        while (j == i) j = pick(rng_);
        if (assignment_[i] == assignment_[j])
            propose_split(i, j);
        else
            propose_merge(i, j);
    }

    std::vector<int> cluster_members(int id) const {
        std::vector<int> out;
        for (int i = 0; i < n_; ++i)
            if (assignment_[i] == id) out.push_back(i);
        return out;
    }

    // Restricted Gibbs over `others` between two scratch clusters; returns the
    // log proposal probability of the final allocation.
    double restricted_scans(Cluster& ca, Cluster& cb, std::vector<int>& in_a,
                            const std::vector<int>& others, int scans,
                            bool force_current = false,
                            const std::vector<int>* current = nullptr) {
        double logq = 0.0;
        for (int s = 0; s < scans; ++s) {
            logq = 0.0;
            for (std::size_t m = 0; m < others.size(); ++m) {
                const int idx = others[m];
                auto& from = in_a[m] ? ca : cb;
                from.remove(data_[idx]);
                const double la = std::log(static_cast<double>(ca.size()) + 1e-12) +
                                  ca.predictive_logdensity(data_[idx]);
                const double lb = std::log(static_cast<double>(cb.size()) + 1e-12) +
                                  cb.predictive_logdensity(data_[idx]);
                const double mx = std::max(la, lb);
                const double pa = std::exp(la - mx) / (std::exp(la - mx) + std::exp(lb - mx));
                bool to_a;
                if (force_current && s == scans - 1) {
                    to_a = (*current)[m] != 0;
                } else {
                    std::uniform_real_distribution<double> unif(0.0, 1.0);
                    to_a = unif(rng_) < pa;
                }
                logq += std::log(std::max(to_a ? pa : 1.0 - pa, 1e-300));
                (to_a ? ca : cb).add(data_[idx]);
                in_a[m] = to_a ? 1 : 0;
            }
        }
        return logq;
    }

    void propose_split(int i, int j) {
        const int id = assignment_[i];
        auto members = cluster_members(id);
        std::vector<int> others;
        for (int m : members)
            if (m != i && m != j) others.push_back(m);

        Cluster ca(prior_, d_), cb(prior_, d_);
        ca.add(data_[i]);
        cb.add(data_[j]);
        std::vector<int> in_a(others.size());
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (auto& flag : in_a) flag = unif(rng_) < 0.5 ? 1 : 0;
        for (std::size_t m = 0; m < others.size(); ++m)
            (in_a[m] ? ca : cb).add(data_[others[m]]);
        const double logq = restricted_scans(ca, cb, in_a, others,
                                             opts_.restricted_scans + 1);

        const auto& merged = clusters_.at(id);
        const double log_accept =
            std::log(alpha_) + std::lgamma(ca.size()) + std::lgamma(cb.size()) -
            std::lgamma(merged.size()) + ca.log_marginal() + cb.log_marginal() -
            merged.log_marginal() - logq;
        if (std::log(unif(rng_)) < log_accept) {
            const int id_a = next_id_++, id_b = next_id_++;
            clusters_.erase(id);
            clusters_.emplace(id_a, Cluster(prior_, d_));
            clusters_.emplace(id_b, Cluster(prior_, d_));
            auto set = [&](int idx, int cid) {
                clusters_.at(cid).add(data_[idx]);
                assignment_[idx] = cid;
            };
            set(i, id_a);
            set(j, id_b);
            for (std::size_t m = 0; m < others.size(); ++m)
                set(others[m], in_a[m] ? id_a : id_b);
        }
    }

    void propose_merge(int i, int j) {
        const int id_i = assignment_[i], id_j = assignment_[j];
        const auto mi = cluster_members(id_i), mj = cluster_members(id_j);
        std::vector<int> others;
        std::vector<int> current;
        for (int m : mi)
            if (m != i) { others.push_back(m); current.push_back(1); }
        for (int m : mj)
            if (m != j) { others.push_back(m); current.push_back(0); }

        // Ghost split from the launch state ending at the current allocation
        // gives the reverse-move proposal probability.
        Cluster ca(prior_, d_), cb(prior_, d_);
        ca.add(data_[i]);
        cb.add(data_[j]);
        std::vector<int> in_a(others.size());
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (auto& flag : in_a) flag = unif(rng_) < 0.5 ? 1 : 0;
        for (std::size_t m = 0; m < others.size(); ++m)
            (in_a[m] ? ca : cb).add(data_[others[m]]);
        const double logq = restricted_scans(ca, cb, in_a, others,
                                             opts_.restricted_scans + 1, true, &current);

        Cluster merged(prior_, d_);
        for (int m : mi) merged.add(data_[m]);
        for (int m : mj) merged.add(data_[m]);
        const auto& ci = clusters_.at(id_i);
        const auto& cj = clusters_.at(id_j);
        const double log_accept =
            -std::log(alpha_) + std::lgamma(merged.size()) - std::lgamma(ci.size()) -
            std::lgamma(cj.size()) + merged.log_marginal() - ci.log_marginal() -
            cj.log_marginal() + logq;
        if (std::log(unif(rng_)) < log_accept) {
            const int id_new = next_id_++;
            clusters_.erase(id_i);
            clusters_.erase(id_j);
            clusters_.emplace(id_new, Cluster(prior_, d_));
            for (int m : mi) { clusters_.at(id_new).add(data_[m]); assignment_[m] = id_new; }
            for (int m : mj) { clusters_.at(id_new).add(data_[m]); assignment_[m] = id_new; }
        }
    }

    void update_alpha() {
        const int k = static_cast<int>(clusters_.size());
        std::gamma_distribution<double> g1(alpha_ + 1.0, 1.0), g2(static_cast<double>(n_), 1.0);
        const double x = g1(rng_), y = g2(rng_);
        const double eta = x / (x + y);
        const double a = opts_.alpha_prior_a, b = opts_.alpha_prior_b;
        const double rate = b - std::log(eta);
        const double odds = (a + k - 1) / (n_ * rate);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        const double shape = unif(rng_) < odds / (1.0 + odds) ? a + k : a + k - 1;
        std::gamma_distribution<double> gpost(shape, 1.0 / rate);
        alpha_ = std::max(gpost(rng_), 1e-6);
    }

    double log_posterior() {
        double lp = std::lgamma(alpha_) - std::lgamma(alpha_ + n_);
        for (const auto& [id, c] : clusters_)
            lp += std::log(alpha_) + std::lgamma(c.size()) + c.log_marginal();
        return lp;
    }

    const std::vector<Eigen::VectorXd>& data_;
    const NormalWishartPrior& prior_;
    double alpha_;
    McmcOptions opts_;
    std::mt19937_64 rng_;
    int d_, n_;
    std::vector<int> assignment_;
    std::map<int, Cluster> clusters_;
    Cluster empty_;
    int next_id_ = 0;
    double best_logpost_ = -std::numeric_limits<double>::infinity();
    std::vector<int> best_assignment_;
    std::vector<int> k_samples_;
    std::vector<double> alpha_samples_;
};

double kde_mode(const std::vector<double>& samples) {
    if (samples.empty()) return 0.0;
    if (samples.size() == 1) return samples.front();
    double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / samples.size();
    double var = 0.0;
    for (double s : samples) var += (s - mean) * (s - mean);
    var /= samples.size();
    const double sd = std::sqrt(std::max(var, 1e-12));
    const double h = 1.06 * sd * std::pow(static_cast<double>(samples.size()), -0.2);
    double best_x = samples.front(), best_d = -1.0;
    const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
    for (int i = 0; i <= 200; ++i) {
        const double x = *lo + (*hi - *lo) * i / 200.0;
        double dens = 0.0;
        for (double s : samples) {
            const double z = (x - s) / h;
            dens += std::exp(-0.5 * z * z);
        }
        if (dens > best_d) { best_d = dens; best_x = x; }
    }
    return best_x;
}

}  // namespace

DpmModel fit_dpm(const std::vector<Eigen::VectorXd>& data,
                 const NormalWishartPrior& prior, double alpha,
                 const McmcOptions& mcmc) {
    if (data.empty()) throw EmptyData("fit_dpm needs data");
    const int d = static_cast<int>(data.front().size());
    for (const auto& x : data)
        if (x.size() != d || !x.allFinite()) throw NonFiniteData("bad datum");
    prior.validate(d);
    if (alpha <= 0) throw InvalidPrior("alpha must be positive");

    std::vector<std::unique_ptr<ChainSampler>> chains;
    for (int c = 0; c < mcmc.chains; ++c)
        chains.push_back(std::make_unique<ChainSampler>(data, prior, alpha, mcmc,
                                                        mcmc.seed * 0x9e3779b97f4a7c15ULL + c + 1));
    const char* threads_env = std::getenv("MPRIM_THREADS");
    if (threads_env && std::atoi(threads_env) <= 1) {
        for (auto& chain : chains) chain->run();
    } else {
        std::vector<std::thread> pool;
        for (auto& chain : chains)
            pool.emplace_back([&chain] { chain->run(); });
        for (auto& t : pool) t.join();
    }

    const ChainSampler* best = chains.front().get();
    for (const auto& chain : chains)
        if (chain->best_logpost() > best->best_logpost()) best = chain.get();

    // Final concentration: posterior mode over the pooled per-sweep samples.
    double final_alpha = alpha;
    if (mcmc.sample_alpha) {
        std::vector<double> pooled;
        for (const auto& chain : chains)
            pooled.insert(pooled.end(), chain->alpha_samples().begin(),
                          chain->alpha_samples().end());
        if (!pooled.empty()) final_alpha = kde_mode(pooled);
    }

    // Rebuild cluster stats from the winning assignment.
    std::map<int, Cluster> clusters;
    std::map<int, std::vector<int>> members;
    const auto& assign = best->best_assignment();
    for (std::size_t i = 0; i < data.size(); ++i) {
        const int id = assign[i];
        if (!clusters.count(id)) clusters.emplace(id, Cluster(prior, d));
        clusters.at(id).add(data[i]);
        members[id].push_back(static_cast<int>(i));
    }

    const int n = static_cast<int>(data.size());
    const int min_size = std::max(5, (n + 99) / 100);
    DpmModel model;
    model.alpha = final_alpha;
    model.prior = prior;

    std::vector<int> kept, dropped;
    for (const auto& [id, c] : clusters)
        (c.size() >= min_size ? kept : dropped).push_back(id);
    if (kept.empty()) {
        // Keep the largest cluster so k >= 1.
        int largest = dropped.front();
        for (int id : dropped)
            if (clusters.at(id).size() > clusters.at(largest).size()) largest = id;
        kept.push_back(largest);
        dropped.erase(std::find(dropped.begin(), dropped.end(), largest));
    }

    for (int id : kept) {
        DpmComponent comp;
        comp.mean = clusters.at(id).mean_estimate();
        comp.cov = clusters.at(id).cov_estimate();
        comp.members = members[id];
        model.components.push_back(std::move(comp));
    }
    // Reassign pruned members to the best surviving component by predictive
    // density, then set exact count-based weights.
    for (int id : dropped)
        for (int i : members[id]) {
            int best_w = 0;
            double best_lp = -std::numeric_limits<double>::infinity();
            for (std::size_t w = 0; w < model.components.size(); ++w) {
                const double lp = gaussian_logdensity(data[i], model.components[w].mean,
                                                      model.components[w].cov);
                if (lp > best_lp) { best_lp = lp; best_w = static_cast<int>(w); }
            }
            model.components[best_w].members.push_back(i);
        }
    for (auto& comp : model.components) {
        std::sort(comp.members.begin(), comp.members.end());
        comp.weight = static_cast<double>(comp.members.size()) / n;
    }
    return model;
}

AlphaPosterior estimate_alpha(const std::vector<int>& k_samples, int n, double a,
                              double b, std::uint64_t seed) {
    if (n < 1) throw InvalidPrior("n must be >= 1");
    if (a <= 0 || b <= 0) throw InvalidPrior("gamma prior parameters must be positive");
    std::mt19937_64 rng(seed);
    AlphaPosterior out;
    double alpha = a / b;
    for (int k : k_samples) {
        std::gamma_distribution<double> g1(alpha + 1.0, 1.0), g2(static_cast<double>(n), 1.0);
        const double x = g1(rng), y = g2(rng);
        const double eta = x / (x + y);
        const double rate = b - std::log(eta);
        const double odds = (a + k - 1) / (n * rate);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        const double shape = unif(rng) < odds / (1.0 + odds) ? a + k : a + k - 1;
        std::gamma_distribution<double> gpost(std::max(shape, 1e-3), 1.0 / rate);
        alpha = std::max(gpost(rng), 1e-9);
        out.samples.push_back(alpha);
    }
    out.map = kde_mode(out.samples);
    return out;
}

double predictive_logdensity(const DpmModel& model, const Eigen::VectorXd& x) {
    if (x.size() != model.dim()) throw DimensionMismatch("x dimension mismatch");
    std::vector<double> terms;
    for (const auto& comp : model.components)
        terms.push_back(std::log(comp.weight) + gaussian_logdensity(x, comp.mean, comp.cov));
    const double mx = *std::max_element(terms.begin(), terms.end());
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - mx);
    return mx + std::log(sum);
}

int component_assign(const DpmModel& model, const Eigen::VectorXd& x) {
    if (x.size() != model.dim()) throw DimensionMismatch("x dimension mismatch");
    int best = 0;
    double best_lp = -std::numeric_limits<double>::infinity();
    for (int w = 0; w < model.k(); ++w) {
        const auto& comp = model.components[w];
        const double lp = std::log(comp.weight) + gaussian_logdensity(x, comp.mean, comp.cov);
        if (lp > best_lp + 1e-15) { best_lp = lp; best = w; }
    }
    return best;
}

void serialize_dpm(const DpmModel& model, std::ostream& out) {
    json doc;
    doc["alpha"] = model.alpha;
    doc["components"] = json::array();
    for (const auto& comp : model.components) {
        json jc;
        jc["weight"] = comp.weight;
        jc["mean"] = std::vector<double>(comp.mean.data(), comp.mean.data() + comp.mean.size());
        std::vector<std::vector<double>> cov(comp.cov.rows(),
                                             std::vector<double>(comp.cov.cols()));
        for (int r = 0; r < comp.cov.rows(); ++r)
            for (int c = 0; c < comp.cov.cols(); ++c) cov[r][c] = comp.cov(r, c);
        jc["cov"] = cov;
        doc["components"].push_back(jc);
    }
    out << doc.dump(2) << "\n";
}

DpmModel parse_dpm(std::istream& in) {
    json doc;
    in >> doc;
    DpmModel model;
    model.alpha = doc.at("alpha").get<double>();
    for (const auto& jc : doc.at("components")) {
        DpmComponent comp;
        comp.weight = jc.at("weight").get<double>();
        const auto mean = jc.at("mean").get<std::vector<double>>();
        comp.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), mean.size());
        const auto cov = jc.at("cov").get<std::vector<std::vector<double>>>();
        comp.cov.resize(cov.size(), cov.size());
        for (std::size_t r = 0; r < cov.size(); ++r)
            for (std::size_t c = 0; c < cov[r].size(); ++c) comp.cov(r, c) = cov[r][c];
        model.components.push_back(std::move(comp));
    }
    return model;
}

}  // namespace mprim
