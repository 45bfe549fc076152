#ifndef MPRIM_DPM_HPP
#define MPRIM_DPM_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

namespace mprim {

/// Conjugate Normal-Wishart base distribution for a Gaussian DPM.
struct NormalWishartPrior {
    Eigen::VectorXd mu0;
    double kappa0 = 0.01;
    double nu0 = 0.0;       // must exceed d-1
    Eigen::MatrixXd psi;    // symmetric positive definite scale

    void validate(int dim) const;

    /// Weakly informative default: mu0 = data mean, nu0 = d+2,
    /// psi = empirical covariance (regularized to SPD).
    static NormalWishartPrior from_data(const std::vector<Eigen::VectorXd>& data);
};

struct DpmComponent {
    double weight = 0.0;
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    std::vector<int> members;  // indices into the training data
};

struct DpmModel {
    std::vector<DpmComponent> components;
    double alpha = 1.0;
    NormalWishartPrior prior;

    int k() const { return static_cast<int>(components.size()); }
    int dim() const { return components.empty() ? 0 : static_cast<int>(components.front().mean.size()); }
};

struct McmcOptions {
    int iters = 2000;
    int burnin = 500;
    int chains = 4;
    std::uint64_t seed = 0;
    int restricted_scans = 5;  // intermediate scans per split-merge proposal
    bool sample_alpha = true;  // interleave West alpha updates
    double alpha_prior_a = 1.0;
    double alpha_prior_b = 1.0;
};

/// Fit by restricted-Gibbs split-merge sampling with conjugate marginal
/// likelihoods; returns the maximum-posterior partition visited across
/// chains, pruned of components smaller than max(5, 1% n).
DpmModel fit_dpm(const std::vector<Eigen::VectorXd>& data,
                 const NormalWishartPrior& prior, double alpha,
                 const McmcOptions& mcmc);

struct AlphaPosterior {
    std::vector<double> samples;
    double map = 0.0;
};

/// Concentration posterior sampling via the auxiliary-variable two-gamma
/// mixture scheme: eta ~ Beta(alpha+1, n), then alpha from
/// pi*Gamma(a+k, b-log eta) + (1-pi)*Gamma(a+k-1, b-log eta) with odds
/// pi/(1-pi) = (a+k-1)/(n(b-log eta)).
AlphaPosterior estimate_alpha(const std::vector<int>& k_samples, int n,
                              double a, double b, std::uint64_t seed);

/// log Σ_w π_w N(x|μ_w,Σ_w) via max-shifted log-sum-exp.
double predictive_logdensity(const DpmModel& model, const Eigen::VectorXd& x);

/// argmax_w π_w N(x|μ_w,Σ_w); ties broken by lowest index.
int component_assign(const DpmModel& model, const Eigen::VectorXd& x);

/// log N(x|mu,cov) for a single Gaussian.
double gaussian_logdensity(const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                           const Eigen::MatrixXd& cov);

void serialize_dpm(const DpmModel& model, std::ostream& out);
DpmModel parse_dpm(std::istream& in);

}  // namespace mprim

#endif
