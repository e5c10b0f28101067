#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "parity/dist.hpp"
#include "parity/rng.hpp"
#include "parity/simplex.hpp"

namespace parity {

// Empirical conditional score pmfs f_{ya} = L(s | a, y) on a shared bin grid.
struct ConditionalPmfSet {
    std::array<std::array<Eigen::VectorXd, 2>, 2> f;  // f[y][a]
    Eigen::VectorXd bin_edges;                        // k + 1 edges

    int num_bins() const { return static_cast<int>(f[0][0].size()); }
};

// Cost of moving input bin i to output bin j: c_i |j - target(i)|^alpha
// (1-based bin indices). Empty fields fall back to c_i = 1 and
// target(i) = ceil(i k1 / k).
struct CostSpec {
    Eigen::VectorXd c;
    double alpha = 1.0;
    std::vector<int> target_map;

    Eigen::VectorXd weights(int k) const;
    std::vector<int> targets(int k, int k1) const;
};

struct MarkovKernelPair {
    Eigen::MatrixXd k0;  // k x k1, row-stochastic
    Eigen::MatrixXd k1;
    double parity_residual = 0.0;  // max over y of || f_{y1} K1 - f_{y0} K0 ||_1
    double objective = 0.0;
};

// s | y,a ~ N(mu_a + A_a y, Sigma_a)
struct GaussianScoreModel {
    Eigen::VectorXd mu0, mu1;
    Eigen::MatrixXd a0, a1;          // n_s x n_y, full column rank
    Eigen::MatrixXd sigma0, sigma1;  // PSD
};

// Minimal-noise randomizer equating L(s' + noise | y, a) across groups:
// group 0 scores map through a1 a0^+ (s - mu0), group 1 through s - mu1,
// then N(0, T_a) noise is added, where T0 - T1 splits the eigenvalues of
// Sigma1' - Sigma0' by sign.
struct GaussianRandomizer {
    Eigen::MatrixXd pre_scale0;
    Eigen::VectorXd pre_shift0, pre_shift1;
    Eigen::MatrixXd t0, t1;
    Eigen::MatrixXd noise_factor0, noise_factor1;  // T_a = F F^T

    Eigen::VectorXd transform(int a, const Eigen::VectorXd& s) const;
    Eigen::VectorXd draw(int a, const Eigen::VectorXd& s, Rng& rng) const;
};

// Latent-ability score model: z|a ~ N(mu_z a, tau_z^2), s|a,z ~ N(z + mu_s a,
// sigma_s^2), y ~ Bernoulli(p(z)) with logistic p.
struct SatModelParams {
    double mu_z = 0.5;
    double tau_z = 1.0;
    double mu_s = 0.5;
    double sigma_s = 1.0;
    double p_loc = 0.5;
    double p_scale = 2.0;

    void validate() const;
    double outcome_prob(double z) const;      // p(z)
    double posterior_mean(int a, double s) const;
    double posterior_var() const;
};

struct SatSample {
    int a = 0;
    double z = 0.0;
    double s = 0.0;
    int y = 0;
};

ConditionalPmfSet estimate_conditional_pmfs(const std::vector<double>& s,
                                            const std::vector<int>& a,
                                            const std::vector<int>& y, int k);

// Bin index on the pmf grid (interior edges decide; outer bins are unbounded).
int bin_of(double s, const Eigen::VectorXd& edges);

LpProblem build_eo_lp(const ConditionalPmfSet& pmfs, int k1, const CostSpec& cost);

// Variant with K0 frozen to the identity (only group 1 is randomized); the
// parity system alone decides feasibility.
LpProblem build_one_sided_eo_lp(const ConditionalPmfSet& pmfs, const CostSpec& cost);

MarkovKernelPair solve_eo_kernels(const ConditionalPmfSet& pmfs, int k1, const CostSpec& cost);

// Output distribution over the k1 bins given y (equal across groups up to the
// parity residual).
Eigen::VectorXd kernel_output_law(const ConditionalPmfSet& pmfs, const MarkovKernelPair& pair,
                                  int y);

Eigen::Index apply_kernel(const Eigen::MatrixXd& kernel, Eigen::Index input_bin, Rng& rng);

double brier_score(const std::vector<double>& probs, const std::vector<int>& outcomes);

std::vector<SatSample> simulate_sat_model(const SatModelParams& params, std::size_t n,
                                          std::uint64_t seed);

// Exact P(y = 1 | a, s) under the model, by quadrature over the latent z.
double sat_bayes_probability(const SatModelParams& params, int a, double s,
                             const QuadratureRule& rule);

// Model-exact P(y = 1 | a, s in bin) for every (group, bin) cell.
Eigen::MatrixXd sat_binned_bayes_table(const SatModelParams& params,
                                       const Eigen::VectorXd& edges,
                                       const QuadratureRule& rule);

enum class SatDecision { bayes = 0, binned_bayes = 1, randomized = 2 };

struct SatEvaluation {
    ConditionalPmfSet pmfs;
    MarkovKernelPair kernels;
    std::vector<int> input_bin;
    std::vector<double> bayes_prob;
    std::vector<double> binned_bayes_prob;
    std::vector<int> randomized_bin;
    std::vector<double> randomized_prob;
    double brier[3][2] = {};  // [decision][group]
};

// Full decision comparison on simulated data: exact Bayes forecast, Bayes on
// the binned score, and the group-blind forecast attached to the LP-randomized
// output bin.
SatEvaluation evaluate_sat_decisions(const SatModelParams& params,
                                     const std::vector<SatSample>& samples, int k, int k1,
                                     const CostSpec& cost, std::uint64_t seed);

GaussianRandomizer gaussian_randomizer(const GaussianScoreModel& model);

// One draw of s | y, a from the model.
Eigen::VectorXd draw_score(const GaussianScoreModel& model, int a, const Eigen::VectorXd& y,
                           Rng& rng);

}  // namespace parity
