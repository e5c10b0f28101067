#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "parity/kernels.hpp"

namespace parity {

enum class NullMethod { gamma, montecarlo };

struct KciConfig {
    double lambda = 1e-3;               // ridge on the z covariance operator
    NullMethod null_method = NullMethod::gamma;
    int mc_reps = 5000;
    double eig_keep_ratio = 1e-10;      // drop null eigenvalues below ratio * max
    std::uint64_t seed = 0;             // Monte Carlo stream seed

    void validate() const;
};

struct KciResult {
    double statistic = 0.0;             // squared HS norm of the conditional cross-covariance
    double p_value = 1.0;
    std::vector<double> mixture_weights;
    NullMethod method = NullMethod::gamma;
    std::size_t n = 0;
};

// Squared HS norm of the empirical conditional cross-covariance operator,
// from centered Gram matrices, via the three-trace formula. The joint (x,z)
// kernel matrix is the re-centered Hadamard product of kx and kz.
double kci_statistic(const GramMatrix& kx, const GramMatrix& ka, const GramMatrix& kz,
                     double lambda);

// Same statistic with the joint (x,z) matrix supplied directly; passing a zero
// kz yields the unconditional (HSIC) statistic.
double kci_statistic_precombined(const GramMatrix& kxz, const GramMatrix& ka,
                                 const GramMatrix& kz, double lambda);

// Chi-square-mixture weights for the null distribution of n * statistic:
// the spectrum of (P kxz P) .* (P ka P) / n with P = I - kz (kz + lambda M)^+,
// truncated at eig_keep_ratio * max.
std::vector<double> null_mixture_weights(const GramMatrix& kxz, const GramMatrix& ka,
                                         const GramMatrix& kz, const KciConfig& cfg);

// Upper-tail probability of the weighted chi-square mixture at the scaled
// statistic n * T. Empty weights give p = 1.
double kci_pvalue(double scaled_statistic, const std::vector<double>& weights,
                  const KciConfig& cfg);

// Full test; z absent runs the unconditional (demographic parity) variant.
KciResult kci_test(const DataColumn& x, const DataColumn& a,
                   const std::optional<DataColumn>& z, const KciConfig& cfg = {});

struct EpsilonCpResult {
    double epsilon_hat = 0.0;
    struct WorstPair {
        double z = 0.0;
        double a = 0.0;
        double a_prime = 0.0;
    } worst_pair;
    std::map<double, double> per_stratum;   // z value -> max pairwise TV
    std::vector<double> skipped_strata;     // z values with an empty (z, a) cell
};

// Finite-sample epsilon-conditional-parity: max over strata and pairs (a, a')
// of the total-variation distance between empirical pmfs of x.
EpsilonCpResult epsilon_cp_discrete(const DataColumn& x, const DataColumn& a,
                                    const DataColumn& z);

double total_variation(const std::vector<double>& p, const std::vector<double>& q);

}  // namespace parity
