#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace parity {

// Upper tail P(G >= x) of Gamma(shape, scale).
double gamma_upper_tail(double shape, double scale, double x);

// Upper tail of a chi-square with df degrees of freedom.
double chi_squared_tail(double df, double x);

double normal_cdf(double t);

// One-sample Kolmogorov-Smirnov distance of `values` to Uniform[0,1].
double ks_distance_uniform(std::vector<double> values);

// Two-sample KS statistic and its asymptotic p-value.
double ks_two_sample_statistic(std::vector<double> xs, std::vector<double> ys);
double ks_asymptotic_pvalue(double statistic, std::size_t n, std::size_t m);

// Gauss-Hermite rule for weight exp(-t^2): E[f(Z)] ~ sum_i w_i f(sqrt(2) t_i) / sqrt(pi)
// for Z ~ N(0,1). Nodes ascending.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
QuadratureRule gauss_hermite(int order);

// E[f(mu + sigma Z)] for Z ~ N(0,1) under a Gauss-Hermite rule.
template <typename F>
double gauss_expectation(const QuadratureRule& rule, double mu, double sigma, F&& f) {
    constexpr double inv_sqrt_pi = 0.5641895835477562869;
    constexpr double sqrt2 = 1.4142135623730950488;
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * f(mu + sigma * sqrt2 * rule.nodes[i]);
    return acc * inv_sqrt_pi;
}

}  // namespace parity
