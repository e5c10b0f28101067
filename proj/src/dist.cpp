#include "parity/dist.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/math/special_functions/gamma.hpp>

namespace parity {

double gamma_upper_tail(double shape, double scale, double x) {
    if (!(shape > 0.0) || !(scale > 0.0)) throw std::invalid_argument("gamma_upper_tail: bad parameters");
    if (x <= 0.0) return 1.0;
    return boost::math::gamma_q(shape, x / scale);
}

double chi_squared_tail(double df, double x) { return gamma_upper_tail(df / 2.0, 2.0, x); }

double normal_cdf(double t) { return 0.5 * std::erfc(-t / 1.4142135623730950488); }

double ks_distance_uniform(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("ks_distance_uniform: empty sample");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max(d, std::max(values[i] - lo, hi - values[i]));
    }
    return d;
}

double ks_two_sample_statistic(std::vector<double> xs, std::vector<double> ys) {
    if (xs.empty() || ys.empty()) throw std::invalid_argument("ks_two_sample_statistic: empty sample");
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    const double nx = static_cast<double>(xs.size());
    const double ny = static_cast<double>(ys.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < xs.size() && j < ys.size()) {
        const double t = std::min(xs[i], ys[j]);
        while (i < xs.size() && xs[i] <= t) ++i;
        while (j < ys.size() && ys[j] <= t) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
    }
    return d;
}

double ks_asymptotic_pvalue(double statistic, std::size_t n, std::size_t m) {
    const double ne = static_cast<double>(n) * static_cast<double>(m) /
                      (static_cast<double>(n) + static_cast<double>(m));
    const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * statistic;
    if (lambda < 1e-8) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += sign * term;
        if (term < 1e-12) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

QuadratureRule gauss_hermite(int order) {
    if (order < 1) throw std::invalid_argument("gauss_hermite: order must be >= 1");
    // Golub-Welsch on the Hermite Jacobi matrix
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
    for (int i = 1; i < order; ++i) {
        const double b = std::sqrt(i / 2.0);
        jacobi(i, i - 1) = b;
        jacobi(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
    constexpr double sqrt_pi = 1.7724538509055160273;
    QuadratureRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    for (int i = 0; i < order; ++i) {
        rule.nodes[i] = eig.eigenvalues()(i);
        const double v0 = eig.eigenvectors()(0, i);
        rule.weights[i] = sqrt_pi * v0 * v0;
    }
    return rule;
}

}  // namespace parity
