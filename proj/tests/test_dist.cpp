#include <doctest.h>

#include <cmath>

#include "parity/dist.hpp"
#include "parity/rng.hpp"

using namespace parity;

TEST_CASE("gamma and chi-square tails") {
    // Gamma(1/2, 2) is chi-square with 1 df
    CHECK(gamma_upper_tail(0.5, 2.0, 3.841458820694124) == doctest::Approx(0.05).epsilon(1e-6));
    CHECK(chi_squared_tail(2.0, 5.991464547107979) == doctest::Approx(0.05).epsilon(1e-6));
    CHECK(chi_squared_tail(2.0, 1.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-10));
    CHECK(gamma_upper_tail(1.0, 1.0, 0.0) == 1.0);
}

TEST_CASE("normal cdf") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-9));
    CHECK(normal_cdf(-5.0) < 1e-6);
}

TEST_CASE("ks statistics") {
    CHECK(ks_distance_uniform({0.5}) == doctest::Approx(0.5));
    // perfectly spread points sit at distance 1/(2n)
    CHECK(ks_distance_uniform({0.125, 0.375, 0.625, 0.875}) == doctest::Approx(0.125));

    std::vector<double> xs, ys;
    Rng rng(5);
    for (int i = 0; i < 2000; ++i) {
        xs.push_back(rng.normal());
        ys.push_back(rng.normal());
    }
    const double d = ks_two_sample_statistic(xs, ys);
    CHECK(ks_asymptotic_pvalue(d, xs.size(), ys.size()) > 0.001);
    // a clear shift is detected
    for (auto& v : ys) v += 1.0;
    const double d2 = ks_two_sample_statistic(xs, ys);
    CHECK(ks_asymptotic_pvalue(d2, xs.size(), ys.size()) < 1e-6);
}

TEST_CASE("gauss-hermite moments") {
    const QuadratureRule rule = gauss_hermite(32);
    const double m2 = gauss_expectation(rule, 0.0, 1.0, [](double z) { return z * z; });
    const double m4 = gauss_expectation(rule, 0.0, 1.0, [](double z) { return z * z * z * z; });
    CHECK(m2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m4 == doctest::Approx(3.0).epsilon(1e-12));
    // shifted/scaled: E[(mu + sigma Z)^2] = mu^2 + sigma^2
    const double ms = gauss_expectation(rule, 2.0, 3.0, [](double z) { return z * z; });
    CHECK(ms == doctest::Approx(13.0).epsilon(1e-12));
}

TEST_CASE("rng streams are order independent") {
    Rng a = Rng::stream(42, 7);
    const double first = a.normal();
    Rng b = Rng::stream(42, 8);
    (void)b.normal();
    Rng a2 = Rng::stream(42, 7);
    CHECK(a2.normal() == first);
    // distinct streams differ
    Rng c = Rng::stream(42, 9);
    CHECK(c.normal() != first);
}

TEST_CASE("rng normal moments") {
    Rng rng(99);
    double sum = 0.0, sumsq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sumsq += z * z;
    }
    CHECK(std::abs(sum / n) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(sumsq / n == doctest::Approx(1.0).epsilon(0.02));
}
