#include "parity/kci.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "parity/dist.hpp"
#include "parity/rng.hpp"

namespace parity {

void KciConfig::validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("KciConfig: lambda must be positive");
    if (mc_reps < 100) throw std::invalid_argument("KciConfig: mc_reps must be >= 100");
    if (!(eig_keep_ratio > 0.0 && eig_keep_ratio <= 1.0))
        throw std::invalid_argument("KciConfig: eig_keep_ratio must be in (0, 1]");
}

namespace {

void require_centered(const GramMatrix& g, const char* name) {
    if (!g.centered) throw std::invalid_argument(std::string("kci: ") + name + " is not centered");
}

// P = I - kz (kz + lambda M)^+, the operator that residualizes on z.
Eigen::MatrixXd residualizer(const GramMatrix& kz, double lambda) {
    const Eigen::Index n = kz.size();
    return Eigen::MatrixXd::Identity(n, n) - kz.entries * reg_pinv(kz, lambda);
}

}  // namespace

double kci_statistic_precombined(const GramMatrix& kxz, const GramMatrix& ka,
                                 const GramMatrix& kz, double lambda) {
    require_centered(kxz, "k_{x,z}");
    require_centered(ka, "k_a");
    require_centered(kz, "k_z");
    const Eigen::Index n = kxz.size();
    if (ka.size() != n || kz.size() != n) throw std::invalid_argument("kci: dimension mismatch");
    if (!(lambda > 0.0)) throw std::invalid_argument("kci: lambda must be positive");

    const Eigen::MatrixXd pinv = reg_pinv(kz, lambda);
    const Eigen::MatrixXd r = kz.entries * pinv;  // kz (kz + lambda M)^+
    const double t1 = (kxz.entries * ka.entries).trace();
    const double t2 = (kxz.entries * r * ka.entries).trace();
    const double t3 = (r.transpose() * kxz.entries * r * ka.entries).trace();
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    const double stat = (t1 - 2.0 * t2 + t3) / n2;
    return stat < 0.0 ? 0.0 : stat;
}

double kci_statistic(const GramMatrix& kx, const GramMatrix& ka, const GramMatrix& kz,
                     double lambda) {
    require_centered(kx, "k_x");
    const GramMatrix kxz = center(hadamard(kx, kz));
    return kci_statistic_precombined(kxz, ka, kz, lambda);
}

std::vector<double> null_mixture_weights(const GramMatrix& kxz, const GramMatrix& ka,
                                         const GramMatrix& kz, const KciConfig& cfg) {
    cfg.validate();
    require_centered(kxz, "k_{x,z}");
    require_centered(ka, "k_a");
    require_centered(kz, "k_z");
    const Eigen::Index n = kxz.size();
    if (ka.size() != n || kz.size() != n) throw std::invalid_argument("kci: dimension mismatch");

    const Eigen::MatrixXd p = residualizer(kz, cfg.lambda);
    Eigen::MatrixXd rx = p * kxz.entries * p.transpose();
    Eigen::MatrixXd rab = p * ka.entries * p.transpose();
    rx = 0.5 * (rx + rx.transpose()).eval();
    rab = 0.5 * (rab + rab.transpose()).eval();
    const Eigen::MatrixXd prod = rx.cwiseProduct(rab);
    const SymEig eig = sym_eig(prod);

    const double max_eig = eig.values.size() > 0 ? eig.values(0) : 0.0;
    std::vector<double> weights;
    if (max_eig <= 0.0) return weights;
    const double cutoff = cfg.eig_keep_ratio * max_eig;
    for (Eigen::Index i = 0; i < eig.values.size(); ++i)
        if (eig.values(i) >= cutoff) weights.push_back(eig.values(i) / static_cast<double>(n));
    return weights;
}

double kci_pvalue(double scaled_statistic, const std::vector<double>& weights,
                  const KciConfig& cfg) {
    cfg.validate();
    if (weights.empty()) return 1.0;
    double mean = 0.0, sumsq = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("kci_pvalue: negative mixture weight");
        mean += w;
        sumsq += w * w;
    }
    if (!(mean > 0.0)) return 1.0;
    if (scaled_statistic <= 0.0) return 1.0;

    if (cfg.null_method == NullMethod::gamma) {
        const double var = 2.0 * sumsq;
        return gamma_upper_tail(mean * mean / var, var / mean, scaled_statistic);
    }
    int exceed = 0;
    for (int r = 0; r < cfg.mc_reps; ++r) {
        Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(r));
        double draw = 0.0;
        for (double w : weights) {
            const double z = rng.normal();
            draw += w * z * z;
        }
        if (draw >= scaled_statistic) ++exceed;
    }
    return (1.0 + exceed) / (cfg.mc_reps + 1.0);
}

KciResult kci_test(const DataColumn& x, const DataColumn& a,
                   const std::optional<DataColumn>& z, const KciConfig& cfg) {
    cfg.validate();
    const std::size_t n = x.size();
    if (a.size() != n || (z && z->size() != n))
        throw std::invalid_argument("kci_test: column length mismatch");
    if (n < 10) throw std::invalid_argument("kci_test: need at least 10 observations");

    const GramMatrix kx = center(gram(x, default_kernel(x)));
    const GramMatrix ka = center(gram(a, default_kernel(a)));

    GramMatrix kz;
    kz.entries =
        Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    kz.centered = true;
    GramMatrix kxz = kx;
    if (z) {
        GramMatrix cz = center(gram(*z, default_kernel(*z)));
        // a constant z carries no information; run the unconditional variant
        if (cz.entries.cwiseAbs().maxCoeff() > 1e-12) {
            kxz = center(hadamard(kx, cz));
            kz = std::move(cz);
        }
    }

    KciResult res;
    res.n = n;
    res.method = cfg.null_method;
    res.statistic = kci_statistic_precombined(kxz, ka, kz, cfg.lambda);
    res.mixture_weights = null_mixture_weights(kxz, ka, kz, cfg);
    res.p_value = kci_pvalue(static_cast<double>(n) * res.statistic, res.mixture_weights, cfg);
    return res;
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw std::invalid_argument("total_variation: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(p[i] - q[i]);
    return 0.5 * acc;
}

EpsilonCpResult epsilon_cp_discrete(const DataColumn& x, const DataColumn& a,
                                    const DataColumn& z) {
    const std::size_t n = x.size();
    if (a.size() != n || z.size() != n)
        throw std::invalid_argument("epsilon_cp_discrete: column length mismatch");
    if (n == 0) throw std::invalid_argument("epsilon_cp_discrete: empty columns");

    const std::set<double> x_levels(x.values.begin(), x.values.end());
    const std::set<double> a_levels(a.values.begin(), a.values.end());
    const std::set<double> z_levels(z.values.begin(), z.values.end());
    const std::vector<double> xs(x_levels.begin(), x_levels.end());
    const std::vector<double> as(a_levels.begin(), a_levels.end());

    EpsilonCpResult res;
    bool any_included = false;
    for (double zv : z_levels) {
        // empirical pmf of x per a level within this stratum
        std::vector<std::vector<double>> pmf(as.size(), std::vector<double>(xs.size(), 0.0));
        std::vector<std::size_t> counts(as.size(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            if (z.values[i] != zv) continue;
            const auto ai = static_cast<std::size_t>(
                std::lower_bound(as.begin(), as.end(), a.values[i]) - as.begin());
            const auto xi = static_cast<std::size_t>(
                std::lower_bound(xs.begin(), xs.end(), x.values[i]) - xs.begin());
            pmf[ai][xi] += 1.0;
            ++counts[ai];
        }
        if (std::any_of(counts.begin(), counts.end(), [](std::size_t c) { return c == 0; })) {
            res.skipped_strata.push_back(zv);
            continue;
        }
        any_included = true;
        for (std::size_t ai = 0; ai < as.size(); ++ai)
            for (double& v : pmf[ai]) v /= static_cast<double>(counts[ai]);

        double worst = 0.0;
        for (std::size_t i = 0; i < as.size(); ++i) {
            for (std::size_t j = i + 1; j < as.size(); ++j) {
                const double tv = total_variation(pmf[i], pmf[j]);
                if (tv > worst) worst = tv;
                if (tv > res.epsilon_hat) {
                    res.epsilon_hat = tv;
                    res.worst_pair = {zv, as[i], as[j]};
                }
            }
        }
        res.per_stratum[zv] = worst;
    }
    if (!any_included)
        throw std::invalid_argument("epsilon_cp_discrete: every stratum has an empty (z, a) cell");
    return res;
}

}  // namespace parity
