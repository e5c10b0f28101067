#include "parity/randomization.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "parity/kernels.hpp"

namespace parity {

namespace {

// eigen-based square-root factor of a PSD matrix (tolerates zero eigenvalues)
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& m) {
    const SymEig eig = sym_eig(m);
    const double floor = 1e-14 * std::max(1.0, std::abs(eig.values(0)));
    Eigen::MatrixXd f = eig.vectors;
    for (Eigen::Index i = 0; i < eig.values.size(); ++i)
        f.col(i) *= std::sqrt(std::max(eig.values(i), 0.0) > floor ? eig.values(i) : 0.0);
    return f;
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double cutoff = std::max(m.rows(), m.cols()) *
                          std::numeric_limits<double>::epsilon() * sv(0);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

void require_full_column_rank(const Eigen::MatrixXd& m, const char* name) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double cutoff = std::max(m.rows(), m.cols()) *
                          std::numeric_limits<double>::epsilon() * sv(0);
    if (m.rows() < m.cols() || sv(sv.size() - 1) <= cutoff)
        throw std::invalid_argument(std::string("gaussian_randomizer: ") + name +
                                    " is rank deficient");
}

double interpolated_quantile(const std::vector<double>& sorted, double q) {
    const auto n = sorted.size();
    const double pos = q * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= n) return sorted.back();
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

}  // namespace

Eigen::VectorXd CostSpec::weights(int k) const {
    if (c.size() == 0) return Eigen::VectorXd::Ones(k);
    if (c.size() != k) throw std::invalid_argument("CostSpec: weight length mismatch");
    if ((c.array() < 0.0).any()) throw std::invalid_argument("CostSpec: negative weights");
    return c;
}

std::vector<int> CostSpec::targets(int k, int k1) const {
    if (!target_map.empty()) {
        if (static_cast<int>(target_map.size()) != k)
            throw std::invalid_argument("CostSpec: target map length mismatch");
        for (int t : target_map)
            if (t < 1 || t > k1) throw std::invalid_argument("CostSpec: target out of range");
        return target_map;
    }
    std::vector<int> t(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
        t[static_cast<std::size_t>(i)] =
            static_cast<int>(std::ceil(static_cast<double>((i + 1) * k1) / k));
    return t;
}

void SatModelParams::validate() const {
    if (!(tau_z > 0.0) || !(sigma_s > 0.0))
        throw std::invalid_argument("SatModelParams: tau_z and sigma_s must be positive");
    if (!(p_scale > 0.0)) throw std::invalid_argument("SatModelParams: p_scale must be positive");
}

double SatModelParams::outcome_prob(double z) const {
    return 1.0 / (1.0 + std::exp(-p_scale * (z - p_loc)));
}

double SatModelParams::posterior_mean(int a, double s) const {
    const double s2 = sigma_s * sigma_s;
    const double t2 = tau_z * tau_z;
    return (s2 * a * mu_z + t2 * (s - a * mu_s)) / (s2 + t2);
}

double SatModelParams::posterior_var() const {
    const double s2 = sigma_s * sigma_s;
    const double t2 = tau_z * tau_z;
    return s2 * t2 / (s2 + t2);
}

ConditionalPmfSet estimate_conditional_pmfs(const std::vector<double>& s,
                                            const std::vector<int>& a,
                                            const std::vector<int>& y, int k) {
    const std::size_t n = s.size();
    if (a.size() != n || y.size() != n)
        throw std::invalid_argument("estimate_conditional_pmfs: length mismatch");
    if (n == 0) throw std::invalid_argument("estimate_conditional_pmfs: no samples");
    if (k < 2) throw std::invalid_argument("estimate_conditional_pmfs: need k >= 2 bins");
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] != 0 && a[i] != 1)
            throw std::invalid_argument("estimate_conditional_pmfs: a must be 0/1");
        if (y[i] != 0 && y[i] != 1)
            throw std::invalid_argument("estimate_conditional_pmfs: y must be 0/1");
    }

    std::vector<double> sorted(s);
    std::sort(sorted.begin(), sorted.end());
    ConditionalPmfSet out;
    out.bin_edges.resize(k + 1);
    for (int e = 0; e <= k; ++e)
        out.bin_edges(e) = interpolated_quantile(sorted, static_cast<double>(e) / k);

    std::array<std::array<Eigen::VectorXd, 2>, 2> hist;
    std::array<std::array<double, 2>, 2> counts{};
    for (auto& row : hist)
        for (auto& v : row) v = Eigen::VectorXd::Zero(k);
    for (std::size_t i = 0; i < n; ++i) {
        const int b = bin_of(s[i], out.bin_edges);
        hist[static_cast<std::size_t>(y[i])][static_cast<std::size_t>(a[i])](b) += 1.0;
        counts[static_cast<std::size_t>(y[i])][static_cast<std::size_t>(a[i])] += 1.0;
    }
    for (int yy = 0; yy < 2; ++yy) {
        for (int aa = 0; aa < 2; ++aa) {
            if (counts[yy][aa] == 0.0)
                throw std::invalid_argument("estimate_conditional_pmfs: empty (y, a) cell");
            out.f[yy][aa] = hist[yy][aa] / counts[yy][aa];
        }
    }
    return out;
}

int bin_of(double s, const Eigen::VectorXd& edges) {
    const int k = static_cast<int>(edges.size()) - 1;
    int b = 0;
    for (int e = 1; e < k; ++e)
        if (s >= edges(e)) b = e;  // interior edge e starts bin e; ties go up
    return b;
}

LpProblem build_eo_lp(const ConditionalPmfSet& pmfs, int k1, const CostSpec& cost) {
    const int k = pmfs.num_bins();
    if (k1 < 2) throw std::invalid_argument("build_eo_lp: need k1 >= 2");
    const int n = 2 * k * k1;
    const auto vid = [&](int m, int i, int j) { return m * k * k1 + i * k1 + j; };

    LpProblem lp;
    // 2(k1 - 1) parity rows (last column dropped per y, redundant with the row
    // sums) plus 2k row-sum rows
    const int n_eq = 2 * (k1 - 1) + 2 * k;
    lp.a_eq = Eigen::MatrixXd::Zero(n_eq, n);
    lp.b_eq = Eigen::VectorXd::Zero(n_eq);
    int row = 0;
    for (int y = 0; y < 2; ++y) {
        for (int j = 0; j + 1 < k1; ++j, ++row) {
            for (int i = 0; i < k; ++i) {
                lp.a_eq(row, vid(1, i, j)) += pmfs.f[y][1](i);
                lp.a_eq(row, vid(0, i, j)) -= pmfs.f[y][0](i);
            }
        }
    }
    for (int m = 0; m < 2; ++m) {
        for (int i = 0; i < k; ++i, ++row) {
            for (int j = 0; j < k1; ++j) lp.a_eq(row, vid(m, i, j)) = 1.0;
            lp.b_eq(row) = 1.0;
        }
    }

    // monotone row means: sum_j j K_m(i,j) <= sum_j j K_m(i+1,j)
    const int n_ub = 2 * (k - 1);
    lp.a_ub = Eigen::MatrixXd::Zero(n_ub, n);
    lp.b_ub = Eigen::VectorXd::Zero(n_ub);
    row = 0;
    for (int m = 0; m < 2; ++m) {
        for (int i = 0; i + 1 < k; ++i, ++row) {
            for (int j = 0; j < k1; ++j) {
                lp.a_ub(row, vid(m, i, j)) += static_cast<double>(j + 1);
                lp.a_ub(row, vid(m, i + 1, j)) -= static_cast<double>(j + 1);
            }
        }
    }

    const Eigen::VectorXd w = cost.weights(k);
    const std::vector<int> target = cost.targets(k, k1);
    lp.c = Eigen::VectorXd::Zero(n);
    for (int m = 0; m < 2; ++m)
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k1; ++j)
                lp.c(vid(m, i, j)) =
                    w(i) * std::pow(std::abs(j + 1 - target[static_cast<std::size_t>(i)]),
                                    cost.alpha);
    return lp;
}

LpProblem build_one_sided_eo_lp(const ConditionalPmfSet& pmfs, const CostSpec& cost) {
    const int k = pmfs.num_bins();
    const int n = k * k;
    const auto vid = [&](int i, int j) { return i * k + j; };

    LpProblem lp;
    lp.a_eq = Eigen::MatrixXd::Zero(2 * k + k, n);
    lp.b_eq = Eigen::VectorXd::Zero(2 * k + k);
    int row = 0;
    for (int y = 0; y < 2; ++y) {
        for (int j = 0; j < k; ++j, ++row) {
            for (int i = 0; i < k; ++i) lp.a_eq(row, vid(i, j)) = pmfs.f[y][1](i);
            lp.b_eq(row) = pmfs.f[y][0](j);
        }
    }
    for (int i = 0; i < k; ++i, ++row) {
        for (int j = 0; j < k; ++j) lp.a_eq(row, vid(i, j)) = 1.0;
        lp.b_eq(row) = 1.0;
    }

    const Eigen::VectorXd w = cost.weights(k);
    const std::vector<int> target = cost.targets(k, k);
    lp.c = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            lp.c(vid(i, j)) = w(i) * std::pow(
                std::abs(j + 1 - target[static_cast<std::size_t>(i)]), cost.alpha);
    return lp;
}

MarkovKernelPair solve_eo_kernels(const ConditionalPmfSet& pmfs, int k1, const CostSpec& cost) {
    const int k = pmfs.num_bins();
    const LpProblem lp = build_eo_lp(pmfs, k1, cost);
    const LpSolution sol = solve(lp);
    if (sol.status != LpStatus::optimal)
        throw std::logic_error(std::string("solve_eo_kernels: LP reported ") +
                               to_string(sol.status) +
                               " but the trivial solution is always feasible");

    MarkovKernelPair pair;
    pair.k0.resize(k, k1);
    pair.k1.resize(k, k1);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k1; ++j) {
            pair.k0(i, j) = std::max(sol.x(0 * k * k1 + i * k1 + j), 0.0);
            pair.k1(i, j) = std::max(sol.x(1 * k * k1 + i * k1 + j), 0.0);
        }
    }
    pair.objective = sol.objective;
    pair.parity_residual = 0.0;
    for (int y = 0; y < 2; ++y) {
        const Eigen::VectorXd d =
            pair.k1.transpose() * pmfs.f[y][1] - pair.k0.transpose() * pmfs.f[y][0];
        pair.parity_residual = std::max(pair.parity_residual, d.cwiseAbs().sum());
    }
    return pair;
}

Eigen::VectorXd kernel_output_law(const ConditionalPmfSet& pmfs, const MarkovKernelPair& pair,
                                  int y) {
    if (y != 0 && y != 1) throw std::invalid_argument("kernel_output_law: y must be 0/1");
    return pair.k1.transpose() * pmfs.f[y][1];
}

Eigen::Index apply_kernel(const Eigen::MatrixXd& kernel, Eigen::Index input_bin, Rng& rng) {
    if (input_bin < 0 || input_bin >= kernel.rows())
        throw std::out_of_range("apply_kernel: input bin out of range");
    std::vector<double> row(static_cast<std::size_t>(kernel.cols()));
    for (Eigen::Index j = 0; j < kernel.cols(); ++j)
        row[static_cast<std::size_t>(j)] = std::max(kernel(input_bin, j), 0.0);
    return static_cast<Eigen::Index>(rng.categorical(row));
}

double brier_score(const std::vector<double>& probs, const std::vector<int>& outcomes) {
    if (probs.size() != outcomes.size())
        throw std::invalid_argument("brier_score: length mismatch");
    if (probs.empty()) throw std::invalid_argument("brier_score: empty input");
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (!(probs[i] >= 0.0 && probs[i] <= 1.0))
            throw std::invalid_argument("brier_score: probability out of [0,1]");
        if (outcomes[i] != 0 && outcomes[i] != 1)
            throw std::invalid_argument("brier_score: outcomes must be 0/1");
        const double d = probs[i] - outcomes[i];
        acc += d * d;
    }
    return acc / static_cast<double>(probs.size());
}

std::vector<SatSample> simulate_sat_model(const SatModelParams& params, std::size_t n,
                                          std::uint64_t seed) {
    params.validate();
    if (n == 0) throw std::invalid_argument("simulate_sat_model: n must be >= 1");
    std::vector<SatSample> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng = Rng::stream(seed, i);
        SatSample& r = out[i];
        r.a = rng.bernoulli(0.5);
        r.z = params.mu_z * r.a + params.tau_z * rng.normal();
        r.s = r.z + params.mu_s * r.a + params.sigma_s * rng.normal();
        r.y = rng.bernoulli(params.outcome_prob(r.z));
    }
    return out;
}

double sat_bayes_probability(const SatModelParams& params, int a, double s,
                             const QuadratureRule& rule) {
    return gauss_expectation(rule, params.posterior_mean(a, s),
                             std::sqrt(params.posterior_var()),
                             [&](double z) { return params.outcome_prob(z); });
}

Eigen::MatrixXd sat_binned_bayes_table(const SatModelParams& params,
                                       const Eigen::VectorXd& edges,
                                       const QuadratureRule& rule) {
    const int k = static_cast<int>(edges.size()) - 1;
    Eigen::MatrixXd table(2, k);
    constexpr double inf = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 2; ++a) {
        const double mz = params.mu_z * a;
        for (int b = 0; b < k; ++b) {
            const double lo = b == 0 ? -inf : edges(b);
            const double hi = b == k - 1 ? inf : edges(b + 1);
            // P(s in bin | z) is normal in s around z + mu_s a
            const auto in_bin = [&](double z) {
                const double m = z + params.mu_s * a;
                const double up = hi == inf ? 1.0 : normal_cdf((hi - m) / params.sigma_s);
                const double dn = lo == -inf ? 0.0 : normal_cdf((lo - m) / params.sigma_s);
                return up - dn;
            };
            const double num = gauss_expectation(rule, mz, params.tau_z, [&](double z) {
                return params.outcome_prob(z) * in_bin(z);
            });
            const double den = gauss_expectation(rule, mz, params.tau_z, in_bin);
            table(a, b) = den > 1e-300
                              ? num / den
                              : gauss_expectation(rule, mz, params.tau_z, [&](double z) {
                                    return params.outcome_prob(z);
                                });
        }
    }
    return table;
}

SatEvaluation evaluate_sat_decisions(const SatModelParams& params,
                                     const std::vector<SatSample>& samples, int k, int k1,
                                     const CostSpec& cost, std::uint64_t seed) {
    params.validate();
    const std::size_t n = samples.size();
    if (n == 0) throw std::invalid_argument("evaluate_sat_decisions: no samples");

    std::vector<double> s(n);
    std::vector<int> a(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = samples[i].s;
        a[i] = samples[i].a;
        y[i] = samples[i].y;
    }

    SatEvaluation ev;
    ev.pmfs = estimate_conditional_pmfs(s, a, y, k);
    ev.kernels = solve_eo_kernels(ev.pmfs, k1, cost);

    const QuadratureRule rule = gauss_hermite(40);
    const Eigen::MatrixXd binned = sat_binned_bayes_table(params, ev.pmfs.bin_edges, rule);

    double pi = 0.0;
    for (std::size_t i = 0; i < n; ++i) pi += y[i];
    pi /= static_cast<double>(n);
    const Eigen::VectorXd g0 = kernel_output_law(ev.pmfs, ev.kernels, 0);
    const Eigen::VectorXd g1 = kernel_output_law(ev.pmfs, ev.kernels, 1);
    Eigen::VectorXd out_prob(k1);  // group-blind forecast per output bin
    for (int j = 0; j < k1; ++j) {
        const double den = pi * g1(j) + (1.0 - pi) * g0(j);
        out_prob(j) = den > 1e-300 ? pi * g1(j) / den : pi;
    }

    ev.input_bin.resize(n);
    ev.bayes_prob.resize(n);
    ev.binned_bayes_prob.resize(n);
    ev.randomized_bin.resize(n);
    ev.randomized_prob.resize(n);
    constexpr std::uint64_t kRandomizeStreamBase = 1ull << 32;
    for (std::size_t i = 0; i < n; ++i) {
        const int b = bin_of(s[i], ev.pmfs.bin_edges);
        ev.input_bin[i] = b;
        ev.bayes_prob[i] = sat_bayes_probability(params, a[i], s[i], rule);
        ev.binned_bayes_prob[i] = binned(a[i], b);
        Rng rng = Rng::stream(seed, kRandomizeStreamBase + i);
        const Eigen::MatrixXd& kern = a[i] == 1 ? ev.kernels.k1 : ev.kernels.k0;
        const auto j = apply_kernel(kern, b, rng);
        ev.randomized_bin[i] = static_cast<int>(j);
        ev.randomized_prob[i] = out_prob(j);
    }

    for (int g = 0; g < 2; ++g) {
        std::vector<double> pb, pn, pr;
        std::vector<int> yy;
        for (std::size_t i = 0; i < n; ++i) {
            if (a[i] != g) continue;
            pb.push_back(ev.bayes_prob[i]);
            pn.push_back(ev.binned_bayes_prob[i]);
            pr.push_back(std::clamp(ev.randomized_prob[i], 0.0, 1.0));
            yy.push_back(y[i]);
        }
        ev.brier[static_cast<int>(SatDecision::bayes)][g] = brier_score(pb, yy);
        ev.brier[static_cast<int>(SatDecision::binned_bayes)][g] = brier_score(pn, yy);
        ev.brier[static_cast<int>(SatDecision::randomized)][g] = brier_score(pr, yy);
    }
    return ev;
}

Eigen::VectorXd GaussianRandomizer::transform(int a, const Eigen::VectorXd& s) const {
    if (a == 0) return pre_scale0 * (s - pre_shift0);
    if (a == 1) return s - pre_shift1;
    throw std::invalid_argument("GaussianRandomizer: a must be 0/1");
}

Eigen::VectorXd GaussianRandomizer::draw(int a, const Eigen::VectorXd& s, Rng& rng) const {
    const Eigen::VectorXd base = transform(a, s);
    const Eigen::MatrixXd& factor = a == 0 ? noise_factor0 : noise_factor1;
    Eigen::VectorXd noise(factor.cols());
    for (Eigen::Index i = 0; i < noise.size(); ++i) noise(i) = rng.normal();
    return base + factor * noise;
}

GaussianRandomizer gaussian_randomizer(const GaussianScoreModel& model) {
    const Eigen::Index ns = model.a0.rows();
    if (model.a1.rows() != ns || model.a0.cols() != model.a1.cols())
        throw std::invalid_argument("gaussian_randomizer: loading shape mismatch");
    if (model.mu0.size() != ns || model.mu1.size() != ns ||
        model.sigma0.rows() != ns || model.sigma1.rows() != ns ||
        model.sigma0.cols() != ns || model.sigma1.cols() != ns)
        throw std::invalid_argument("gaussian_randomizer: dimension mismatch");
    require_full_column_rank(model.a0, "A0");
    require_full_column_rank(model.a1, "A1");

    GaussianRandomizer r;
    r.pre_scale0 = model.a1 * pseudo_inverse(model.a0);
    r.pre_shift0 = model.mu0;
    r.pre_shift1 = model.mu1;

    const Eigen::MatrixXd sigma0p = r.pre_scale0 * model.sigma0 * r.pre_scale0.transpose();
    const Eigen::MatrixXd diff = model.sigma1 - sigma0p;
    const SymEig eig = sym_eig(diff);
    const double tol = 1e-12 * std::max(1.0, eig.values.cwiseAbs().maxCoeff());
    r.t0 = Eigen::MatrixXd::Zero(ns, ns);
    r.t1 = Eigen::MatrixXd::Zero(ns, ns);
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
        const double lam = eig.values(i);
        const Eigen::VectorXd v = eig.vectors.col(i);
        if (lam > tol)
            r.t0 += lam * v * v.transpose();
        else if (lam < -tol)
            r.t1 += (-lam) * v * v.transpose();
    }
    r.noise_factor0 = psd_factor(r.t0);
    r.noise_factor1 = psd_factor(r.t1);
    return r;
}

Eigen::VectorXd draw_score(const GaussianScoreModel& model, int a, const Eigen::VectorXd& y,
                           Rng& rng) {
    const Eigen::VectorXd& mu = a == 0 ? model.mu0 : model.mu1;
    const Eigen::MatrixXd& load = a == 0 ? model.a0 : model.a1;
    const Eigen::MatrixXd& sigma = a == 0 ? model.sigma0 : model.sigma1;
    const Eigen::MatrixXd factor = psd_factor(sigma);
    Eigen::VectorXd noise(factor.cols());
    for (Eigen::Index i = 0; i < noise.size(); ++i) noise(i) = rng.normal();
    return mu + load * y + factor * noise;
}

}  // namespace parity
