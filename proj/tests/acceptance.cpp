// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Needs PARITY_CLI (binary path) and PARITY_FIXTURES (fixtures dir) in the
// environment for the CLI criteria; both default to in-tree locations.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "parity/csv.hpp"
#include "parity/debias.hpp"
#include "parity/dist.hpp"
#include "parity/kci.hpp"
#include "parity/randomization.hpp"
#include "parity/sem.hpp"
#include "parity/sem_io.hpp"
#include "parity/simplex.hpp"
#include "test_util.hpp"

namespace {

using namespace parity;
namespace fs = std::filesystem;

std::string cli_path() {
    const char* env = std::getenv("PARITY_CLI");
    return env ? env : "build/tools/parity";
}

std::string fixtures_dir() {
    const char* env = std::getenv("PARITY_FIXTURES");
    return env ? env : "fixtures";
}

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw Failure(what);
}

// ------------------------------------------------------------ criteria ----

// 1: three-trace statistic equals the P-regrouped oracle on mixed datasets
void criterion_trace_oracle() {
    for (int rep = 0; rep < 20; ++rep) {
        Rng rng(100 + rep);
        const std::size_t n = 30;
        DataColumn x, a, z;
        a.kind = ColumnKind::categorical;
        z.kind = ColumnKind::continuous;
        x.kind = rep % 2 == 0 ? ColumnKind::continuous : ColumnKind::categorical;
        for (std::size_t i = 0; i < n; ++i) {
            const double zi = rng.normal();
            z.values.push_back(zi);
            a.values.push_back(static_cast<double>(rng.next_u64() % 3));
            if (x.kind == ColumnKind::continuous)
                x.values.push_back(std::sin(zi) + 0.3 * rng.normal());
            else
                x.values.push_back(static_cast<double>(rng.next_u64() % 4));
        }
        const GramMatrix kx = center(gram(x, default_kernel(x)));
        const GramMatrix ka = center(gram(a, default_kernel(a)));
        const GramMatrix kz = center(gram(z, default_kernel(z)));
        const double lambda = 1e-3;
        const double stat = kci_statistic(kx, ka, kz, lambda);

        const GramMatrix kxz = center(hadamard(kx, kz));
        const Eigen::MatrixXd p =
            Eigen::MatrixXd::Identity(n, n) - kz.entries * reg_pinv(kz, lambda);
        const double oracle =
            (p * kxz.entries * p.transpose() * ka.entries).trace() / static_cast<double>(n * n);
        require(std::abs(stat - oracle) <= 1e-8 * std::max(std::abs(oracle), 1e-30),
                "statistic " + std::to_string(stat) + " vs oracle " + std::to_string(oracle));
    }
}

// 2: p-values under the conditional null are level-correct and near uniform
void criterion_level() {
    const int reps = 300;
    std::vector<double> pvals;
    int rejections = 0;
    for (int r = 0; r < reps; ++r) {
        const auto d = testutil::make_null_dataset(1000 + r, 200);
        const KciResult res = kci_test(d.x, d.a, d.z, {});
        pvals.push_back(res.p_value);
        if (res.p_value < 0.05) ++rejections;
    }
    const double rate = static_cast<double>(rejections) / reps;
    require(rate >= 0.02 && rate <= 0.10,
            "rejection rate " + std::to_string(rate) + " outside [0.02, 0.10]");
    const double ks = ks_distance_uniform(pvals);
    require(ks <= 0.10, "KS distance to uniform " + std::to_string(ks) + " > 0.10");
}

// 3: power against the 0.5 a shift
void criterion_power() {
    int rejections = 0;
    for (int r = 0; r < 100; ++r) {
        const auto d = testutil::make_alt_dataset(2000 + r, 200);
        if (kci_test(d.x, d.a, d.z, {}).p_value < 0.05) ++rejections;
    }
    require(rejections >= 90, "power " + std::to_string(rejections) + "/100 < 0.90");
}

SatEvaluation sat_fixture_evaluation() {
    const SatModelParams params;
    const auto samples = simulate_sat_model(params, 50000, 1);
    return evaluate_sat_decisions(params, samples, 20, 20, {}, 1);
}

// 4: LP randomization validity on the fixture
void criterion_lp_validity() {
    const SatEvaluation ev = sat_fixture_evaluation();
    require(ev.kernels.parity_residual <= 1e-8,
            "parity residual " + std::to_string(ev.kernels.parity_residual));
    for (const auto* k : {&ev.kernels.k0, &ev.kernels.k1}) {
        require(k->minCoeff() >= -1e-10, "negative kernel entry");
        require((k->rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-8,
                "row sums off stochastic");
        for (Eigen::Index i = 0; i + 1 < k->rows(); ++i) {
            double lo = 0.0, hi = 0.0;
            for (Eigen::Index j = 0; j < k->cols(); ++j) {
                lo += (j + 1.0) * (*k)(i, j);
                hi += (j + 1.0) * (*k)(i + 1, j);
            }
            require(hi >= lo - 1e-8, "row means not nondecreasing");
        }
    }
}

// 5: Brier ordering with a bounded randomization price
void criterion_brier_ordering() {
    const SatEvaluation ev = sat_fixture_evaluation();
    for (int g = 0; g < 2; ++g) {
        const double bayes = ev.brier[0][g];
        const double binned = ev.brier[1][g];
        const double randomized = ev.brier[2][g];
        require(bayes <= binned,
                "group " + std::to_string(g) + ": bayes " + std::to_string(bayes) +
                    " > binned " + std::to_string(binned));
        require(binned <= randomized,
                "group " + std::to_string(g) + ": binned " + std::to_string(binned) +
                    " > randomized " + std::to_string(randomized));
        require(randomized - bayes <= 0.05,
                "group " + std::to_string(g) + ": randomization price " +
                    std::to_string(randomized - bayes) + " > 0.05");
    }
}

// 6: one-sided randomization infeasible, two-sided feasible
void criterion_one_sided_lemma() {
    ConditionalPmfSet pmfs;
    pmfs.f[0][0] = Eigen::Vector4d(0.001, 0.333, 0.333, 0.333);
    pmfs.f[1][0] = Eigen::Vector4d(0.010, 0.330, 0.330, 0.330);
    pmfs.f[0][1] = Eigen::Vector4d(0.25, 0.25, 0.25, 0.25);
    pmfs.f[1][1] = Eigen::Vector4d(0.15, 0.35, 0.25, 0.25);
    pmfs.bin_edges = Eigen::VectorXd::LinSpaced(5, 0.0, 4.0);
    require(solve(build_one_sided_eo_lp(pmfs, {})).status == LpStatus::infeasible,
            "one-sided LP unexpectedly feasible");
    require(solve(build_eo_lp(pmfs, 4, {})).status == LpStatus::optimal,
            "two-sided LP not optimal");
}

// 7: minimal Gaussian randomizer equates the conditional laws
void criterion_gaussian_randomizer() {
    GaussianScoreModel model;
    model.mu0 = Eigen::Vector2d(0.5, -0.5);
    model.mu1 = Eigen::Vector2d(0.0, 0.0);
    model.a0 = Eigen::MatrixXd(2, 1);
    model.a0 << 1.0, 0.5;
    model.a1 = Eigen::MatrixXd(2, 1);
    model.a1 << 0.8, 1.2;
    model.sigma0 = (Eigen::Matrix2d() << 1.0, 0.3, 0.3, 0.5).finished();
    model.sigma1 = (Eigen::Matrix2d() << 0.4, -0.1, -0.1, 1.2).finished();
    const GaussianRandomizer r = gaussian_randomizer(model);

    const SymEig e0 = sym_eig(r.t0), e1 = sym_eig(r.t1);
    require(e0.values.minCoeff() >= -1e-10 && e1.values.minCoeff() >= -1e-10, "T not PSD");
    const Eigen::MatrixXd diff =
        model.sigma1 - r.pre_scale0 * model.sigma0 * r.pre_scale0.transpose();
    require((r.t0 - r.t1 - diff).cwiseAbs().maxCoeff() <= 1e-10, "T0 - T1 != Sigma1' - Sigma0'");
    require((r.t0 * r.t1).cwiseAbs().maxCoeff() <= 1e-8, "T0 T1 != 0");

    const Eigen::VectorXd y0 = Eigen::VectorXd::Constant(1, 0.7);
    const int n = 10000;
    std::vector<std::vector<double>> comp0(2), comp1(2);
    for (int i = 0; i < n; ++i) {
        Rng rng0 = Rng::stream(301, i);
        Rng rng1 = Rng::stream(302, i);
        const Eigen::VectorXd out0 = r.draw(0, draw_score(model, 0, y0, rng0), rng0);
        const Eigen::VectorXd out1 = r.draw(1, draw_score(model, 1, y0, rng1), rng1);
        for (int c = 0; c < 2; ++c) {
            comp0[c].push_back(out0(c));
            comp1[c].push_back(out1(c));
        }
    }
    for (int c = 0; c < 2; ++c) {
        const double d = ks_two_sample_statistic(comp0[c], comp1[c]);
        const double p = ks_asymptotic_pvalue(d, n, n);
        require(p > 0.001, "component " + std::to_string(c) + " KS p " + std::to_string(p));
    }
}

// 8: every d-separated triple has zero conditional mutual information
void criterion_dsep_soundness() {
    Rng rng(400);
    int checked = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const SemGraph sem =
            testutil::random_binary_sem(rng, 2 + static_cast<int>(rng.next_u64() % 5));
        const int n = static_cast<int>(sem.size());
        for (int xi = 0; xi < n; ++xi) {
            for (int yi = xi + 1; yi < n; ++yi) {
                std::vector<int> rest;
                for (int o = 0; o < n; ++o)
                    if (o != xi && o != yi) rest.push_back(o);
                for (std::size_t mask = 0; mask < (1u << rest.size()); ++mask) {
                    std::vector<std::string> given;
                    for (std::size_t b = 0; b < rest.size(); ++b)
                        if (mask & (1u << b))
                            given.push_back(sem.node(static_cast<std::size_t>(rest[b])).name);
                    const std::string xn = sem.node(static_cast<std::size_t>(xi)).name;
                    const std::string yn = sem.node(static_cast<std::size_t>(yi)).name;
                    if (!d_separated(sem, {xn}, {yn}, given)) continue;
                    const double mi = conditional_mutual_information(sem, {xn}, {yn}, given);
                    require(mi <= 1e-12, "CMI " + std::to_string(mi) + " for a separated triple");
                    ++checked;
                }
            }
        }
    }
    require(checked > 100, "too few d-separated triples exercised");
}

// 9: shipped SEM fixtures reproduce the worked examples
void criterion_paper_fixtures() {
    const SemGraph accident = load_sem_file(fixtures_dir() + "/accident.sem");
    require(!d_separated(accident, {"a"}, {"yhat"}, {"y"}),
            "accident: a vs yhat given y should not be separated");
    require(check_eco_structural(accident, "a", "yhat", "y"), "accident: eco should hold");

    const SemGraph priest = load_sem_file(fixtures_dir() + "/priest.sem");
    require(check_eco_structural(priest, "a", "yhat", "z"), "priest: eco should hold");
    EvidenceSpec evidence;
    evidence.assignments["z"] = 1.9;
    const EpsilonCpResult cf = check_cf(priest, "yhat", "a", evidence);
    require(cf.epsilon_hat > 0.1,
            "priest: counterfactual TV " + std::to_string(cf.epsilon_hat) + " <= 0.1");
}

// 10: projections are orthogonal, and projecting out a known coefficient
// matrix restores conditional parity at the test's level
void criterion_debias() {
    // orthogonality against an estimated subspace
    Rng rng(500);
    std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs;
    for (int i = 0; i < 12; ++i) {
        Eigen::VectorXd v(4), w(4);
        for (int j = 0; j < 4; ++j) {
            v(j) = rng.normal();
            w(j) = rng.normal();
        }
        pairs.emplace_back(v, w);
    }
    const BiasSubspace est = estimate_bias_subspace(pairs, 2);
    for (int rep = 0; rep < 50; ++rep) {
        Eigen::VectorXd x(4);
        for (int j = 0; j < 4; ++j) x(j) = rng.normal();
        const Eigen::VectorXd p = project_out(x, est);
        for (Eigen::Index c = 0; c < est.rank(); ++c)
            require(std::abs(p.dot(est.basis.col(c))) <= 1e-10 * x.norm(),
                    "projection not orthogonal to the estimated subspace");
    }

    // level of the test after projecting out the known bias directions
    Eigen::MatrixXd b_coef(1, 3);  // x = a B + z Gamma + noise
    b_coef << 1.0, 0.5, -0.25;
    Eigen::MatrixXd gamma(1, 3);
    gamma << 0.5, -1.0, 0.75;
    const BiasSubspace known = bias_subspace_from_directions(b_coef.transpose());
    int rejections = 0;
    const int reps = 100;
    for (int r = 0; r < reps; ++r) {
        Rng g(3000 + r);
        const int n = 200;
        DataColumn xcol, acol, zcol;
        acol.kind = ColumnKind::continuous;
        zcol.kind = ColumnKind::continuous;
        xcol.kind = ColumnKind::continuous;
        for (int i = 0; i < n; ++i) {
            const double z = g.normal();
            const double a = 0.8 * z + 0.6 * g.normal();
            Eigen::VectorXd x = a * b_coef.row(0).transpose() + z * gamma.row(0).transpose();
            for (int c = 0; c < 3; ++c) x(c) += 0.3 * g.normal();
            const Eigen::VectorXd proj = project_out(x, known);
            xcol.values.push_back(proj(0));
            acol.values.push_back(a);
            zcol.values.push_back(z);
        }
        if (kci_test(xcol, acol, zcol, {}).p_value < 0.05) ++rejections;
    }
    const double rate = static_cast<double>(rejections) / reps;
    require(rate >= 0.02 && rate <= 0.10,
            "post-projection rejection rate " + std::to_string(rate) + " outside [0.02, 0.10]");
}

// 11: every CLI command is byte-deterministic and emits schema-valid JSON
struct RunResult {
    int exit_code = 0;
    std::string stdout_text;
};

RunResult run_cli(const std::string& args, const std::string& capture_path) {
    const std::string cmd = cli_path() + " " + args + " > " + capture_path + " 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    RunResult res;
    res.exit_code = rc == -1 ? -1 : WEXITSTATUS(rc);
    std::ifstream in(capture_path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    res.stdout_text = ss.str();
    return res;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void check_schema(const std::string& text, const std::string& command,
                  const std::vector<std::pair<std::string, nlohmann::json::value_t>>& fields) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw Failure("stdout of '" + command + "' is not JSON: " + e.what());
    }
    require(doc.value("command", "") == command, "wrong 'command' field for " + command);
    for (const auto& [name, type] : fields) {
        require(doc.contains(name), command + " output lacks '" + name + "'");
        const auto t = doc[name].type();
        const bool numeric_ok = type == nlohmann::json::value_t::number_float &&
                                (t == nlohmann::json::value_t::number_float ||
                                 t == nlohmann::json::value_t::number_integer ||
                                 t == nlohmann::json::value_t::number_unsigned);
        require(t == type || numeric_ok, command + ": field '" + name + "' has wrong type");
    }
}

void criterion_cli_determinism() {
    const fs::path tmp = fs::temp_directory_path() / "parity_acceptance";
    fs::remove_all(tmp);
    fs::create_directories(tmp);
    const std::string fx = fixtures_dir();
    using vt = nlohmann::json::value_t;

    // seed a small randomize input via simulate-sat
    const std::string sat_dir = (tmp / "sat").string();
    const std::string sat_args = "simulate-sat --n 2000 --seed 3 --k 8 --k1 8 --out " + sat_dir;

    struct Step {
        std::string name;
        std::string args;
        std::vector<std::string> files;  // outputs compared across reruns
        std::vector<std::pair<std::string, vt>> schema;
    };
    const std::vector<Step> steps = {
        {"test",
         "test --input " + fx + "/null_small.csv --x x --a a --z z --seed 11",
         {},
         {{"statistic", vt::number_float},
          {"p_value", vt::number_float},
          {"n", vt::number_unsigned},
          {"method", vt::string},
          {"config", vt::object}}},
        {"test-mc",
         "test --input " + fx + "/null_small.csv --x x --a a --z z --null mc --mc-reps 500 "
         "--seed 11",
         {},
         {{"p_value", vt::number_float}}},
        {"audit",
         "audit --input " + fx + "/simpson.csv --x admit --a gender --mode cp --z dept",
         {},
         {{"epsilon_hat", vt::number_float},
          {"per_stratum", vt::array},
          {"skipped_strata", vt::array},
          {"worst_pair", vt::object}}},
        {"simulate-sat",
         sat_args,
         {sat_dir + "/samples.csv", sat_dir + "/brier.json", sat_dir + "/kernels.json"},
         {{"brier", vt::object}, {"parity_residual", vt::number_float}}},
        {"randomize",
         "randomize --input " + sat_dir + "/samples.csv --s s --a a --y y --k 6 --k1 6 "
         "--seed 5 --out " + (tmp / "kernels.json").string() + " --randomized-csv " +
             (tmp / "randomized.csv").string(),
         {(tmp / "kernels.json").string(), (tmp / "kernels.json").string() + ".curves.tsv",
          (tmp / "randomized.csv").string()},
         {{"parity_residual", vt::number_float}, {"objective", vt::number_float}}},
        {"debias",
         "debias --input " + fx + "/features_small.csv --pairs " + fx +
             "/pairs_small.csv --rank 1 --out " + (tmp / "projected.csv").string(),
         {(tmp / "projected.csv").string()},
         {{"rank", vt::number_unsigned}, {"rows", vt::number_unsigned}}},
        {"sem",
         "sem --model " + fx + "/priest.sem --check cf --evidence z=1.9",
         {},
         {{"tv", vt::number_float}, {"counterfactually_fair", vt::boolean}}},
    };

    for (const auto& step : steps) {
        const std::string cap1 = (tmp / (step.name + ".1.json")).string();
        const RunResult first = run_cli(step.args, cap1);
        require(first.exit_code == 0,
                step.name + " exited " + std::to_string(first.exit_code));
        std::vector<std::string> file_contents;
        for (const auto& f : step.files) file_contents.push_back(slurp(f));

        const std::string cap2 = (tmp / (step.name + ".2.json")).string();
        const RunResult second = run_cli(step.args, cap2);
        require(second.exit_code == 0, step.name + " rerun failed");
        require(first.stdout_text == second.stdout_text,
                step.name + ": stdout differs across reruns");
        for (std::size_t i = 0; i < step.files.size(); ++i)
            require(file_contents[i] == slurp(step.files[i]),
                    step.name + ": file " + step.files[i] + " differs across reruns");

        const std::string command = step.name == "test-mc" ? "test" : step.name;
        check_schema(first.stdout_text, command, step.schema);
    }

    // exit-code contract
    require(run_cli("audit --input " + fx + "/simpson.csv --x admit --a gender --mode eopp",
                    (tmp / "e1").string())
                    .exit_code == 2,
            "eopp without --y should exit 2");
    require(run_cli("test --input " + fx + "/null_small.csv --x nope --a a",
                    (tmp / "e2").string())
                    .exit_code == 2,
            "missing column should exit 2");
    require(run_cli("test --input " + fx + "/priest.sem --x x --a a", (tmp / "e3").string())
                    .exit_code == 3,
            "unparseable csv should exit 3");
    require(run_cli("debias --input " + fx + "/features_small.csv --pairs " + fx +
                        "/pairs_small.csv --rank 3 --out " + (tmp / "p2.csv").string(),
                    (tmp / "e4").string())
                    .exit_code == 4,
            "oversized rank should exit 4");

    // binarizing a {0,1} column above its range degenerates to p = 1
    const RunResult bin = run_cli("test --input " + fx +
                                      "/null_small.csv --x x --a a --binarize-at 1.5",
                                  (tmp / "bin.json").string());
    require(bin.exit_code == 0, "binarize run failed");
    require(nlohmann::json::parse(bin.stdout_text)["p_value"].get<double>() == 1.0,
            "constant binarized column should give p = 1");
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_seconds;  // 0 = no stated budget
        std::function<void()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "trace-formula oracle equivalence", 5, criterion_trace_oracle},
        {2, "kci level calibration", 300, criterion_level},
        {3, "kci power", 120, criterion_power},
        {4, "lp randomization validity", 60, criterion_lp_validity},
        {5, "brier ordering", 0, criterion_brier_ordering},
        {6, "both-sided randomization lemma", 10, criterion_one_sided_lemma},
        {7, "gaussian randomizer", 30, criterion_gaussian_randomizer},
        {8, "d-separation soundness", 120, criterion_dsep_soundness},
        {9, "paper sem fixtures", 10, criterion_paper_fixtures},
        {10, "debias orthogonality and level", 180, criterion_debias},
        {11, "cli determinism and schema", 60, criterion_cli_determinism},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = true;
        try {
            c.run();
        } catch (const std::exception& e) {
            ok = false;
            detail = e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (ok && c.budget_seconds > 0 && secs > c.budget_seconds) {
            ok = false;
            detail = "runtime " + std::to_string(secs) + "s over the " +
                     std::to_string(c.budget_seconds) + "s budget";
        }
        char line[256];
        std::snprintf(line, sizeof(line), "%s  %2d  %-36s (%.1fs)", ok ? "PASS" : "FAIL", c.id,
                      c.name, secs);
        std::cout << line;
        if (!ok) std::cout << "  -- " << detail;
        std::cout << std::endl;
        if (!ok) ++failures;
    }
    if (failures > 0) std::cout << failures << " criterion(s) failed" << std::endl;
    return failures == 0 ? 0 : 1;
}
