// parity: conditional parity testing, randomized repair, and causal fairness
// checks over CSV data and tabular SEM files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "parity/csv.hpp"
#include "parity/debias.hpp"
#include "parity/kci.hpp"
#include "parity/randomization.hpp"
#include "parity/sem.hpp"
#include "parity/sem_io.hpp"

namespace {

using nlohmann::json;
using namespace parity;

constexpr const char* kVersion = "0.1.0";

// exit codes: 0 success, 2 usage, 3 input parse, 4 domain error
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void emit(const json& doc) { std::cout << doc.dump(2) << "\n"; }

CsvTable load_table(const std::string& path) {
    CsvTable table = read_csv_file(path);
    if (table.num_rows() < 2)
        throw CsvParseError("'" + path + "': need at least 2 data rows");
    return table;
}

DataColumn load_column(const CsvTable& table, const std::string& name,
                       const std::vector<std::string>& force_categorical) {
    if (!table.has_column(name)) throw UsageError("no column named '" + name + "'");
    for (const auto& c : force_categorical)
        if (c == name) return table.categorical_column(name);
    return table.inferred_column(name);
}

// ---------------------------------------------------------------- test ----

struct TestArgs {
    std::string input, x, a;
    std::string z;
    double lambda = 1e-3;
    std::string null_method = "gamma";
    int mc_reps = 5000;
    double binarize_at = std::numeric_limits<double>::quiet_NaN();
    bool has_binarize = false;
    std::uint64_t seed = 0;
    std::vector<std::string> as_categorical;
};

int cmd_test(const TestArgs& args) {
    const CsvTable table = load_table(args.input);
    const DataColumn x = load_column(table, args.x, args.as_categorical);
    DataColumn a;
    if (args.has_binarize) {
        if (!table.has_column(args.a)) throw UsageError("no column named '" + args.a + "'");
        const DataColumn raw = table.continuous_column(args.a);
        a.kind = ColumnKind::categorical;
        for (double v : raw.values) a.values.push_back(v >= args.binarize_at ? 1.0 : 0.0);
    } else {
        a = load_column(table, args.a, args.as_categorical);
    }
    std::optional<DataColumn> z;
    if (!args.z.empty()) z = load_column(table, args.z, args.as_categorical);

    KciConfig cfg;
    cfg.lambda = args.lambda;
    cfg.null_method = args.null_method == "mc" ? NullMethod::montecarlo : NullMethod::gamma;
    cfg.mc_reps = args.mc_reps;
    cfg.seed = args.seed;
    const KciResult res = kci_test(x, a, z, cfg);

    json config{{"lambda", cfg.lambda},
                {"null", args.null_method},
                {"mc_reps", cfg.mc_reps},
                {"seed", cfg.seed}};
    if (args.has_binarize) config["binarize_at"] = args.binarize_at;
    emit(json{{"command", "test"},
              {"statistic", res.statistic},
              {"p_value", res.p_value},
              {"n", res.n},
              {"method", res.method == NullMethod::gamma ? "gamma" : "mc"},
              {"columns", {{"x", args.x}, {"a", args.a}, {"z", args.z}}},
              {"config", config}});
    return 0;
}

// --------------------------------------------------------------- audit ----

struct AuditArgs {
    std::string input, x, a, y, z;
    std::string mode = "dp";
};

std::vector<std::string> sorted_labels(const CsvTable& table, const std::string& name) {
    const auto raw = table.raw_column(name);
    std::set<std::string> distinct(raw.begin(), raw.end());
    return {distinct.begin(), distinct.end()};
}

int cmd_audit(const AuditArgs& args) {
    AuditMode mode;
    if (args.mode == "dp") mode = AuditMode::dp;
    else if (args.mode == "eo") mode = AuditMode::eo;
    else if (args.mode == "eopp") mode = AuditMode::eopp;
    else if (args.mode == "cp") mode = AuditMode::cp;
    else throw UsageError("unknown audit mode '" + args.mode + "'");
    if ((mode == AuditMode::eo || mode == AuditMode::eopp) && args.y.empty())
        throw UsageError("mode '" + args.mode + "' needs --y");
    if (mode == AuditMode::cp && args.z.empty()) throw UsageError("mode 'cp' needs --z");

    const CsvTable table = load_table(args.input);
    const auto cat = [&](const std::string& name) {
        if (!table.has_column(name)) throw UsageError("no column named '" + name + "'");
        return table.categorical_column(name);
    };
    const DataColumn x = cat(args.x);
    const DataColumn a = cat(args.a);
    std::optional<DataColumn> y, z;
    if (!args.y.empty()) {
        // eopp filters on y = 1, so the outcome keeps its numeric values
        if (!table.has_column(args.y)) throw UsageError("no column named '" + args.y + "'");
        y = mode == AuditMode::eopp ? table.continuous_column(args.y) : cat(args.y);
    }
    if (!args.z.empty()) z = cat(args.z);

    const EpsilonCpResult res = parity_audit(x, a, mode, y, z);

    // report strata and levels by their original cell text, not by code
    const std::vector<std::string> a_labels = sorted_labels(table, args.a);
    std::vector<std::string> z_labels;
    if (mode == AuditMode::cp) z_labels = sorted_labels(table, args.z);
    else if (mode == AuditMode::eo) z_labels = sorted_labels(table, args.y);
    else if (mode == AuditMode::eopp) z_labels = {"y=0", "y=1"};  // stratum value is 1
    else z_labels = {"all"};
    const auto label_of = [](const std::vector<std::string>& labels, double code) {
        const auto i = static_cast<std::size_t>(code);
        return i < labels.size() ? labels[i] : std::to_string(code);
    };

    json per = json::array();
    for (const auto& [zv, tv] : res.per_stratum)
        per.push_back({{"z", label_of(z_labels, zv)}, {"tv", tv}});
    json skipped = json::array();
    for (double zv : res.skipped_strata) skipped.push_back(label_of(z_labels, zv));
    const json doc{{"command", "audit"},
                   {"mode", args.mode},
                   {"n", table.num_rows()},
                   {"epsilon_hat", res.epsilon_hat},
                   {"worst_pair",
                    {{"z", label_of(z_labels, res.worst_pair.z)},
                     {"a", label_of(a_labels, res.worst_pair.a)},
                     {"a_prime", label_of(a_labels, res.worst_pair.a_prime)}}},
                   {"per_stratum", per},
                   {"skipped_strata", skipped}};
    emit(doc);
    return 0;
}

// ----------------------------------------------------------- randomize ----

struct RandomizeArgs {
    std::string input, s, a, y;
    int k = 20;
    int k1 = 20;
    double alpha = 1.0;
    std::uint64_t seed = 0;
    std::string out;
    std::string curves;
    std::string randomized_csv;
};

std::vector<int> binary_codes(const CsvTable& table, const std::string& name) {
    if (!table.has_column(name)) throw UsageError("no column named '" + name + "'");
    const DataColumn col = table.categorical_column(name);
    double max_code = 0.0;
    for (double v : col.values) max_code = std::max(max_code, v);
    if (max_code > 1.0)
        throw UsageError("column '" + name + "' must have exactly two levels");
    std::vector<int> out;
    out.reserve(col.values.size());
    for (double v : col.values) out.push_back(static_cast<int>(v));
    return out;
}

json kernels_json(const ConditionalPmfSet& pmfs, const MarkovKernelPair& pair, int k, int k1,
                  double alpha, std::uint64_t seed) {
    const auto matrix_rows = [](const Eigen::MatrixXd& m) {
        json rows = json::array();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            json row = json::array();
            for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
            rows.push_back(row);
        }
        return rows;
    };
    json edges = json::array();
    for (Eigen::Index i = 0; i < pmfs.bin_edges.size(); ++i) edges.push_back(pmfs.bin_edges(i));
    const Eigen::VectorXd g0 = kernel_output_law(pmfs, pair, 0);
    const Eigen::VectorXd g1 = kernel_output_law(pmfs, pair, 1);
    json law0 = json::array(), law1 = json::array();
    for (Eigen::Index j = 0; j < g0.size(); ++j) {
        law0.push_back(g0(j));
        law1.push_back(g1(j));
    }
    return json{{"bins_in", k},
                {"bins_out", k1},
                {"alpha", alpha},
                {"seed", seed},
                {"bin_edges", edges},
                {"kernel0", matrix_rows(pair.k0)},
                {"kernel1", matrix_rows(pair.k1)},
                {"output_law_y0", law0},
                {"output_law_y1", law1},
                {"parity_residual", pair.parity_residual},
                {"objective", pair.objective}};
}

void write_curves_tsv(const std::string& path, const ConditionalPmfSet& pmfs,
                      const MarkovKernelPair& pair) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "bin\ts_lo\ts_hi\te_out_a0\te_out_a1\n";
    const int k = pmfs.num_bins();
    for (int i = 0; i < k; ++i) {
        double e0 = 0.0, e1 = 0.0;
        for (Eigen::Index j = 0; j < pair.k0.cols(); ++j) {
            e0 += (j + 1.0) * pair.k0(i, j);
            e1 += (j + 1.0) * pair.k1(i, j);
        }
        out << (i + 1) << '\t' << fmt_double(pmfs.bin_edges(i)) << '\t'
            << fmt_double(pmfs.bin_edges(i + 1)) << '\t' << fmt_double(e0) << '\t'
            << fmt_double(e1) << '\n';
    }
}

int cmd_randomize(const RandomizeArgs& args) {
    const CsvTable table = load_table(args.input);
    if (!table.has_column(args.s)) throw UsageError("no column named '" + args.s + "'");
    const DataColumn s = table.continuous_column(args.s);
    const std::vector<int> a = binary_codes(table, args.a);
    const std::vector<int> y = binary_codes(table, args.y);

    const ConditionalPmfSet pmfs = estimate_conditional_pmfs(s.values, a, y, args.k);
    CostSpec cost;
    cost.alpha = args.alpha;
    const MarkovKernelPair pair = solve_eo_kernels(pmfs, args.k1, cost);

    {
        std::ofstream out(args.out, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + args.out + "'");
        out << kernels_json(pmfs, pair, args.k, args.k1, args.alpha, args.seed).dump(2) << "\n";
    }
    const std::string curves_path =
        args.curves.empty() ? args.out + ".curves.tsv" : args.curves;
    write_curves_tsv(curves_path, pmfs, pair);

    if (!args.randomized_csv.empty()) {
        CsvTable copy = table;
        copy.header.push_back("randomized_bin");
        for (std::size_t i = 0; i < copy.rows.size(); ++i) {
            const int bin = bin_of(s.values[i], pmfs.bin_edges);
            Rng rng = Rng::stream(args.seed, i);
            const auto j = apply_kernel(a[i] == 1 ? pair.k1 : pair.k0, bin, rng);
            copy.rows[i].push_back(std::to_string(j + 1));
        }
        std::ofstream out(args.randomized_csv, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + args.randomized_csv + "'");
        write_csv(out, copy);
    }

    emit(json{{"command", "randomize"},
              {"n", table.num_rows()},
              {"bins_in", args.k},
              {"bins_out", args.k1},
              {"parity_residual", pair.parity_residual},
              {"objective", pair.objective},
              {"out", args.out},
              {"curves", curves_path}});
    return 0;
}

// -------------------------------------------------------- simulate-sat ----

struct SimulateSatArgs {
    std::size_t n = 50000;
    std::uint64_t seed = 1;
    SatModelParams params;
    int k = 20;
    int k1 = 20;
    std::string out;
};

int cmd_simulate_sat(const SimulateSatArgs& args) {
    if (args.n == 0) throw UsageError("--n must be positive");
    args.params.validate();
    namespace fs = std::filesystem;
    fs::create_directories(args.out);

    const auto samples = simulate_sat_model(args.params, args.n, args.seed);
    const SatEvaluation ev =
        evaluate_sat_decisions(args.params, samples, args.k, args.k1, {}, args.seed);

    {
        std::ofstream out(fs::path(args.out) / "samples.csv", std::ios::binary);
        out << "a,z,s,y,bayes_prob,binned_bayes_prob,randomized_bin,randomized_prob\n";
        for (std::size_t i = 0; i < samples.size(); ++i) {
            out << samples[i].a << ',' << fmt_double(samples[i].z) << ','
                << fmt_double(samples[i].s) << ',' << samples[i].y << ','
                << fmt_double(ev.bayes_prob[i]) << ',' << fmt_double(ev.binned_bayes_prob[i])
                << ',' << (ev.randomized_bin[i] + 1) << ',' << fmt_double(ev.randomized_prob[i])
                << '\n';
        }
    }
    {
        std::ofstream out(fs::path(args.out) / "kernels.json", std::ios::binary);
        out << kernels_json(ev.pmfs, ev.kernels, args.k, args.k1, 1.0, args.seed).dump(2)
            << "\n";
    }

    const json brier{
        {"bayes", {{"a0", ev.brier[0][0]}, {"a1", ev.brier[0][1]}}},
        {"binned_bayes", {{"a0", ev.brier[1][0]}, {"a1", ev.brier[1][1]}}},
        {"randomized", {{"a0", ev.brier[2][0]}, {"a1", ev.brier[2][1]}}}};
    const json doc{{"command", "simulate-sat"},
                   {"n", args.n},
                   {"seed", args.seed},
                   {"params",
                    {{"mu_z", args.params.mu_z},
                     {"tau_z", args.params.tau_z},
                     {"mu_s", args.params.mu_s},
                     {"sigma_s", args.params.sigma_s},
                     {"p_loc", args.params.p_loc},
                     {"p_scale", args.params.p_scale}}},
                   {"bins_in", args.k},
                   {"bins_out", args.k1},
                   {"parity_residual", ev.kernels.parity_residual},
                   {"brier", brier},
                   {"out", args.out}};
    {
        std::ofstream out(fs::path(args.out) / "brier.json", std::ios::binary);
        out << doc.dump(2) << "\n";
    }
    emit(doc);
    return 0;
}

// -------------------------------------------------------------- debias ----

struct DebiasArgs {
    std::string input, pairs, out;
    int rank = 1;
};

int cmd_debias(const DebiasArgs& args) {
    const CsvTable table = load_table(args.input);
    const CsvTable pair_table = read_csv_file(args.pairs);
    const std::size_t d = table.header.size();
    if (pair_table.header.size() != 2 * d)
        throw UsageError("pairs file must have 2 x " + std::to_string(d) +
                         " columns (v fields then w fields)");

    std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs;
    for (const auto& row : pair_table.rows) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(d)), w(static_cast<Eigen::Index>(d));
        for (std::size_t c = 0; c < d; ++c) {
            try {
                v(static_cast<Eigen::Index>(c)) = std::stod(row[c]);
                w(static_cast<Eigen::Index>(c)) = std::stod(row[c + d]);
            } catch (const std::exception&) {
                throw CsvParseError("pairs file: cannot parse '" + row[c] + "' as a number");
            }
        }
        pairs.emplace_back(v, w);
    }

    const BiasSubspace subspace =
        args.rank == 0 ? BiasSubspace{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), 0)}
                       : estimate_bias_subspace(pairs, args.rank);

    CsvTable out_table;
    out_table.header = table.header;
    Eigen::VectorXd x(static_cast<Eigen::Index>(d));
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < d; ++c) {
            double v = 0.0;
            try {
                v = std::stod(row[c]);
            } catch (const std::exception&) {
                throw CsvParseError("input: cannot parse '" + row[c] + "' as a number");
            }
            x(static_cast<Eigen::Index>(c)) = v;
        }
        const Eigen::VectorXd p = project_out(x, subspace);
        std::vector<std::string> out_row;
        for (Eigen::Index c = 0; c < p.size(); ++c) out_row.push_back(fmt_double(p(c)));
        out_table.rows.push_back(std::move(out_row));
    }
    std::ofstream out(args.out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + args.out + "'");
    write_csv(out, out_table);

    emit(json{{"command", "debias"},
              {"rank", args.rank},
              {"dim", d},
              {"rows", out_table.rows.size()},
              {"out", args.out}});
    return 0;
}

// ----------------------------------------------------------------- sem ----

struct SemArgs {
    std::string model;
    std::string check;
    std::string protected_node, prediction_node, outcome_node;
    std::vector<std::string> evidence;
    std::vector<std::string> dsep_x, dsep_y, dsep_given;
    std::uint64_t seed = 0;
};

std::string role_or_flag(const SemGraph& sem, const std::string& flag, NodeRole role,
                         const char* what) {
    if (!flag.empty()) {
        if (!sem.has_node(flag)) throw UsageError(std::string("no node named '") + flag + "'");
        return flag;
    }
    const auto idx = sem.node_with_role(role);
    if (!idx)
        throw UsageError(std::string("model assigns no ") + what +
                         " role; pass the node explicitly");
    return sem.node(*idx).name;
}

int cmd_sem(const SemArgs& args) {
    const SemGraph sem = load_sem_file(args.model);
    json doc{{"command", "sem"}, {"check", args.check}, {"model", args.model}};

    if (args.check == "eco") {
        const std::string a = role_or_flag(sem, args.protected_node, NodeRole::protected_attr,
                                           "protected");
        const std::string yhat =
            role_or_flag(sem, args.prediction_node, NodeRole::prediction, "prediction");
        const std::string y = role_or_flag(sem, args.outcome_node, NodeRole::outcome, "outcome");
        doc["protected"] = a;
        doc["prediction"] = yhat;
        doc["outcome"] = y;
        doc["eco"] = check_eco_structural(sem, a, yhat, y);
    } else if (args.check == "cf") {
        const std::string a = role_or_flag(sem, args.protected_node, NodeRole::protected_attr,
                                           "protected");
        const std::string yhat =
            role_or_flag(sem, args.prediction_node, NodeRole::prediction, "prediction");
        EvidenceSpec evidence;
        for (const auto& item : args.evidence) {
            const auto eq = item.find('=');
            if (eq == std::string::npos)
                throw UsageError("--evidence expects node=value, got '" + item + "'");
            const std::string node = item.substr(0, eq);
            if (!sem.has_node(node)) throw UsageError("no node named '" + node + "'");
            try {
                evidence.assignments[node] = std::stod(item.substr(eq + 1));
            } catch (const std::exception&) {
                throw UsageError("--evidence value in '" + item + "' is not a number");
            }
        }
        const EpsilonCpResult res = check_cf(sem, yhat, a, evidence, {}, args.seed);
        doc["protected"] = a;
        doc["prediction"] = yhat;
        json evid = json::object();
        for (const auto& [k, v] : evidence.assignments) evid[k] = v;
        doc["evidence"] = evid;
        doc["tv"] = res.epsilon_hat;
        doc["counterfactually_fair"] = res.epsilon_hat <= 1e-9;
        doc["worst_pair"] = {{"a", res.worst_pair.a}, {"a_prime", res.worst_pair.a_prime}};
    } else if (args.check == "dsep") {
        if (args.dsep_x.empty() || args.dsep_y.empty())
            throw UsageError("dsep needs --dsep-x and --dsep-y");
        doc["x"] = args.dsep_x;
        doc["y"] = args.dsep_y;
        doc["given"] = args.dsep_given;
        doc["d_separated"] = d_separated(sem, args.dsep_x, args.dsep_y, args.dsep_given);
    } else {
        throw UsageError("unknown check '" + args.check + "'");
    }
    emit(doc);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"conditional parity testing and repair toolkit"};
    app.set_version_flag("--version", std::string("parity ") + kVersion);
    app.require_subcommand(1);

    TestArgs test_args;
    auto* test = app.add_subcommand("test", "kernel conditional independence test");
    test->add_option("--input", test_args.input)->required();
    test->add_option("--x", test_args.x)->required();
    test->add_option("--a", test_args.a)->required();
    test->add_option("--z", test_args.z);
    test->add_option("--lambda", test_args.lambda);
    test->add_option("--null", test_args.null_method)
        ->check(CLI::IsMember({"gamma", "mc"}));
    test->add_option("--mc-reps", test_args.mc_reps);
    auto* binarize_opt = test->add_option("--binarize-at", test_args.binarize_at);
    test->add_option("--seed", test_args.seed);
    test->add_option("--as-categorical", test_args.as_categorical);

    AuditArgs audit_args;
    auto* audit = app.add_subcommand("audit", "empirical parity audit");
    audit->add_option("--input", audit_args.input)->required();
    audit->add_option("--x", audit_args.x)->required();
    audit->add_option("--a", audit_args.a)->required();
    audit->add_option("--y", audit_args.y);
    audit->add_option("--z", audit_args.z);
    audit->add_option("--mode", audit_args.mode)
        ->check(CLI::IsMember({"dp", "eo", "eopp", "cp"}));

    RandomizeArgs rand_args;
    auto* rand = app.add_subcommand("randomize", "fit equalized-odds Markov kernels");
    rand->add_option("--input", rand_args.input)->required();
    rand->add_option("--s", rand_args.s)->required();
    rand->add_option("--a", rand_args.a)->required();
    rand->add_option("--y", rand_args.y)->required();
    rand->add_option("--k", rand_args.k);
    rand->add_option("--k1", rand_args.k1);
    rand->add_option("--alpha", rand_args.alpha);
    rand->add_option("--seed", rand_args.seed);
    rand->add_option("--out", rand_args.out)->required();
    rand->add_option("--curves", rand_args.curves);
    rand->add_option("--randomized-csv", rand_args.randomized_csv);

    SimulateSatArgs sat_args;
    auto* sat = app.add_subcommand("simulate-sat", "latent-ability score example");
    sat->add_option("--n", sat_args.n);
    sat->add_option("--seed", sat_args.seed);
    sat->add_option("--mu-z", sat_args.params.mu_z);
    sat->add_option("--tau-z", sat_args.params.tau_z);
    sat->add_option("--mu-s", sat_args.params.mu_s);
    sat->add_option("--sigma-s", sat_args.params.sigma_s);
    sat->add_option("--p-loc", sat_args.params.p_loc);
    sat->add_option("--p-scale", sat_args.params.p_scale);
    sat->add_option("--k", sat_args.k);
    sat->add_option("--k1", sat_args.k1);
    sat->add_option("--out", sat_args.out)->required();

    DebiasArgs debias_args;
    auto* debias = app.add_subcommand("debias", "project features off a bias subspace");
    debias->add_option("--input", debias_args.input)->required();
    debias->add_option("--pairs", debias_args.pairs)->required();
    debias->add_option("--rank", debias_args.rank);
    debias->add_option("--out", debias_args.out)->required();

    SemArgs sem_args;
    auto* sem = app.add_subcommand("sem", "structural-model fairness checks");
    sem->add_option("--model", sem_args.model)->required();
    sem->add_option("--check", sem_args.check)
        ->required()
        ->check(CLI::IsMember({"eco", "cf", "dsep"}));
    sem->add_option("--protected", sem_args.protected_node);
    sem->add_option("--prediction", sem_args.prediction_node);
    sem->add_option("--outcome", sem_args.outcome_node);
    sem->add_option("--evidence", sem_args.evidence);
    sem->add_option("--dsep-x", sem_args.dsep_x);
    sem->add_option("--dsep-y", sem_args.dsep_y);
    sem->add_option("--dsep-given", sem_args.dsep_given);
    sem->add_option("--seed", sem_args.seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    test_args.has_binarize = binarize_opt->count() > 0;

    try {
        if (*test) return cmd_test(test_args);
        if (*audit) return cmd_audit(audit_args);
        if (*rand) return cmd_randomize(rand_args);
        if (*sat) return cmd_simulate_sat(sat_args);
        if (*debias) return cmd_debias(debias_args);
        if (*sem) return cmd_sem(sem_args);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const CsvParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const SemParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
