#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "parity/csv.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string cli() {
    const char* env = std::getenv("PARITY_CLI");
    REQUIRE_MESSAGE(env != nullptr, "PARITY_CLI must point at the binary");
    return env;
}

std::string fixtures() {
    const char* env = std::getenv("PARITY_FIXTURES");
    REQUIRE_MESSAGE(env != nullptr, "PARITY_FIXTURES must point at the fixtures dir");
    return env;
}

fs::path tmp_dir() {
    const fs::path p = fs::temp_directory_path() / "parity_cli_tests";
    fs::create_directories(p);
    return p;
}

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run(const std::string& args) {
    const fs::path out = tmp_dir() / "stdout.txt";
    const fs::path err = tmp_dir() / "stderr.txt";
    const std::string cmd =
        cli() + " " + args + " > " + out.string() + " 2> " + err.string();
    const int rc = std::system(cmd.c_str());
    Run r;
    r.code = rc == -1 ? -1 : WEXITSTATUS(rc);
    std::stringstream so, se;
    so << std::ifstream(out).rdbuf();
    se << std::ifstream(err).rdbuf();
    r.out = so.str();
    r.err = se.str();
    return r;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
}

}  // namespace

TEST_CASE("version flag") {
    const Run r = run("--version");
    CHECK(r.code == 0);
    CHECK(r.out.find("parity 0.1.0") != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
    CHECK(run("").code == 2);
    CHECK(run("test --x a").code == 2);  // missing required flags
    CHECK(run("test --input " + fixtures() + "/null_small.csv --x missing --a a").code == 2);
    CHECK(run("audit --input " + fixtures() + "/simpson.csv --x admit --a gender --mode cp")
              .code == 2);  // cp without --z
}

TEST_CASE("parse failures exit 3") {
    const fs::path bad = tmp_dir() / "bad.csv";
    write_file(bad, "x,a\n1\n");  // ragged
    CHECK(run("test --input " + bad.string() + " --x x --a a").code == 3);

    const fs::path nonnum = tmp_dir() / "nonnum.csv";
    write_file(nonnum, "x,a\nred,0\nblue,1\n");
    // binarize needs a numeric protected column
    CHECK(run("test --input " + nonnum.string() + " --x a --a x --binarize-at 0.5").code == 3);

    const fs::path badsem = tmp_dir() / "bad.sem";
    write_file(badsem, "{\"nodes\": [{\"name\": \"u\", \"domain\": [0], \"pmf\": [0.9]}]}");
    CHECK(run("sem --model " + badsem.string() + " --check eco").code == 3);
}

TEST_CASE("shipped null fixture yields a valid p-value") {
    const Run r = run("test --input " + fixtures() + "/null_small.csv --x x --a a --z z");
    REQUIRE(r.code == 0);
    const double p = json::parse(r.out)["p_value"].get<double>();
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
}

TEST_CASE("simulate-sat rejects n = 0") {
    CHECK(run("simulate-sat --n 0 --out " + (tmp_dir() / "sat0").string()).code == 2);
}

TEST_CASE("identical x and a reject strongly") {
    const fs::path csv = tmp_dir() / "xa.csv";
    std::ostringstream rows;
    rows << "x,a\n";
    for (int i = 0; i < 200; ++i) rows << (i % 2) << ',' << (i % 2) << "\n";
    write_file(csv, rows.str());
    const Run r = run("test --input " + csv.string() + " --x x --a a");
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out)["p_value"].get<double>() < 0.01);
}

TEST_CASE("audit json reports skipped strata") {
    const fs::path csv = tmp_dir() / "skip.csv";
    write_file(csv, "x,a,z\n0,0,0\n1,0,0\n0,1,0\n1,1,0\n0,0,1\n1,0,1\n");
    const Run r = run("audit --input " + csv.string() + " --x x --a a --z z --mode cp");
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.out);
    CHECK(doc["skipped_strata"].size() == 1);
    CHECK(doc["per_stratum"].size() == 1);
}

TEST_CASE("randomize rejects an empty (y, a) cell with exit 4") {
    const fs::path csv = tmp_dir() / "cell.csv";
    std::ostringstream rows;
    rows << "s,a,y\n";
    for (int i = 0; i < 40; ++i) {
        const int a = i % 2;
        const int y = a == 1 ? (i % 4 == 1 ? 1 : 0) : 0;  // (y=1, a=0) never occurs
        rows << (0.1 * i) << ',' << a << ',' << y << "\n";
    }
    write_file(csv, rows.str());
    const Run r = run("randomize --input " + csv.string() +
                      " --s s --a a --y y --k 4 --k1 4 --out " +
                      (tmp_dir() / "k.json").string());
    CHECK(r.code == 4);
}

TEST_CASE("debias with rank zero reproduces the input values") {
    const fs::path out = tmp_dir() / "rank0.csv";
    const Run r = run("debias --input " + fixtures() + "/features_small.csv --pairs " +
                      fixtures() + "/pairs_small.csv --rank 0 --out " + out.string());
    REQUIRE(r.code == 0);
    std::stringstream in, got;
    in << std::ifstream(fixtures() + "/features_small.csv").rdbuf();
    got << std::ifstream(out).rdbuf();
    std::string a, b;
    std::getline(in, a);
    std::getline(got, b);
    CHECK(a == b);  // header preserved
    // every value survives the projection with rank 0, and the output
    // round-trips through the csv reader
    const parity::CsvTable orig = parity::read_csv_file(fixtures() + "/features_small.csv");
    const parity::CsvTable proj = parity::read_csv_file(out.string());
    REQUIRE(orig.num_rows() == proj.num_rows());
    for (const auto& name : orig.header) {
        const auto lhs = orig.continuous_column(name);
        const auto rhs = proj.continuous_column(name);
        for (std::size_t i = 0; i < lhs.values.size(); ++i)
            CHECK(rhs.values[i] == doctest::Approx(lhs.values[i]).epsilon(1e-15));
    }
}

TEST_CASE("sem command without declared roles needs explicit flags") {
    const fs::path sem = tmp_dir() / "noroles.sem";
    write_file(sem, R"({"nodes": [
        {"name": "a", "domain": [0, 1], "pmf": [0.5, 0.5]},
        {"name": "yhat", "domain": [0, 1], "parents": ["a"], "table": [0, 1]}
    ]})");
    CHECK(run("sem --model " + sem.string() + " --check eco").code == 2);
    const Run ok = run("sem --model " + sem.string() +
                       " --check eco --protected a --prediction yhat --outcome yhat");
    REQUIRE(ok.code == 0);
    CHECK(json::parse(ok.out)["eco"].get<bool>() == true);
}

TEST_CASE("sem dsep through the cli") {
    const Run r = run("sem --model " + fixtures() +
                      "/priest.sem --check dsep --dsep-x a --dsep-y yhat --dsep-given z");
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out)["d_separated"].get<bool>() == true);
}

TEST_CASE("randomize artifact fields and curves file") {
    const fs::path csv = tmp_dir() / "rnd.csv";
    std::ostringstream rows;
    rows << "s,a,y\n";
    for (int i = 0; i < 400; ++i) {
        const int a = i % 2;
        const int y = (i / 2) % 2;
        rows << (0.01 * i + 0.5 * a + y) << ',' << a << ',' << y << "\n";
    }
    write_file(csv, rows.str());
    const fs::path artifact = tmp_dir() / "art.json";
    const Run r = run("randomize --input " + csv.string() +
                      " --s s --a a --y y --k 5 --k1 5 --seed 2 --out " + artifact.string());
    REQUIRE(r.code == 0);
    const json doc = json::parse(std::ifstream(artifact));
    CHECK(doc["bins_in"] == 5);
    CHECK(doc["kernel0"].size() == 5);
    CHECK(doc["kernel0"][0].size() == 5);
    CHECK(doc["parity_residual"].get<double>() <= 1e-8);
    CHECK(doc["bin_edges"].size() == 6);
    std::ifstream curves(artifact.string() + ".curves.tsv");
    std::string header;
    std::getline(curves, header);
    CHECK(header == "bin\ts_lo\ts_hi\te_out_a0\te_out_a1");
}
