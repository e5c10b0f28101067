#include <doctest.h>

#include <cmath>

#include "parity/kernels.hpp"
#include "parity/rng.hpp"

using namespace parity;

namespace {

DataColumn continuous(std::initializer_list<double> vals) {
    return DataColumn{std::vector<double>(vals), ColumnKind::continuous};
}

DataColumn categorical(std::initializer_list<double> vals) {
    return DataColumn{std::vector<double>(vals), ColumnKind::categorical};
}

DataColumn random_continuous(Rng& rng, std::size_t n) {
    DataColumn c;
    c.kind = ColumnKind::continuous;
    for (std::size_t i = 0; i < n; ++i) c.values.push_back(rng.normal());
    return c;
}

}  // namespace

TEST_CASE("kernel_eval basics") {
    const KernelSpec rbf = KernelSpec::rbf(1.0);
    CHECK(kernel_eval(rbf, 0.7, 0.7) == doctest::Approx(1.0));
    CHECK(kernel_eval(rbf, 0.0, 1.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    CHECK(kernel_eval(rbf, 0.0, 1.0) == doctest::Approx(0.60653).epsilon(1e-4));
    const KernelSpec delta = KernelSpec::delta();
    CHECK(kernel_eval(delta, 2.0, 3.0) == 0.0);
    CHECK(kernel_eval(delta, 2.0, 2.0) == 1.0);
    CHECK_THROWS_AS(KernelSpec::rbf(0.0), std::invalid_argument);
}

TEST_CASE("gram matrices") {
    SUBCASE("constant categorical column gives all ones") {
        const GramMatrix g = gram(categorical({3, 3, 3, 3}), KernelSpec::delta());
        CHECK(g.entries.isApprox(Eigen::MatrixXd::Ones(4, 4)));
        CHECK_FALSE(g.centered);
    }
    SUBCASE("single point") {
        DataColumn c = continuous({5.0});
        const GramMatrix g = gram(c, KernelSpec::rbf(2.0));
        CHECK(g.entries.rows() == 1);
        CHECK(g.entries(0, 0) == doctest::Approx(1.0));
    }
    SUBCASE("off-diagonals follow the formula") {
        const GramMatrix g = gram(continuous({0, 1, 2}), KernelSpec::rbf(1.0));
        CHECK(g.entries(0, 1) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
        CHECK(g.entries(0, 2) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
        CHECK(g.entries(1, 2) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    }
    SUBCASE("kind mismatch rejected") {
        CHECK_THROWS_AS(gram(categorical({1, 2}), KernelSpec::rbf(1.0)), std::invalid_argument);
        CHECK_THROWS_AS(gram(continuous({1, 2}), KernelSpec::delta()), std::invalid_argument);
    }
}

TEST_CASE("median heuristic") {
    CHECK(median_heuristic_bandwidth(continuous({0, 1, 2, 3})) > 0.0);
    // constant column falls back to a positive bandwidth
    CHECK(median_heuristic_bandwidth(continuous({2, 2, 2})) == doctest::Approx(1.0));
}

TEST_CASE("centering") {
    SUBCASE("annihilates constants") {
        GramMatrix ones;
        ones.entries = Eigen::MatrixXd::Ones(5, 5);
        const GramMatrix c = center(ones);
        CHECK(c.centered);
        CHECK(c.entries.cwiseAbs().maxCoeff() < 1e-14);
    }
    SUBCASE("hand-multiplied 2x2 identity") {
        GramMatrix g;
        g.entries = Eigen::MatrixXd::Identity(2, 2);
        const GramMatrix c = center(g);
        // M2 I M2 = M2 = [[.5, -.5], [-.5, .5]]
        CHECK(c.entries(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(c.entries(0, 1) == doctest::Approx(-0.5).epsilon(1e-14));
        CHECK(c.entries(1, 0) == doctest::Approx(-0.5).epsilon(1e-14));
        CHECK(c.entries(1, 1) == doctest::Approx(0.5).epsilon(1e-14));
    }
    SUBCASE("idempotent and row sums vanish") {
        Rng rng(11);
        const GramMatrix g = gram(random_continuous(rng, 40), KernelSpec::rbf(0.7));
        const GramMatrix c1 = center(g);
        const GramMatrix c2 = center(c1);
        const double scale = c1.entries.cwiseAbs().maxCoeff();
        CHECK((c1.entries - c2.entries).cwiseAbs().maxCoeff() <= 1e-12 * scale);
        CHECK(c1.entries.rowwise().sum().cwiseAbs().maxCoeff() <= 40 * 1e-10 * scale);
        CHECK(c1.entries.colwise().sum().cwiseAbs().maxCoeff() <= 40 * 1e-10 * scale);
    }
}

TEST_CASE("hadamard product") {
    GramMatrix a, b;
    a.entries.resize(2, 2);
    a.entries << 1, 2, 2, 1;
    b.entries.resize(2, 2);
    b.entries << 3, 0, 0, 3;
    const GramMatrix h = hadamard(a, b);
    CHECK(h.entries(0, 0) == 3.0);
    CHECK(h.entries(0, 1) == 0.0);
    CHECK(h.entries(1, 1) == 3.0);

    GramMatrix ones;
    ones.entries = Eigen::MatrixXd::Ones(2, 2);
    CHECK(hadamard(a, ones).entries.isApprox(a.entries));
    GramMatrix zero;
    zero.entries = Eigen::MatrixXd::Zero(2, 2);
    CHECK(hadamard(a, zero).entries.cwiseAbs().maxCoeff() == 0.0);

    GramMatrix wide;
    wide.entries = Eigen::MatrixXd::Ones(3, 3);
    CHECK_THROWS_AS(hadamard(a, wide), std::invalid_argument);
}

TEST_CASE("gram matrices are symmetric PSD") {
    Rng rng(3);
    for (int rep = 0; rep < 5; ++rep) {
        const DataColumn col = random_continuous(rng, 30);
        const GramMatrix g = gram(col, default_kernel(col));
        CHECK((g.entries - g.entries.transpose()).cwiseAbs().maxCoeff() == 0.0);
        const SymEig eig = sym_eig(g.entries);
        CHECK(eig.values.minCoeff() >= -1e-8 * g.entries.trace());
    }
    DataColumn cat;
    cat.kind = ColumnKind::categorical;
    for (int i = 0; i < 25; ++i) cat.values.push_back(static_cast<double>(i % 3));
    const GramMatrix g = gram(cat, KernelSpec::delta());
    const SymEig eig = sym_eig(g.entries);
    CHECK(eig.values.minCoeff() >= -1e-8 * g.entries.trace());
}

TEST_CASE("sym_eig") {
    SUBCASE("identity") {
        const SymEig e = sym_eig(Eigen::MatrixXd::Identity(3, 3));
        for (int i = 0; i < 3; ++i) CHECK(e.values(i) == doctest::Approx(1.0));
    }
    SUBCASE("diagonal") {
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
        d(0, 0) = 3.0;
        d(1, 1) = -1.0;
        const SymEig e = sym_eig(d);
        CHECK(e.values(0) == doctest::Approx(3.0));
        CHECK(e.values(1) == doctest::Approx(-1.0));
        CHECK(std::abs(e.vectors(0, 0)) == doctest::Approx(1.0));
        CHECK(std::abs(e.vectors(1, 1)) == doctest::Approx(1.0));
    }
    SUBCASE("characteristic polynomial by hand: [[2,1],[1,2]] -> 3, 1") {
        Eigen::MatrixXd s(2, 2);
        s << 2, 1, 1, 2;
        const SymEig e = sym_eig(s);
        CHECK(e.values(0) == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(e.values(1) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("reconstruction and orthonormality") {
        Rng rng(17);
        Eigen::MatrixXd m(8, 8);
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) m(i, j) = rng.normal();
        const Eigen::MatrixXd s = m + m.transpose();
        const SymEig e = sym_eig(s);
        const double norm = s.norm();
        const Eigen::MatrixXd rec = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
        CHECK((rec - s).norm() <= 1e-10 * norm);
        CHECK((e.vectors.transpose() * e.vectors - Eigen::MatrixXd::Identity(8, 8)).norm() <=
              1e-10);
    }
    SUBCASE("rejects asymmetric input") {
        Eigen::MatrixXd s(2, 2);
        s << 0, 1, 0, 0;
        CHECK_THROWS_AS(sym_eig(s), std::invalid_argument);
    }
}

TEST_CASE("reg_pinv") {
    SUBCASE("zero matrix gives scaled centering projector") {
        GramMatrix zero;
        zero.entries = Eigen::MatrixXd::Zero(2, 2);
        zero.centered = true;
        const Eigen::MatrixXd p = reg_pinv(zero, 2.0);
        Eigen::MatrixXd m2(2, 2);
        m2 << 0.5, -0.5, -0.5, 0.5;
        CHECK((p - m2 / 2.0).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("pseudo-inverse axiom on random and fixed inputs") {
        GramMatrix d3;
        d3.entries = Eigen::Vector3d(1, 2, 3).asDiagonal();
        const GramMatrix k = center(d3);
        const double lambda = 0.1;
        const Eigen::MatrixXd pinv = reg_pinv(k, lambda);
        Eigen::MatrixXd m = Eigen::MatrixXd::Identity(3, 3);
        m.array() -= 1.0 / 3.0;
        const Eigen::MatrixXd e = k.entries + lambda * m;
        CHECK((e * pinv * e - e).cwiseAbs().maxCoeff() <= 1e-8);
        CHECK((pinv - pinv.transpose()).cwiseAbs().maxCoeff() <= 1e-12);

        Rng rng(23);
        const GramMatrix g = center(gram(random_continuous(rng, 20), KernelSpec::rbf(1.0)));
        const Eigen::MatrixXd pinv2 = reg_pinv(g, 1e-3);
        Eigen::MatrixXd m20 = Eigen::MatrixXd::Identity(20, 20);
        m20.array() -= 1.0 / 20.0;
        const Eigen::MatrixXd e2 = g.entries + 1e-3 * m20;
        CHECK((e2 * pinv2 * e2 - e2).cwiseAbs().maxCoeff() <= 1e-8);
    }
    SUBCASE("requires centered input and positive lambda") {
        GramMatrix g;
        g.entries = Eigen::MatrixXd::Identity(2, 2);
        CHECK_THROWS_AS(reg_pinv(g, 1.0), std::invalid_argument);
        g.centered = true;
        CHECK_THROWS_AS(reg_pinv(g, 0.0), std::invalid_argument);
    }
}
