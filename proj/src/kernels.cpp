#include "parity/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace parity {

KernelSpec KernelSpec::rbf(double bandwidth) {
    if (!(bandwidth > 0.0)) throw std::invalid_argument("rbf bandwidth must be positive");
    return KernelSpec{Kind::rbf, bandwidth};
}

KernelSpec KernelSpec::delta() { return KernelSpec{Kind::delta, 1.0}; }

double kernel_eval(const KernelSpec& spec, double u, double v) {
    switch (spec.kind) {
        case KernelSpec::Kind::rbf: {
            const double d = u - v;
            return std::exp(-d * d / (2.0 * spec.bandwidth * spec.bandwidth));
        }
        case KernelSpec::Kind::delta:
            return u == v ? 1.0 : 0.0;
    }
    throw std::logic_error("kernel_eval: unknown kernel kind");
}

double median_heuristic_bandwidth(const DataColumn& col) {
    const std::size_t n = col.values.size();
    if (n < 2) return 1.0;
    std::vector<double> dists;
    dists.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            dists.push_back(std::abs(col.values[i] - col.values[j]));
    std::sort(dists.begin(), dists.end());
    double med = dists.size() % 2 == 1
                     ? dists[dists.size() / 2]
                     : 0.5 * (dists[dists.size() / 2 - 1] + dists[dists.size() / 2]);
    if (med <= 0.0) med = dists.back();
    if (med <= 0.0) med = 1.0;
    return med;
}

KernelSpec default_kernel(const DataColumn& col) {
    if (col.kind == ColumnKind::categorical) return KernelSpec::delta();
    return KernelSpec::rbf(median_heuristic_bandwidth(col));
}

GramMatrix gram(const DataColumn& col, const KernelSpec& spec) {
    const auto n = static_cast<Eigen::Index>(col.values.size());
    if (n == 0) throw std::invalid_argument("gram: empty column");
    const bool cat = col.kind == ColumnKind::categorical;
    if (cat && spec.kind == KernelSpec::Kind::rbf)
        throw std::invalid_argument("gram: rbf kernel on a categorical column");
    if (!cat && spec.kind == KernelSpec::Kind::delta)
        throw std::invalid_argument("gram: delta kernel on a continuous column");
    GramMatrix g;
    g.entries.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        g.entries(i, i) = kernel_eval(spec, col.values[i], col.values[i]);
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = kernel_eval(spec, col.values[i], col.values[j]);
            g.entries(i, j) = v;
            g.entries(j, i) = v;
        }
    }
    g.centered = false;
    return g;
}

GramMatrix center(const GramMatrix& g) {
    GramMatrix out;
    const Eigen::VectorXd row_means = g.entries.rowwise().mean();
    const double total_mean = row_means.mean();
    // M G M = G - r 1^T - 1 r^T + m 11^T  with r the row means, m the grand mean
    out.entries = g.entries;
    out.entries.colwise() -= row_means;
    out.entries.rowwise() -= row_means.transpose();
    out.entries.array() += total_mean;
    out.entries = 0.5 * (out.entries + out.entries.transpose()).eval();
    out.centered = true;
    return out;
}

GramMatrix hadamard(const GramMatrix& k1, const GramMatrix& k2) {
    if (k1.size() != k2.size()) throw std::invalid_argument("hadamard: dimension mismatch");
    GramMatrix out;
    out.entries = k1.entries.cwiseProduct(k2.entries);
    out.centered = false;
    return out;
}

SymEig sym_eig(const Eigen::MatrixXd& s) {
    if (s.rows() != s.cols()) throw std::invalid_argument("sym_eig: matrix not square");
    const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
    const double asym = (s - s.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-9 * scale) throw std::invalid_argument("sym_eig: matrix not symmetric");
    const Eigen::MatrixXd sym = 0.5 * (s + s.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    if (eig.info() != Eigen::Success) throw std::runtime_error("sym_eig: eigensolver failed");
    const Eigen::Index n = s.rows();
    SymEig out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {  // ascending -> descending
        out.values(i) = eig.eigenvalues()(n - 1 - i);
        out.vectors.col(i) = eig.eigenvectors().col(n - 1 - i);
    }
    return out;
}

Eigen::MatrixXd reg_pinv(const GramMatrix& k, double lambda) {
    if (!k.centered) throw std::invalid_argument("reg_pinv: Gram matrix must be centered");
    if (!(lambda > 0.0)) throw std::invalid_argument("reg_pinv: lambda must be positive");
    const Eigen::Index n = k.size();
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    m.array() -= 1.0 / static_cast<double>(n);
    const Eigen::MatrixXd e = k.entries + lambda * m;
    const SymEig eig = sym_eig(e);
    const double cutoff = static_cast<double>(n) * std::numeric_limits<double>::epsilon() *
                          eig.values.cwiseAbs().maxCoeff();
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i)
        if (std::abs(eig.values(i)) > cutoff) inv(i) = 1.0 / eig.values(i);
    Eigen::MatrixXd out = eig.vectors * inv.asDiagonal() * eig.vectors.transpose();
    out = 0.5 * (out + out.transpose()).eval();
    return out;
}

}  // namespace parity
