#pragma once

#include <vector>

#include <Eigen/Dense>

namespace parity {

enum class ColumnKind { continuous, categorical };

// One observed variable: real measurements or integer-coded categories.
struct DataColumn {
    std::vector<double> values;
    ColumnKind kind = ColumnKind::continuous;

    std::size_t size() const { return values.size(); }
};

struct KernelSpec {
    enum class Kind { rbf, delta };
    Kind kind = Kind::rbf;
    double bandwidth = 1.0;  // rbf only, in units of the column

    static KernelSpec rbf(double bandwidth);
    static KernelSpec delta();
};

// n x n matrix of pairwise kernel evaluations. `centered` tracks whether the
// matrix has been conjugated by M_n = I - (1/n) 11^T.
struct GramMatrix {
    Eigen::MatrixXd entries;
    bool centered = false;

    Eigen::Index size() const { return entries.rows(); }
};

struct SymEig {
    Eigen::VectorXd values;   // descending
    Eigen::MatrixXd vectors;  // columns match values
};

double kernel_eval(const KernelSpec& spec, double u, double v);

// Median of pairwise absolute distances; falls back to the max distance, then
// to 1, when ties drive the median to zero.
double median_heuristic_bandwidth(const DataColumn& col);

// Default kernel for a column: rbf with the median heuristic for continuous
// data, delta for categorical codes.
KernelSpec default_kernel(const DataColumn& col);

GramMatrix gram(const DataColumn& col, const KernelSpec& spec);

GramMatrix center(const GramMatrix& g);

GramMatrix hadamard(const GramMatrix& k1, const GramMatrix& k2);

SymEig sym_eig(const Eigen::MatrixXd& s);

// Moore-Penrose pseudo-inverse of (K + lambda * M_n) with the rank-revealing
// cutoff n * eps * max|eigenvalue|.
Eigen::MatrixXd reg_pinv(const GramMatrix& k, double lambda);

}  // namespace parity
