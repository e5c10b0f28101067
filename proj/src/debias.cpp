#include "parity/debias.hpp"

#include <limits>
#include <stdexcept>

namespace parity {

BiasSubspace estimate_bias_subspace(
    const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& pairs, int rank) {
    if (rank < 0) throw std::invalid_argument("estimate_bias_subspace: negative rank");
    if (pairs.empty()) throw std::invalid_argument("estimate_bias_subspace: no pairs");
    const Eigen::Index d = pairs.front().first.size();
    if (static_cast<Eigen::Index>(pairs.size()) < std::max(rank, 1))
        throw std::invalid_argument("estimate_bias_subspace: fewer pairs than rank");

    Eigen::MatrixXd diffs(static_cast<Eigen::Index>(pairs.size()), d);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& [v, w] = pairs[i];
        if (v.size() != d || w.size() != d)
            throw std::invalid_argument("estimate_bias_subspace: dimension mismatch");
        diffs.row(static_cast<Eigen::Index>(i)) = (v - w).transpose();
    }
    diffs.rowwise() -= diffs.colwise().mean();

    if (rank == 0) return BiasSubspace{Eigen::MatrixXd::Zero(d, 0)};

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(diffs, Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double cutoff = std::max(diffs.rows(), diffs.cols()) *
                          std::numeric_limits<double>::epsilon() * sv(0);
    Eigen::Index effective = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++effective;
    if (rank > effective)
        throw std::invalid_argument("estimate_bias_subspace: rank " + std::to_string(rank) +
                                    " exceeds difference rank " + std::to_string(effective));
    return BiasSubspace{svd.matrixV().leftCols(rank)};
}

BiasSubspace bias_subspace_from_directions(const Eigen::MatrixXd& directions) {
    if (directions.cols() == 0)
        return BiasSubspace{Eigen::MatrixXd::Zero(directions.rows(), 0)};
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(directions, Eigen::ComputeThinU);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double cutoff = std::max(directions.rows(), directions.cols()) *
                          std::numeric_limits<double>::epsilon() * sv(0);
    Eigen::Index effective = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++effective;
    return BiasSubspace{svd.matrixU().leftCols(effective)};
}

Eigen::VectorXd project_out(const Eigen::VectorXd& x, const BiasSubspace& subspace) {
    if (subspace.rank() == 0) return x;
    if (x.size() != subspace.dim())
        throw std::invalid_argument("project_out: dimension mismatch");
    return x - subspace.basis * (subspace.basis.transpose() * x);
}

}  // namespace parity
