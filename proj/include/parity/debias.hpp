#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace parity {

// Orthonormal basis of the estimated bias subspace (column span).
struct BiasSubspace {
    Eigen::MatrixXd basis;  // d x r, orthonormal columns

    Eigen::Index dim() const { return basis.rows(); }
    Eigen::Index rank() const { return basis.cols(); }
};

// Top-r principal components of the mean-centered pairwise differences v - w.
BiasSubspace estimate_bias_subspace(
    const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& pairs, int rank);

// Orthonormalized span of the given direction columns (for a known coefficient
// matrix rather than matched pairs).
BiasSubspace bias_subspace_from_directions(const Eigen::MatrixXd& directions);

// x - B (B^T x): projection onto the orthocomplement of the bias subspace.
Eigen::VectorXd project_out(const Eigen::VectorXd& x, const BiasSubspace& subspace);

}  // namespace parity
