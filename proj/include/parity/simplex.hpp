#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace parity {

// min c.x  s.t.  a_eq x = b_eq,  a_ub x <= b_ub,  lo <= x <= hi.
// Empty `bounds` means [0, +inf) for every variable.
struct LpProblem {
    Eigen::VectorXd c;
    Eigen::MatrixXd a_eq;
    Eigen::VectorXd b_eq;
    Eigen::MatrixXd a_ub;
    Eigen::VectorXd b_ub;
    std::vector<std::pair<double, double>> bounds;

    Eigen::Index num_vars() const { return c.size(); }
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
    Eigen::VectorXd x;
    double objective = 0.0;
    LpStatus status = LpStatus::infeasible;
    double max_violation = 0.0;
};

const char* to_string(LpStatus status);

// Two-phase dense primal simplex. Deterministic; degenerate pivots fall back
// to Bland's lowest-index rule, so the solve always terminates.
LpSolution solve(const LpProblem& problem);

}  // namespace parity
