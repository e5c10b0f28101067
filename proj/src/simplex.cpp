#include "parity/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace parity {

const char* to_string(LpStatus status) {
    switch (status) {
        case LpStatus::optimal: return "optimal";
        case LpStatus::infeasible: return "infeasible";
        case LpStatus::unbounded: return "unbounded";
    }
    return "unknown";
}

namespace {

constexpr double kPivotTol = 1e-10;
constexpr int kBlandTrigger = 32;  // consecutive degenerate pivots before switching to Bland

struct Tableau {
    Eigen::MatrixXd a;          // m x n, kept as B^{-1} A by the pivots
    Eigen::VectorXd b;          // m, kept as B^{-1} b
    std::vector<int> basis;     // basic column per row

    void pivot(int row, int col) {
        const double piv = a(row, col);
        a.row(row) /= piv;
        b(row) /= piv;
        for (Eigen::Index r = 0; r < a.rows(); ++r) {
            if (r == row) continue;
            const double factor = a(r, col);
            if (factor == 0.0) continue;
            a.row(r) -= factor * a.row(row);
            b(r) -= factor * b(row);
        }
        basis[static_cast<std::size_t>(row)] = col;
    }
};

enum class IterateResult { optimal, unbounded };

// Primal simplex iterations on the tableau for cost vector `cost` restricted
// to columns [0, active_cols). Dantzig entering with lowest-index tie-break;
// after a degenerate streak the entering rule drops to pure Bland.
IterateResult iterate(Tableau& t, const Eigen::VectorXd& cost, Eigen::Index active_cols) {
    const Eigen::Index m = t.a.rows();
    const double cost_scale = 1.0 + cost.cwiseAbs().maxCoeff();
    const double reduced_tol = 1e-9 * cost_scale;
    int degenerate_streak = 0;

    while (true) {
        // reduced costs: c_j - c_B . (B^{-1} A)_j
        Eigen::VectorXd dual = Eigen::VectorXd::Zero(m);
        for (Eigen::Index r = 0; r < m; ++r) dual(r) = cost(t.basis[static_cast<std::size_t>(r)]);

        const bool bland = degenerate_streak >= kBlandTrigger;
        int enter = -1;
        double best = -reduced_tol;
        for (Eigen::Index j = 0; j < active_cols; ++j) {
            const double red = cost(j) - dual.dot(t.a.col(j));
            if (red < -reduced_tol) {
                if (bland) { enter = static_cast<int>(j); break; }
                if (red < best) { best = red; enter = static_cast<int>(j); }
            }
        }
        if (enter < 0) return IterateResult::optimal;

        // ratio test, ties broken by lowest basic-variable index (Bland)
        int leave = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (Eigen::Index r = 0; r < m; ++r) {
            const double arj = t.a(r, enter);
            if (arj <= kPivotTol) continue;
            const double ratio = t.b(r) / arj;
            const double tie = leave < 0 ? 0.0 : 1e-12 * (1.0 + std::abs(best_ratio));
            if (leave < 0 || ratio < best_ratio - tie) {
                best_ratio = ratio;
                leave = static_cast<int>(r);
            } else if (ratio <= best_ratio + tie && t.basis[static_cast<std::size_t>(r)] <
                                                        t.basis[static_cast<std::size_t>(leave)]) {
                leave = static_cast<int>(r);
            }
        }
        if (leave < 0) return IterateResult::unbounded;

        if (best_ratio <= 1e-12)
            ++degenerate_streak;
        else
            degenerate_streak = 0;
        t.pivot(leave, enter);
    }
}

// Gaussian elimination on [a | b]; returns per-row flags: 0 keep, 1 redundant,
// 2 inconsistent.
std::vector<int> classify_equalities(Eigen::MatrixXd a, Eigen::VectorXd b) {
    const Eigen::Index m = a.rows();
    const Eigen::Index n = a.cols();
    std::vector<int> flag(static_cast<std::size_t>(m), 0);
    if (m == 0) return flag;
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    const double rhs_scale = 1.0 + b.cwiseAbs().maxCoeff();
    const double coef_tol = 1e-10 * scale;
    const double rhs_tol = 1e-9 * rhs_scale;

    std::vector<bool> row_done(static_cast<std::size_t>(m), false);
    for (Eigen::Index col = 0; col < n; ++col) {
        int pivot_row = -1;
        double pivot_val = coef_tol;
        for (Eigen::Index r = 0; r < m; ++r) {
            if (row_done[static_cast<std::size_t>(r)]) continue;
            if (std::abs(a(r, col)) > pivot_val) {
                pivot_val = std::abs(a(r, col));
                pivot_row = static_cast<int>(r);
            }
        }
        if (pivot_row < 0) continue;
        row_done[static_cast<std::size_t>(pivot_row)] = true;
        for (Eigen::Index r = 0; r < m; ++r) {
            if (row_done[static_cast<std::size_t>(r)] || a(r, col) == 0.0) continue;
            const double factor = a(r, col) / a(pivot_row, col);
            a.row(r) -= factor * a.row(pivot_row);
            b(r) -= factor * b(pivot_row);
        }
    }
    for (Eigen::Index r = 0; r < m; ++r) {
        if (row_done[static_cast<std::size_t>(r)]) continue;
        if (a.row(r).cwiseAbs().maxCoeff() <= coef_tol)
            flag[static_cast<std::size_t>(r)] = std::abs(b(r)) <= rhs_tol ? 1 : 2;
    }
    return flag;
}

}  // namespace

LpSolution solve(const LpProblem& problem) {
    const Eigen::Index n = problem.num_vars();
    if (n == 0) throw std::invalid_argument("lp: no variables");
    const Eigen::Index me = problem.a_eq.rows();
    const Eigen::Index mu = problem.a_ub.rows();
    if (me > 0 && problem.a_eq.cols() != n) throw std::invalid_argument("lp: a_eq width mismatch");
    if (mu > 0 && problem.a_ub.cols() != n) throw std::invalid_argument("lp: a_ub width mismatch");
    if (problem.b_eq.size() != me || problem.b_ub.size() != mu)
        throw std::invalid_argument("lp: rhs length mismatch");
    if (!problem.b_eq.allFinite() || !problem.b_ub.allFinite())
        throw std::invalid_argument("lp: rhs must be finite");
    if (!problem.bounds.empty() && static_cast<Eigen::Index>(problem.bounds.size()) != n)
        throw std::invalid_argument("lp: bounds length mismatch");

    const auto bound = [&](Eigen::Index j) -> std::pair<double, double> {
        if (problem.bounds.empty()) return {0.0, std::numeric_limits<double>::infinity()};
        return problem.bounds[static_cast<std::size_t>(j)];
    };
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto [lo, hi] = bound(j);
        if (!(lo >= 0.0) || hi < lo) throw std::invalid_argument("lp: bad variable bounds");
    }

    // shift x = lo + u (u >= 0); fixed variables (lo == hi) leave the system
    std::vector<Eigen::Index> free_idx;
    Eigen::VectorXd shift(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto [lo, hi] = bound(j);
        shift(j) = lo;
        if (hi > lo) free_idx.push_back(j);
    }
    const auto nf = static_cast<Eigen::Index>(free_idx.size());
    Eigen::Index n_extra_ub = 0;
    for (Eigen::Index j : free_idx)
        if (std::isfinite(bound(j).second)) ++n_extra_ub;

    Eigen::MatrixXd eq = Eigen::MatrixXd::Zero(me, nf);
    Eigen::VectorXd eq_b = problem.b_eq;
    if (me > 0) eq_b -= problem.a_eq * shift;
    Eigen::MatrixXd ub = Eigen::MatrixXd::Zero(mu + n_extra_ub, nf);
    Eigen::VectorXd ub_b(mu + n_extra_ub);
    if (mu > 0) ub_b.head(mu) = problem.b_ub - problem.a_ub * shift;
    for (Eigen::Index k = 0; k < nf; ++k) {
        if (me > 0) eq.col(k) = problem.a_eq.col(free_idx[static_cast<std::size_t>(k)]);
        if (mu > 0) ub.col(k).head(mu) = problem.a_ub.col(free_idx[static_cast<std::size_t>(k)]);
    }
    Eigen::Index row = mu;
    for (Eigen::Index k = 0; k < nf; ++k) {
        const auto [lo, hi] = bound(free_idx[static_cast<std::size_t>(k)]);
        if (std::isfinite(hi)) {
            ub(row, k) = 1.0;
            ub_b(row) = hi - lo;
            ++row;
        }
    }

    LpSolution sol;
    const double b_scale =
        1.0 + std::max(me > 0 ? problem.b_eq.cwiseAbs().maxCoeff() : 0.0,
                       mu > 0 ? problem.b_ub.cwiseAbs().maxCoeff() : 0.0);
    const double feas_tol = 1e-9 * b_scale;

    // redundant equality rows are dropped; inconsistent ones end the solve
    const std::vector<int> flags = classify_equalities(eq, eq_b);
    std::vector<Eigen::Index> kept_eq;
    for (Eigen::Index r = 0; r < me; ++r) {
        if (flags[static_cast<std::size_t>(r)] == 2) {
            sol.status = LpStatus::infeasible;
            return sol;
        }
        if (flags[static_cast<std::size_t>(r)] == 0) kept_eq.push_back(r);
    }

    const auto m_eq = static_cast<Eigen::Index>(kept_eq.size());
    const Eigen::Index m_ub = ub.rows();
    const Eigen::Index m = m_eq + m_ub;
    const Eigen::Index n_slack = m_ub;

    // columns: structural | slack | artificial
    std::vector<Eigen::Index> art_rows;
    {
        Eigen::MatrixXd a0(m, nf + n_slack);
        Eigen::VectorXd b0(m);
        for (Eigen::Index r = 0; r < m_eq; ++r) {
            a0.row(r).head(nf) = eq.row(kept_eq[static_cast<std::size_t>(r)]);
            a0.row(r).tail(n_slack).setZero();
            b0(r) = eq_b(kept_eq[static_cast<std::size_t>(r)]);
        }
        for (Eigen::Index r = 0; r < m_ub; ++r) {
            a0.row(m_eq + r).head(nf) = ub.row(r);
            a0.row(m_eq + r).tail(n_slack).setZero();
            a0(m_eq + r, nf + r) = 1.0;
            b0(m_eq + r) = ub_b(r);
        }
        for (Eigen::Index r = 0; r < m; ++r) {
            if (b0(r) < 0.0) {
                a0.row(r) = -a0.row(r);
                b0(r) = -b0(r);
            }
        }
        // slack columns still at +1 can start in the basis; others need artificials
        std::vector<int> basis(static_cast<std::size_t>(m), -1);
        for (Eigen::Index r = m_eq; r < m; ++r)
            if (a0(r, nf + (r - m_eq)) > 0.5) basis[static_cast<std::size_t>(r)] =
                static_cast<int>(nf + (r - m_eq));
        for (Eigen::Index r = 0; r < m; ++r)
            if (basis[static_cast<std::size_t>(r)] < 0) art_rows.push_back(r);

        const auto n_art = static_cast<Eigen::Index>(art_rows.size());
        Tableau t;
        t.a = Eigen::MatrixXd::Zero(m, nf + n_slack + n_art);
        t.a.leftCols(nf + n_slack) = a0;
        t.b = b0;
        t.basis = basis;
        for (Eigen::Index k = 0; k < n_art; ++k) {
            const Eigen::Index r = art_rows[static_cast<std::size_t>(k)];
            t.a(r, nf + n_slack + k) = 1.0;
            t.basis[static_cast<std::size_t>(r)] = static_cast<int>(nf + n_slack + k);
        }

        if (n_art > 0) {
            Eigen::VectorXd phase1_cost = Eigen::VectorXd::Zero(t.a.cols());
            phase1_cost.tail(n_art).setOnes();
            const IterateResult r1 = iterate(t, phase1_cost, t.a.cols());
            (void)r1;  // phase 1 is always bounded below by 0
            double art_sum = 0.0;
            for (Eigen::Index r = 0; r < m; ++r)
                if (t.basis[static_cast<std::size_t>(r)] >= nf + n_slack) art_sum += t.b(r);
            if (art_sum > feas_tol) {
                sol.status = LpStatus::infeasible;
                return sol;
            }
            // pivot zero-level artificials out; rows with no eligible pivot are redundant
            std::vector<bool> drop(static_cast<std::size_t>(m), false);
            for (Eigen::Index r = 0; r < m; ++r) {
                if (t.basis[static_cast<std::size_t>(r)] < nf + n_slack) continue;
                int col = -1;
                for (Eigen::Index j = 0; j < nf + n_slack; ++j) {
                    if (std::abs(t.a(r, j)) > 1e-8) { col = static_cast<int>(j); break; }
                }
                if (col >= 0)
                    t.pivot(static_cast<int>(r), col);
                else
                    drop[static_cast<std::size_t>(r)] = true;
            }
            Eigen::Index mk = 0;
            for (Eigen::Index r = 0; r < m; ++r)
                if (!drop[static_cast<std::size_t>(r)]) ++mk;
            if (mk < m) {
                Eigen::MatrixXd a2(mk, nf + n_slack);
                Eigen::VectorXd b2(mk);
                std::vector<int> basis2;
                Eigen::Index w = 0;
                for (Eigen::Index r = 0; r < m; ++r) {
                    if (drop[static_cast<std::size_t>(r)]) continue;
                    a2.row(w) = t.a.row(r).head(nf + n_slack);
                    b2(w) = t.b(r);
                    basis2.push_back(t.basis[static_cast<std::size_t>(r)]);
                    ++w;
                }
                t.a = std::move(a2);
                t.b = std::move(b2);
                t.basis = std::move(basis2);
            } else {
                t.a = t.a.leftCols(nf + n_slack).eval();
            }
        }

        // phase 2
        Eigen::VectorXd cost = Eigen::VectorXd::Zero(nf + n_slack);
        for (Eigen::Index k = 0; k < nf; ++k)
            cost(k) = problem.c(free_idx[static_cast<std::size_t>(k)]);
        if (iterate(t, cost, nf + n_slack) == IterateResult::unbounded) {
            sol.status = LpStatus::unbounded;
            return sol;
        }

        Eigen::VectorXd u = Eigen::VectorXd::Zero(nf + n_slack);
        for (std::size_t r = 0; r < t.basis.size(); ++r)
            u(t.basis[r]) = t.b(static_cast<Eigen::Index>(r));
        sol.x = shift;
        for (Eigen::Index k = 0; k < nf; ++k)
            sol.x(free_idx[static_cast<std::size_t>(k)]) += std::max(u(k), 0.0);
    }

    sol.status = LpStatus::optimal;
    sol.objective = problem.c.dot(sol.x);
    double viol = 0.0;
    if (me > 0) viol = (problem.a_eq * sol.x - problem.b_eq).cwiseAbs().maxCoeff();
    if (mu > 0)
        viol = std::max(viol, (problem.a_ub * sol.x - problem.b_ub).cwiseMax(0.0).maxCoeff());
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto [lo, hi] = bound(j);
        viol = std::max(viol, lo - sol.x(j));
        if (std::isfinite(hi)) viol = std::max(viol, sol.x(j) - hi);
    }
    sol.max_violation = std::max(viol, 0.0);
    return sol;
}

}  // namespace parity
