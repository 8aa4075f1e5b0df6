#pragma once

#include <Eigen/Dense>
#include <vector>

namespace wpg {

/// Dense convex QP:  min ½ xᵀH x + fᵀx   s.t.  A_eq x = b_eq,  A_in x ≤ b_in.
/// H must be symmetric positive semidefinite (diagonal regularization is
/// applied internally when the Cholesky factorization reports trouble);
/// A_eq rows are assumed linearly independent.
struct QpProblem {
  Eigen::MatrixXd H;
  Eigen::VectorXd f;
  Eigen::MatrixXd A_eq;  // p x n (may have zero rows)
  Eigen::VectorXd b_eq;
  Eigen::MatrixXd A_in;  // q x n (may have zero rows)
  Eigen::VectorXd b_in;

  int n() const { return static_cast<int>(f.size()); }
  int p() const { return static_cast<int>(b_eq.size()); }
  int q() const { return static_cast<int>(b_in.size()); }
};

enum class QpStatus { Optimal, Infeasible, IterationLimit };

const char* to_string(QpStatus s);

struct QpSolution {
  Eigen::VectorXd x;
  QpStatus status = QpStatus::Infeasible;
  std::vector<int> active_set;  // inequality rows active at the solution, sorted
  double objective = 0.0;       // ½ xᵀH x + fᵀx at the returned x
  Eigen::VectorXd lambda_eq;    // equality multipliers
  Eigen::VectorXd mu_in;        // inequality multipliers (≥ 0, zero off the active set)
  int iterations = 0;
};

/// Cholesky factorization of a (regularized) Hessian, reusable across solves
/// that share H — receding-horizon problems refresh only f and the bounds.
struct HessianFactor {
  Eigen::LLT<Eigen::MatrixXd> llt;
  Eigen::MatrixXd Hreg;  // the matrix the factorization corresponds to
};

/// Factors H, escalating a diagonal regularization until LLT succeeds.
/// Throws std::runtime_error when H cannot be made positive definite.
HessianFactor factor_hessian(const Eigen::MatrixXd& H);

/// Primal active-set solve. `warm_start` is an optional guess of the optimal
/// active inequality set (e.g. from the previous control cycle); an unusable
/// guess silently falls back to a cold start. Infeasibility is decided by a
/// phase-1 pass, not by iteration exhaustion.
QpSolution solve(const QpProblem& problem, const std::vector<int>* warm_start = nullptr);

/// Same solve against a caller-held factorization of problem.H.
QpSolution solve(const QpProblem& problem, const HessianFactor& factor,
                 const std::vector<int>* warm_start = nullptr);

/// Max-norm KKT residual of a candidate primal/dual pair: stationarity,
/// primal feasibility, dual feasibility and complementary slackness.
double kkt_residual(const QpProblem& problem, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& lambda_eq, const Eigen::VectorXd& mu_in);

}  // namespace wpg
