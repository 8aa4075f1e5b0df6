#include "wpg/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace wpg {

const char* to_string(QpStatus s) {
  switch (s) {
    case QpStatus::Optimal: return "optimal";
    case QpStatus::Infeasible: return "infeasible";
    case QpStatus::IterationLimit: return "iterlimit";
  }
  return "?";
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void check_dimensions(const QpProblem& pr) {
  const int n = pr.n();
  if (n < 1 || pr.H.rows() != n || pr.H.cols() != n) {
    throw std::invalid_argument("qp: H must be n x n with n >= 1");
  }
  if (pr.p() > 0 && pr.A_eq.cols() != n) {
    throw std::invalid_argument("qp: A_eq column count does not match n");
  }
  if (pr.A_eq.rows() != pr.p()) {
    throw std::invalid_argument("qp: A_eq/b_eq row mismatch");
  }
  if (pr.q() > 0 && pr.A_in.cols() != n) {
    throw std::invalid_argument("qp: A_in column count does not match n");
  }
  if (pr.A_in.rows() != pr.q()) {
    throw std::invalid_argument("qp: A_in/b_in row mismatch");
  }
}

}  // namespace

// Cholesky of H with escalating diagonal regularization. The nominal path
// (strictly convex H) factors cleanly and stays exact; Hreg records the
// matrix that was actually factored so gradients stay consistent with it.
HessianFactor factor_hessian(const MatrixXd& H) {
  HessianFactor out;
  out.Hreg = 0.5 * (H + H.transpose());
  out.llt.compute(out.Hreg);
  if (out.llt.info() == Eigen::Success) {
    return out;
  }
  const MatrixXd base = out.Hreg;
  const double scale = std::max(1.0, base.diagonal().cwiseAbs().maxCoeff());
  double reg = 1e-9 * scale;
  for (int attempt = 0; attempt < 14; ++attempt) {
    out.Hreg = base + reg * MatrixXd::Identity(H.rows(), H.cols());
    out.llt.compute(out.Hreg);
    if (out.llt.info() == Eigen::Success) {
      return out;
    }
    reg *= 10.0;
  }
  throw std::runtime_error("qp: Hessian could not be factored even with regularization");
}

namespace {

struct LoopResult {
  QpStatus status = QpStatus::IterationLimit;
  VectorXd lambda;  // multipliers for [A_eq; A_in[W]] at the last EQP solve
};

// Primal active-set iteration. `x` must be feasible on entry (equalities
// exactly, inequalities up to a small tolerance); `work` holds the active
// inequality row indices and is updated in place. Hreg is the (regularized)
// matrix the factorization corresponds to.
LoopResult active_set_loop(const Eigen::LLT<MatrixXd>& llt, const MatrixXd& Hreg,
                           const VectorXd& f, const MatrixXd& A_eq,
                           const MatrixXd& A_in, const VectorXd& b_in, VectorXd& x,
                           std::vector<int>& work, int iter_limit, int& iterations) {
  const int n = static_cast<int>(x.size());
  const int p = static_cast<int>(A_eq.rows());
  const int q = static_cast<int>(A_in.rows());
  const MatrixXd& L = llt.matrixL();

  LoopResult out;
  while (iterations < iter_limit) {
    ++iterations;
    const int m = p + static_cast<int>(work.size());
    const VectorXd g = Hreg * x + f;

    VectorXd y = L.triangularView<Eigen::Lower>().solve(g);
    VectorXd p_step(n);
    VectorXd lambda;
    if (m == 0) {
      p_step = -L.transpose().triangularView<Eigen::Upper>().solve(y);
    } else {
      MatrixXd Mt(n, m);  // columns are working-constraint rows
      for (int r = 0; r < p; ++r) Mt.col(r) = A_eq.row(r).transpose();
      for (size_t k = 0; k < work.size(); ++k) {
        Mt.col(p + static_cast<int>(k)) = A_in.row(work[k]).transpose();
      }
      MatrixXd R = L.triangularView<Eigen::Lower>().solve(Mt);
      MatrixXd K = R.transpose() * R;
      lambda = K.ldlt().solve(-R.transpose() * y);
      p_step = -L.transpose().triangularView<Eigen::Upper>().solve(y + R * lambda);
    }

    // Stationary once the step is negligible or its predicted objective
    // decrease falls below the objective's own floating-point resolution
    // (ill-conditioned Hessians leave noise steps far larger than 1e-11).
    const double pred_dec = -(g.dot(p_step) + 0.5 * p_step.dot(Hreg * p_step));
    const double obj_scale =
        1.0 + std::abs(0.5 * x.dot(g + f)) + std::abs(x.dot(g)) + std::abs(g.dot(p_step));
    if (p_step.lpNorm<Eigen::Infinity>() <= 1e-11 * (1.0 + x.lpNorm<Eigen::Infinity>()) ||
        pred_dec <= 1e-15 * obj_scale) {
      // Stationary on the working set; check inequality multipliers.
      int worst = -1;
      double worst_mu = -1e-10 * (1.0 + (m > 0 ? lambda.lpNorm<Eigen::Infinity>() : 0.0));
      for (size_t k = 0; k < work.size(); ++k) {
        const double mu = lambda[p + static_cast<int>(k)];
        if (mu < worst_mu) {
          worst_mu = mu;
          worst = static_cast<int>(k);
        }
      }
      if (worst < 0) {
        out.status = QpStatus::Optimal;
        out.lambda = lambda;
        return out;
      }
      work.erase(work.begin() + worst);
      continue;
    }

    // Line search toward the EQP optimum, stopping at the nearest blocking row.
    double alpha = 1.0;
    int block = -1;
    for (int i = 0; i < q; ++i) {
      if (std::find(work.begin(), work.end(), i) != work.end()) continue;
      const double d = A_in.row(i).dot(p_step);
      if (d <= 1e-13 * (1.0 + A_in.row(i).cwiseAbs().maxCoeff()) *
                    (1.0 + p_step.lpNorm<Eigen::Infinity>())) {
        continue;  // moving away from (or along) this face
      }
      const double a = std::max(0.0, (b_in[i] - A_in.row(i).dot(x)) / d);
      if (a < alpha) {
        alpha = a;
        block = i;
      }
    }
    x += alpha * p_step;
    if (block >= 0) {
      work.push_back(block);
    }
    out.lambda = lambda;
  }
  return out;  // IterationLimit
}

// Minimum-norm point on the equality manifold (x = A_eqᵀ(A_eq A_eqᵀ)⁻¹ b_eq).
VectorXd equality_point(const QpProblem& pr) {
  if (pr.p() == 0) {
    return VectorXd::Zero(pr.n());
  }
  const MatrixXd G = pr.A_eq * pr.A_eq.transpose();
  const VectorXd w = G.ldlt().solve(pr.b_eq);
  return pr.A_eq.transpose() * w;
}

double max_violation(const QpProblem& pr, const VectorXd& x) {
  if (pr.q() == 0) return 0.0;
  return ((pr.A_in * x - pr.b_in).array()).maxCoeff();
}

// Iterated minimum-norm projection onto the violated inequality boundaries,
// preserving the equalities exactly. Covers the common cold start — a batch
// of violated bound rows — at the cost of one small Gram solve per pass,
// without the phase-1 slack program. Returns false when it cannot certify a
// feasible point; the caller then falls back to phase-1.
bool cheap_restore(const QpProblem& pr, VectorXd& x) {
  const int n = pr.n();
  const int q = pr.q();
  for (int pass = 0; pass < 8; ++pass) {
    std::vector<int> fix;
    double worst = 0.0;
    for (int i = 0; i < q; ++i) {
      const double nrm = pr.A_in.row(i).norm();
      if (nrm <= 1e-14) {
        if (pr.b_in[i] < -1e-12) return false;  // 0 <= b_i violated
        continue;
      }
      const double viol = (pr.A_in.row(i).dot(x) - pr.b_in[i]) / nrm;
      worst = std::max(worst, viol);
      if (viol > 1e-13) fix.push_back(i);
    }
    if (worst <= 1e-11) return true;
    const int m = pr.p() + static_cast<int>(fix.size());
    if (fix.empty() || m > n) return false;
    MatrixXd M(m, n);
    VectorXd r(m);
    for (int e = 0; e < pr.p(); ++e) {
      M.row(e) = pr.A_eq.row(e);
      r[e] = 0.0;  // stay on the equality manifold
    }
    for (size_t k = 0; k < fix.size(); ++k) {
      const int i = fix[k];
      const double nrm = pr.A_in.row(i).norm();
      M.row(pr.p() + static_cast<int>(k)) = pr.A_in.row(i) / nrm;
      r[pr.p() + static_cast<int>(k)] = (pr.b_in[i] - pr.A_in.row(i).dot(x)) / nrm;
    }
    const MatrixXd G = M * M.transpose();
    const VectorXd w = G.ldlt().solve(r);
    if ((G * w - r).lpNorm<Eigen::Infinity>() > 1e-9 * (1.0 + r.lpNorm<Eigen::Infinity>())) {
      return false;  // dependent violated rows; not a job for projection
    }
    x += M.transpose() * w;
  }
  return false;
}

// Phase-1 feasibility pass over row-normalized inequalities:
//   min ½‖s‖² + ½δ‖x‖²   s.t.  A_eq x = b_eq,  An x − s ≤ bn,  −s ≤ 0.
// The quadratic slack cost keeps every iterate at the problem's own scale (a
// linear cost would aim the first unconstrained step at s ≈ −1/δ, where the
// relative stationarity tolerances turn macroscopic). Residual slack of a
// feasible problem is O(δ·‖x‖), orders below the 1e-6 infeasibility verdict;
// a projection polish then lands exactly on the violated boundaries.
bool phase1(const QpProblem& pr, VectorXd& x) {
  const int n = pr.n();
  const int q = pr.q();

  // Row-normalize so the slack trade-off is scale-free.
  MatrixXd An(q, n);
  VectorXd bn(q);
  for (int i = 0; i < q; ++i) {
    const double nrm = pr.A_in.row(i).norm();
    if (nrm <= 1e-14) {
      if (pr.b_in[i] < -1e-12) return false;  // 0 <= b_i violated
      An.row(i).setZero();
      bn[i] = std::max(pr.b_in[i], 0.0);
      continue;
    }
    An.row(i) = pr.A_in.row(i) / nrm;
    bn[i] = pr.b_in[i] / nrm;
  }

  const double delta = 1e-9;
  QpProblem ph;
  ph.H = MatrixXd::Identity(n + q, n + q);
  ph.H.topLeftCorner(n, n) *= delta;
  ph.f = VectorXd::Zero(n + q);
  ph.A_eq = MatrixXd::Zero(pr.p(), n + q);
  if (pr.p() > 0) ph.A_eq.leftCols(n) = pr.A_eq;
  ph.b_eq = pr.b_eq;
  ph.A_in = MatrixXd::Zero(2 * q, n + q);
  ph.A_in.topLeftCorner(q, n) = An;
  ph.A_in.topRightCorner(q, q) = -MatrixXd::Identity(q, q);
  ph.A_in.bottomRightCorner(q, q) = -MatrixXd::Identity(q, q);
  ph.b_in = VectorXd::Zero(2 * q);
  ph.b_in.head(q) = bn;

  VectorXd z(n + q);
  z.head(n) = x;
  for (int i = 0; i < q; ++i) {
    z[n + i] = std::max(0.0, An.row(i).dot(x) - bn[i]);
  }

  auto fh = factor_hessian(ph.H);
  std::vector<int> work;
  int iterations = 0;
  const int limit = std::min(100 * (ph.n() + ph.q()), 5 * ph.q() + 200);
  active_set_loop(fh.llt, fh.Hreg, ph.f, ph.A_eq, ph.A_in, ph.b_in, z, work, limit,
                  iterations);

  if (z.tail(q).maxCoeff() > 1e-6) {
    return false;
  }
  x = z.head(n);
  cheap_restore(pr, x);  // land exactly on the remaining violated boundaries
  return true;
}

// Equality-constrained solve on a trial working set; used to seed warm starts.
// Returns false when the KKT system looks inconsistent.
bool eqp_solve(const Eigen::LLT<MatrixXd>& llt, const QpProblem& pr,
               const std::vector<int>& work, VectorXd& x) {
  const int n = pr.n();
  const int m = pr.p() + static_cast<int>(work.size());
  const MatrixXd& L = llt.matrixL();
  const VectorXd x_unc = -llt.solve(pr.f);
  if (m == 0) {
    x = x_unc;
    return true;
  }
  MatrixXd Mt(n, m);
  VectorXd bm(m);
  for (int r = 0; r < pr.p(); ++r) {
    Mt.col(r) = pr.A_eq.row(r).transpose();
    bm[r] = pr.b_eq[r];
  }
  for (size_t k = 0; k < work.size(); ++k) {
    Mt.col(pr.p() + static_cast<int>(k)) = pr.A_in.row(work[k]).transpose();
    bm[pr.p() + static_cast<int>(k)] = pr.b_in[work[k]];
  }
  MatrixXd R = L.triangularView<Eigen::Lower>().solve(Mt);
  MatrixXd K = R.transpose() * R;
  VectorXd rhs = Mt.transpose() * x_unc - bm;
  VectorXd lambda = K.ldlt().solve(rhs);
  if ((K * lambda - rhs).lpNorm<Eigen::Infinity>() >
      1e-7 * (1.0 + rhs.lpNorm<Eigen::Infinity>())) {
    return false;  // dependent working set
  }
  x = x_unc - llt.solve(Mt * lambda);
  return true;
}

}  // namespace

QpSolution solve(const QpProblem& pr, const std::vector<int>* warm_start) {
  check_dimensions(pr);
  return solve(pr, factor_hessian(pr.H), warm_start);
}

QpSolution solve(const QpProblem& pr, const HessianFactor& fh,
                 const std::vector<int>* warm_start) {
  check_dimensions(pr);
  const int n = pr.n();
  const int q = pr.q();
  // Active-set methods touch each face a bounded number of times in practice;
  // the cap only exists to turn pathological cycling into a reported status.
  const int iter_limit = std::min(100 * (n + q), 5 * q + 200);

  QpSolution sol;
  sol.lambda_eq = VectorXd::Zero(pr.p());
  sol.mu_in = VectorXd::Zero(q);

  VectorXd x;
  std::vector<int> work;
  bool started = false;

  // Warm path: rebuild the candidate active set's EQP optimum and keep it if
  // it is primal feasible.
  if (warm_start != nullptr && !warm_start->empty()) {
    std::vector<int> trial;
    for (int i : *warm_start) {
      if (i >= 0 && i < q && std::find(trial.begin(), trial.end(), i) == trial.end()) {
        trial.push_back(i);
      }
    }
    if (static_cast<int>(trial.size()) <= n && !trial.empty()) {
      VectorXd xw;
      if (eqp_solve(fh.llt, pr, trial, xw) &&
          (pr.p() == 0 ||
           (pr.A_eq * xw - pr.b_eq).lpNorm<Eigen::Infinity>() <
               1e-8 * (1.0 + pr.b_eq.lpNorm<Eigen::Infinity>())) &&
          max_violation(pr, xw) <= 1e-9) {
        x = xw;
        work = trial;
        started = true;
      }
    }
  }

  if (!started) {
    x = equality_point(pr);
    if (pr.p() > 0 &&
        (pr.A_eq * x - pr.b_eq).lpNorm<Eigen::Infinity>() >
            1e-7 * (1.0 + pr.b_eq.lpNorm<Eigen::Infinity>())) {
      sol.status = QpStatus::Infeasible;  // inconsistent equalities
      sol.x = VectorXd::Zero(n);
      sol.objective = std::numeric_limits<double>::quiet_NaN();
      return sol;
    }
    if (max_violation(pr, x) > 1e-10) {
      VectorXd xr = x;
      if (cheap_restore(pr, xr)) {
        x = xr;
      } else if (!phase1(pr, x)) {
        sol.status = QpStatus::Infeasible;
        sol.x = VectorXd::Zero(n);
        sol.objective = std::numeric_limits<double>::quiet_NaN();
        return sol;
      }
    }
  }

  LoopResult res = active_set_loop(fh.llt, fh.Hreg, pr.f, pr.A_eq, pr.A_in, pr.b_in,
                                   x, work, iter_limit, sol.iterations);

  sol.x = x;
  sol.status = res.status;
  sol.objective = 0.5 * x.dot(pr.H * x) + pr.f.dot(x);
  if (res.lambda.size() == pr.p() + static_cast<int>(work.size())) {
    sol.lambda_eq = res.lambda.head(pr.p());
    for (size_t k = 0; k < work.size(); ++k) {
      sol.mu_in[work[k]] = std::max(0.0, res.lambda[pr.p() + static_cast<int>(k)]);
    }
  }
  sol.active_set = work;
  std::sort(sol.active_set.begin(), sol.active_set.end());
  return sol;
}

double kkt_residual(const QpProblem& pr, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& lambda_eq, const Eigen::VectorXd& mu_in) {
  check_dimensions(pr);
  if (x.size() != pr.n() || lambda_eq.size() != pr.p() || mu_in.size() != pr.q()) {
    throw std::invalid_argument("kkt_residual: candidate dimensions do not match problem");
  }
  VectorXd stat = pr.H * x + pr.f;
  if (pr.p() > 0) stat += pr.A_eq.transpose() * lambda_eq;
  if (pr.q() > 0) stat += pr.A_in.transpose() * mu_in;
  double r = stat.lpNorm<Eigen::Infinity>();

  if (pr.p() > 0) {
    r = std::max(r, (pr.A_eq * x - pr.b_eq).lpNorm<Eigen::Infinity>());
  }
  if (pr.q() > 0) {
    const VectorXd slack = pr.A_in * x - pr.b_in;
    r = std::max(r, std::max(0.0, slack.maxCoeff()));
    r = std::max(r, std::max(0.0, -mu_in.minCoeff()));
    r = std::max(r, (mu_in.array() * slack.array()).abs().maxCoeff());
  }
  return r;
}

}  // namespace wpg
