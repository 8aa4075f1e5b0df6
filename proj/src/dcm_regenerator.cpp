#include "wpg/dcm_regenerator.hpp"

#include <cmath>
#include <stdexcept>

namespace wpg {

using Eigen::MatrixXd;
using Eigen::VectorXd;

int horizon_length(double T_step, double t, double dt_s) {
  if (dt_s <= 0.0) {
    throw std::invalid_argument("horizon_length: dt_s must be positive");
  }
  // The 1e-9 guard keeps remaining times that sit on the sampling grid from
  // rounding up an extra cycle.
  const double cycles = (T_step - t) / dt_s;
  return std::max(1, static_cast<int>(std::ceil(cycles - 1e-9)));
}

PredictionModel build_prediction(const DiscreteModel& model, double omega0, double j,
                                 double m, double g, int N) {
  if (N < 1) {
    throw std::invalid_argument("build_prediction: N must be >= 1");
  }
  const RowVector5d cz = zmp_output_row(omega0, j, m, g);

  PredictionModel pm;
  pm.N = N;
  for (MatrixXd* s : {&pm.P1s, &pm.P2s, &pm.P3s, &pm.P4s, &pm.P5s, &pm.Pzs}) {
    s->resize(N, 5);
  }
  for (MatrixXd* u : {&pm.P1u, &pm.P2u, &pm.P3u, &pm.P4u, &pm.P5u, &pm.Pzu}) {
    u->setZero(N, 2 * N);
  }

  // G[d] = A^d B is the response of sample k+d+1 to the input at sample k.
  std::vector<Matrix52d> G(N);
  G[0] = model.B;
  for (int d = 1; d < N; ++d) {
    G[d] = model.A * G[d - 1];
  }

  Matrix5d Ai = Matrix5d::Identity();
  for (int i = 1; i <= N; ++i) {
    Ai = Ai * model.A;  // A^i
    const int r = i - 1;
    pm.P1s.row(r) = Ai.row(0);
    pm.P2s.row(r) = Ai.row(1);
    pm.P3s.row(r) = Ai.row(2);
    pm.P4s.row(r) = Ai.row(3);
    pm.P5s.row(r) = Ai.row(4);
    pm.Pzs.row(r) = cz * Ai;
    for (int l = 0; l < i; ++l) {
      const Matrix52d& Gd = G[i - 1 - l];
      pm.P1u(r, l) = Gd(0, 0);
      pm.P2u(r, l) = Gd(1, 0);
      pm.P3u(r, l) = Gd(2, 0);
      pm.P4u(r, l) = Gd(3, 0);
      pm.P5u(r, l) = Gd(4, 0);
      pm.P1u(r, N + l) = Gd(0, 1);
      pm.P2u(r, N + l) = Gd(1, 1);
      pm.P3u(r, N + l) = Gd(2, 1);
      pm.P4u(r, N + l) = Gd(3, 1);
      pm.P5u(r, N + l) = Gd(4, 1);
      const Eigen::RowVector2d czG = cz * Gd;
      pm.Pzu(r, l) = czG(0);
      pm.Pzu(r, N + l) = czG(1);
    }
  }
  return pm;
}

Vec2 desired_terminal_dcm(const Vec2& u_T, const Vec2& b_nom) {
  return u_T + b_nom;
}

namespace {

void check_inputs(const Stage2Inputs& in, const PredictionModel& pm) {
  const int N = pm.N;
  if (N < 1 || in.N != N) {
    throw std::invalid_argument("stage2: horizon mismatch between inputs and prediction");
  }
  if (in.z_ref.size() != N || in.z_lo.size() != N || in.z_hi.size() != N) {
    throw std::invalid_argument("stage2: reference/bound vectors must have N entries");
  }
  if ((in.z_ref - in.z_lo).minCoeff() < 0.0 || (in.z_hi - in.z_ref).minCoeff() < 0.0) {
    throw std::invalid_argument("stage2: z_ref must lie within [z_lo, z_hi]");
  }
}

MatrixXd assemble_hessian(const PredictionModel& pm, const GaitConfig& c) {
  const int N = pm.N;
  MatrixXd H = 2.0 * c.beta1 * (pm.Pzu.transpose() * pm.Pzu);
  H.topLeftCorner(N, N).diagonal().array() += 2.0 * c.beta2;
  H.bottomRightCorner(N, N).diagonal().array() += 2.0 * c.beta3;
  H.noalias() += 2.0 * c.beta4 * (pm.P4u.transpose() * pm.P4u);
  const auto p = pm.P1u.row(N - 1);
  H.noalias() += 2.0 * c.beta5 * (p.transpose() * p);
  return H;
}

MatrixXd assemble_inequalities(const PredictionModel& pm) {
  const int N = pm.N;
  MatrixXd A(6 * N, 2 * N);
  A.middleRows(0, N) = pm.P5u;
  A.middleRows(N, N) = -pm.P5u;
  A.middleRows(2 * N, N) = pm.P3u;
  A.middleRows(3 * N, N) = -pm.P3u;
  A.middleRows(4 * N, N) = pm.Pzu;
  A.middleRows(5 * N, N) = -pm.Pzu;
  return A;
}

// Per-cycle linear terms: gradient and inequality offsets from the current
// state, ZMP reference/bounds and terminal DCM target.
void fill_cycle_terms(const PredictionModel& pm, const GaitConfig& c,
                      const Stage2Inputs& in, QpProblem& pr) {
  const int N = pm.N;
  const Vector5d xv = in.xhat.vec();

  pr.f = 2.0 * c.beta1 * (pm.Pzu.transpose() * (pm.Pzs * xv - in.z_ref));
  pr.f.noalias() += 2.0 * c.beta4 * (pm.P4u.transpose() * (pm.P4s * xv));
  const auto p = pm.P1u.row(N - 1);
  const double xi_term = pm.P1s.row(N - 1).dot(xv) - in.xi_des;
  pr.f.noalias() += (2.0 * c.beta5 * xi_term) * p.transpose();

  const double acc_max = c.theta_ddot_max();
  const VectorXd th_dd = pm.P5s * xv;
  const VectorXd th = pm.P3s * xv;
  const VectorXd z0 = pm.Pzs * xv;
  pr.b_in.resize(6 * N);
  pr.b_in.segment(0, N) = VectorXd::Constant(N, acc_max) - th_dd;
  pr.b_in.segment(N, N) = VectorXd::Constant(N, acc_max) + th_dd;
  pr.b_in.segment(2 * N, N) = VectorXd::Constant(N, c.theta_max) - th;
  pr.b_in.segment(3 * N, N) = VectorXd::Constant(N, -c.theta_min) + th;
  pr.b_in.segment(4 * N, N) = in.z_hi - z0;
  pr.b_in.segment(5 * N, N) = z0 - in.z_lo;
}

TrajectoryPlan solve_and_expand(const QpProblem& pr, const Stage2Inputs& in,
                                const PredictionModel& pm, const GaitConfig& c,
                                const std::vector<int>* warm_start,
                                const HessianFactor* factor = nullptr) {
  const int N = pm.N;
  QpSolution sol = factor ? solve(pr, *factor, warm_start) : solve(pr, warm_start);

  TrajectoryPlan plan;
  plan.status = sol.status;
  plan.active_set = std::move(sol.active_set);
  plan.iterations = sol.iterations;

  // On an infeasible cycle the caller gets the free (zero-input) evolution;
  // the failure detector counts the status.
  const VectorXd U =
      (sol.status == QpStatus::Infeasible) ? VectorXd::Zero(2 * N) : std::move(sol.x);
  const Vector5d xv = in.xhat.vec();
  plan.xi_traj = pm.P1s * xv + pm.P1u * U;
  plan.xi_dot_traj = pm.P2s * xv + pm.P2u * U;
  plan.theta_traj = pm.P3s * xv + pm.P3u * U;
  plan.theta_dot_traj = pm.P4s * xv + pm.P4u * U;
  plan.theta_ddot_traj = pm.P5s * xv + pm.P5u * U;
  plan.z_traj = pm.Pzs * xv + pm.Pzu * U;
  plan.xi_ddot_cmd = U[0];
  plan.theta_dddot_cmd = U[N];

  const double term = plan.xi_traj[N - 1] - in.xi_des;
  plan.objective = c.beta1 * (plan.z_traj - in.z_ref).squaredNorm() +
                   c.beta2 * U.head(N).squaredNorm() +
                   c.beta3 * U.tail(N).squaredNorm() +
                   c.beta4 * plan.theta_dot_traj.squaredNorm() +
                   c.beta5 * term * term;
  return plan;
}

}  // namespace

QpProblem build_stage2_qp(const Stage2Inputs& inputs, const PredictionModel& pred,
                          const GaitConfig& config) {
  check_inputs(inputs, pred);
  QpProblem pr;
  pr.H = assemble_hessian(pred, config);
  pr.A_in = assemble_inequalities(pred);
  fill_cycle_terms(pred, config, inputs, pr);
  return pr;
}

TrajectoryPlan regenerate(const Stage2Inputs& inputs, const PredictionModel& pred,
                          const GaitConfig& config, const std::vector<int>* warm_start) {
  const QpProblem pr = build_stage2_qp(inputs, pred, config);
  return solve_and_expand(pr, inputs, pred, config, warm_start);
}

std::vector<int> remap_active_set(const std::vector<int>& prev, int N_prev, int N_next) {
  std::vector<int> out;
  if (N_prev < 1 || N_next < 1) {
    return out;
  }
  for (int r : prev) {
    if (r < 0 || r >= 6 * N_prev) continue;
    const int block = r / N_prev;
    const int i = r % N_prev;
    if (i == 0) continue;  // that sample expires this cycle
    const int i_new = i - 1;
    if (i_new >= N_next) continue;  // horizon truncated by timing adaptation
    out.push_back(block * N_next + i_new);
  }
  return out;
}

Stage2Builder::Stage2Builder(const GaitConfig& config) : config_(config) {
  config_.validate();
  model_ = discretize(config_.omega0(), config_.dt_s);
}

Stage2Builder::Entry& Stage2Builder::entry(int N) {
  if (N < 1) {
    throw std::invalid_argument("Stage2Builder: N must be >= 1");
  }
  if (static_cast<int>(cache_.size()) <= N) {
    cache_.resize(N + 1);
  }
  if (!cache_[N]) {
    auto e = std::make_unique<Entry>();
    e->pred =
        build_prediction(model_, config_.omega0(), config_.j, config_.m, config_.g, N);
    e->scratch.H = assemble_hessian(e->pred, config_);
    e->scratch.A_in = assemble_inequalities(e->pred);
    e->factor = factor_hessian(e->scratch.H);
    cache_[N] = std::move(e);
  }
  return *cache_[N];
}

const PredictionModel& Stage2Builder::prediction(int N) { return entry(N).pred; }

QpProblem Stage2Builder::make_problem(const Stage2Inputs& inputs) {
  Entry& e = entry(inputs.N);
  check_inputs(inputs, e.pred);
  fill_cycle_terms(e.pred, config_, inputs, e.scratch);
  return e.scratch;
}

TrajectoryPlan Stage2Builder::solve_axis(const Stage2Inputs& inputs,
                                         const std::vector<int>* warm_start) {
  Entry& e = entry(inputs.N);
  check_inputs(inputs, e.pred);
  fill_cycle_terms(e.pred, config_, inputs, e.scratch);
  return solve_and_expand(e.scratch, inputs, e.pred, config_, warm_start, &e.factor);
}

}  // namespace wpg
