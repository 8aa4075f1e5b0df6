#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "wpg/lipm.hpp"
#include "wpg/qp.hpp"
#include "wpg/types.hpp"

namespace wpg {

/// Number of control cycles left in the current step: ceil((T_step - t)/dt_s),
/// at least 1. Throws for non-positive dt_s.
int horizon_length(double T_step, double t, double dt_s);

/// Condensed response of the stacked per-axis trajectories to the initial
/// state and the input sequence U = (xi_ddot_0..N-1, theta_dddot_0..N-1):
/// row k of P*s is the state response after k+1 cycles, row k of P*u the
/// input convolution, and Pz* compose them with the ZMP output row.
struct PredictionModel {
  int N = 0;
  Eigen::MatrixXd P1s, P2s, P3s, P4s, P5s;  // N x 5, for xi, xi_dot, theta, theta_dot, theta_ddot
  Eigen::MatrixXd P1u, P2u, P3u, P4u, P5u;  // N x 2N
  Eigen::MatrixXd Pzs;                      // N x 5
  Eigen::MatrixXd Pzu;                      // N x 2N
};

PredictionModel build_prediction(const DiscreteModel& model, double omega0, double j,
                                 double m, double g, int N);

/// Terminal DCM target that realizes the nominal offset: xi_des = u_T + b_nom.
Vec2 desired_terminal_dcm(const Vec2& u_T, const Vec2& b_nom);

/// Per-axis inputs of the receding-horizon regeneration QP.
struct Stage2Inputs {
  StateVector5 xhat;
  double xi_des = 0.0;
  Eigen::VectorXd z_ref;        // N reference ZMP samples
  Eigen::VectorXd z_lo, z_hi;   // N support bounds
  int N = 0;
};

/// Regenerated trajectories over the horizon plus the first-cycle input.
struct TrajectoryPlan {
  Eigen::VectorXd xi_traj, xi_dot_traj;
  Eigen::VectorXd theta_traj, theta_dot_traj, theta_ddot_traj;
  Eigen::VectorXd z_traj;
  double xi_ddot_cmd = 0.0;      // first-cycle DCM acceleration
  double theta_dddot_cmd = 0.0;  // first-cycle trunk jerk
  double objective = 0.0;        // true weighted cost at the solution
  QpStatus status = QpStatus::Optimal;
  std::vector<int> active_set;
  int iterations = 0;
};

/// Assembles the 2N-variable QP: cost b1|Z - Z_ref|^2 + b2|xi_ddot|^2 +
/// b3|theta_dddot|^2 + b4|theta_dot|^2 + b5(xi_N - xi_des)^2 over the stacked
/// input and output trajectories; inequality blocks
/// [+theta_ddot; -theta_ddot; +theta; -theta; +z; -z], N rows each.
QpProblem build_stage2_qp(const Stage2Inputs& inputs, const PredictionModel& pred,
                          const GaitConfig& config);

/// Solves the QP and expands the input sequence through the prediction model.
TrajectoryPlan regenerate(const Stage2Inputs& inputs, const PredictionModel& pred,
                          const GaitConfig& config,
                          const std::vector<int>* warm_start = nullptr);

/// Shifts an active set one control cycle forward: sample indices decrease by
/// one within each of the six constraint blocks, rows that expire or fall
/// beyond the new horizon are dropped.
std::vector<int> remap_active_set(const std::vector<int>& prev, int N_prev, int N_next);

/// Per-horizon-length cache of the prediction model and the constant QP
/// pieces (Hessian, inequality matrix), since both depend only on N. Keeps
/// the per-cycle cost of the receding-horizon loop at fill-and-solve.
class Stage2Builder {
 public:
  explicit Stage2Builder(const GaitConfig& config);

  /// Prediction model for horizon N (built on first use, then cached).
  const PredictionModel& prediction(int N);

  /// Same QP as build_stage2_qp, assembled from the cache.
  QpProblem make_problem(const Stage2Inputs& inputs);

  /// Same result as regenerate(), assembled from the cache.
  TrajectoryPlan solve_axis(const Stage2Inputs& inputs,
                            const std::vector<int>* warm_start = nullptr);

 private:
  struct Entry {
    PredictionModel pred;
    QpProblem scratch;     // H and A_in fixed per N; f and b_in refilled per cycle
    HessianFactor factor;  // H factored once per N
  };
  Entry& entry(int N);

  GaitConfig config_;
  DiscreteModel model_;
  std::vector<std::unique_ptr<Entry>> cache_;  // index N
};

}  // namespace wpg
