#pragma once

#include <limits>
#include <vector>

#include "wpg/qp.hpp"
#include "wpg/types.hpp"

namespace wpg {

/// Nominal gait variables for a commanded forward velocity and stance side.
struct NominalGait {
  double L_nom = 0.0;    // step length [m]
  double W_nom = 0.0;    // signed step width [m]; sign points toward the swing side
  double T_nom = 0.0;    // step duration [s]
  double tau_nom = 1.0;  // e^{omega0 * T_nom}
  Vec2 b_nom;            // periodic step-end DCM offset [m]
};

/// Per-cycle measurements feeding the step-adaptation QP.
struct Stage1Inputs {
  Vec2 xi_mea;               // measured DCM [m]
  Vec2 u0;                   // current stance-foot location [m]
  double t = 0.0;            // elapsed time in the current step [s]
  Side stance = Side::Left;  // current stance foot
};

/// Adapted step: next foothold, total step duration and step-end DCM offset.
struct StepAdaptation {
  Vec2 u_T;
  double T_step = 0.0;
  Vec2 b;
  double objective = 0.0;       // weighted squared deviation from the nominals
  QpStatus status = QpStatus::Optimal;
  std::vector<int> active_set;  // tight inequality rows (stable order), for warm starts
  int iterations = 0;
};

/// Periodic-gait nominals: L = v_des*T, tau = e^{w0 T}, b_x = L/(tau - 1),
/// b_y = -W/(tau + 1) with W signed toward the swing side. Throws when the
/// commanded velocity needs a step length outside the configured bounds.
NominalGait compute_nominal_gait(double v_des, const GaitConfig& config, Side stance);

/// Assembles the 5-variable QP over (u_T_x, u_T_y, tau, b_x, b_y):
/// diagonal cost (a1, a1, a2, a3, a3) centered on the nominals, one equality
/// per axis  u_T + b - (xi_mea - u0) e^{-w0 t} tau = u0,  and box rows
/// [u_T_x hi, u_T_x lo, u_T_y hi, u_T_y lo, tau hi, tau lo] (b unbounded).
QpProblem build_stage1_qp(const Stage1Inputs& inputs, const NominalGait& nominal,
                          const GaitConfig& config, double omega0);

/// Solves the QP and maps tau* back through T = ln(tau*)/w0, then projects T
/// onto the control grid and re-balances the foothold with tau frozen there.
/// When touchdown is imminent (t >= T - dt_s) the duration is clamped to
/// t + dt_s. T_cap commits an upper bound on the duration (a swing foot
/// already descending can land earlier than planned, but not later); pass
/// +inf for an uncommitted solve. The reported objective is the true weighted
/// residual against the nominals.
StepAdaptation adapt_step(const Stage1Inputs& inputs, const NominalGait& nominal,
                          const GaitConfig& config,
                          const std::vector<int>* warm_start = nullptr,
                          double T_cap = std::numeric_limits<double>::infinity());

}  // namespace wpg
