#include "wpg/step_adapter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wpg/lipm.hpp"

namespace wpg {

NominalGait compute_nominal_gait(double v_des, const GaitConfig& config, Side stance) {
  config.validate();
  const double omega0 = config.omega0();

  NominalGait nom;
  nom.T_nom = config.T_nom();
  nom.L_nom = v_des * nom.T_nom;
  nom.W_nom = config.w_nom_signed(stance);
  nom.tau_nom = std::exp(omega0 * nom.T_nom);

  if (nom.T_nom < config.T_min || nom.T_nom > config.T_max) {
    throw std::invalid_argument("compute_nominal_gait: T_nom outside step-duration bounds");
  }
  if (nom.L_nom < config.L_min || nom.L_nom > config.L_max) {
    throw std::invalid_argument(
        "compute_nominal_gait: commanded velocity needs a step length outside bounds");
  }
  if (nom.W_nom < config.w_min(stance) || nom.W_nom > config.w_max(stance)) {
    throw std::invalid_argument("compute_nominal_gait: nominal width outside stance bounds");
  }

  // Periodic solutions of the step-to-step DCM offset recursion
  // b' = b e^{w0 T} - dU': sagittal b' = b with dU' = L, lateral b' = -b
  // (mirror) with dU' = W toward the new swing side.
  nom.b_nom.x = nom.L_nom / (nom.tau_nom - 1.0);
  nom.b_nom.y = -nom.W_nom / (nom.tau_nom + 1.0);
  return nom;
}

QpProblem build_stage1_qp(const Stage1Inputs& inputs, const NominalGait& nominal,
                          const GaitConfig& config, double omega0) {
  if (inputs.t < 0.0 || inputs.t >= config.T_max) {
    throw std::invalid_argument("build_stage1_qp: elapsed time outside [0, T_max)");
  }

  // Decision vector (u_T_x, u_T_y, tau, b_x, b_y); foothold is absolute.
  Eigen::VectorXd nominal_point(5);
  nominal_point << inputs.u0.x + nominal.L_nom, inputs.u0.y + nominal.W_nom,
      nominal.tau_nom, nominal.b_nom.x, nominal.b_nom.y;
  Eigen::VectorXd weights(5);
  weights << config.alpha1, config.alpha1, config.alpha2, config.alpha3, config.alpha3;

  QpProblem pr;
  pr.H = (2.0 * weights).asDiagonal();
  pr.f = -2.0 * weights.cwiseProduct(nominal_point);

  // u_T + b = (xi_mea - u0) e^{-w0 t} tau + u0, one row per axis.
  const double decay = std::exp(-omega0 * inputs.t);
  const double cx = (inputs.xi_mea.x - inputs.u0.x) * decay;
  const double cy = (inputs.xi_mea.y - inputs.u0.y) * decay;
  pr.A_eq.setZero(2, 5);
  pr.b_eq.resize(2);
  pr.A_eq(0, 0) = 1.0;
  pr.A_eq(0, 2) = -cx;
  pr.A_eq(0, 3) = 1.0;
  pr.A_eq(1, 1) = 1.0;
  pr.A_eq(1, 2) = -cy;
  pr.A_eq(1, 4) = 1.0;
  pr.b_eq << inputs.u0.x, inputs.u0.y;

  // Stance-relative boxes on the foothold, absolute box on tau; b unbounded.
  const double tau_lo = std::exp(omega0 * config.T_min);
  const double tau_hi = std::exp(omega0 * config.T_max);
  pr.A_in.setZero(6, 5);
  pr.b_in.resize(6);
  pr.A_in(0, 0) = 1.0;
  pr.b_in[0] = inputs.u0.x + config.L_max;
  pr.A_in(1, 0) = -1.0;
  pr.b_in[1] = -(inputs.u0.x + config.L_min);
  pr.A_in(2, 1) = 1.0;
  pr.b_in[2] = inputs.u0.y + config.w_max(inputs.stance);
  pr.A_in(3, 1) = -1.0;
  pr.b_in[3] = -(inputs.u0.y + config.w_min(inputs.stance));
  pr.A_in(4, 2) = 1.0;
  pr.b_in[4] = tau_hi;
  pr.A_in(5, 2) = -1.0;
  pr.b_in[5] = -tau_lo;
  return pr;
}

StepAdaptation adapt_step(const Stage1Inputs& inputs, const NominalGait& nominal,
                          const GaitConfig& config, const std::vector<int>* warm_start,
                          double T_cap) {
  const double omega0 = config.omega0();
  const QpProblem pr = build_stage1_qp(inputs, nominal, config, omega0);
  const QpSolution sol = solve(pr, warm_start);

  StepAdaptation out;
  out.status = sol.status;
  out.active_set = sol.active_set;
  out.iterations = sol.iterations;

  if (sol.status == QpStatus::Infeasible) {
    // Should not happen (b is unbounded, so the equalities are always
    // satisfiable); keep the simulation numerically alive on the nominals and
    // let the failure detector count the status.
    out.u_T = {inputs.u0.x + nominal.L_nom, inputs.u0.y + nominal.W_nom};
    out.T_step = std::max(nominal.T_nom, inputs.t + config.dt_s);
    out.b = nominal.b_nom;
    out.objective = 0.0;
    return out;
  }

  // Contacts switch only on the control grid, so the continuous optimum T*
  // is projected to the first realizable cycle boundary (snapping back when
  // T* sits within solver noise of a boundary) and the foothold re-balanced
  // with tau frozen there. Skipping this lets a nanoscale excess of T* over
  // a grid point stretch the realized step by a full cycle while the
  // terminal DCM target still corresponds to T*, which shows up as a
  // centimetre-scale braking demand in every downstream regeneration.
  const double dt = config.dt_s;
  const double T_raw = std::log(sol.x[2]) / omega0;
  const double T_lo = dt * std::ceil(config.T_min / dt - 1e-6);
  const double T_hi = dt * std::floor(config.T_max / dt + 1e-6);
  double T_d = std::clamp(dt * std::ceil(T_raw / dt - 1e-6), T_lo, T_hi);
  if (T_cap < T_d) {
    // Committed touchdown: the landing may be advanced but not postponed past
    // the cap. Without it, closed-loop authority over the DCM (stage 2
    // stalling the divergence with the flywheel while the support bound is
    // pinned) keeps the free-flow projection preferring a constant remaining
    // time, so the adapted duration recedes with the clock, touchdown never
    // arrives, and the trunk winds through its angle range instead of the
    // robot stepping.
    T_d = std::max(T_lo, dt * std::floor(T_cap / dt + 1e-6));
  }
  if (inputs.t >= T_d - 1e-9) {
    T_d = inputs.t + dt;  // imminent touchdown
  }
  out.T_step = T_d;
  const double tau_d = std::exp(omega0 * T_d);

  // With tau frozen the axes decouple: minimize a1 (u - u_nom)^2 +
  // a3 (b - b_nom)^2 subject to u + b = c, u boxed, b free.
  const double decay = std::exp(-omega0 * inputs.t);
  const double wu = config.alpha1 / (config.alpha1 + config.alpha3);
  const double wb = config.alpha3 / (config.alpha1 + config.alpha3);
  const double cx = inputs.u0.x + (inputs.xi_mea.x - inputs.u0.x) * decay * tau_d;
  const double cy = inputs.u0.y + (inputs.xi_mea.y - inputs.u0.y) * decay * tau_d;
  const double un_x = inputs.u0.x + nominal.L_nom;
  const double un_y = inputs.u0.y + nominal.W_nom;
  out.u_T.x = std::clamp(wb * cx - wb * nominal.b_nom.x + wu * un_x,
                         inputs.u0.x + config.L_min, inputs.u0.x + config.L_max);
  out.u_T.y = std::clamp(wb * cy - wb * nominal.b_nom.y + wu * un_y,
                         inputs.u0.y + config.w_min(inputs.stance),
                         inputs.u0.y + config.w_max(inputs.stance));
  out.b = {cx - out.u_T.x, cy - out.u_T.y};

  const double du_x = out.u_T.x - un_x;
  const double du_y = out.u_T.y - un_y;
  const double dtau = tau_d - nominal.tau_nom;
  const double db_x = out.b.x - nominal.b_nom.x;
  const double db_y = out.b.y - nominal.b_nom.y;
  out.objective = config.alpha1 * (du_x * du_x + du_y * du_y) +
                  config.alpha2 * dtau * dtau +
                  config.alpha3 * (db_x * db_x + db_y * db_y);
  return out;
}

}  // namespace wpg
