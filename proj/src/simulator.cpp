#include "wpg/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "wpg/dcm_regenerator.hpp"

namespace wpg {

const char* to_string(Phase p) { return p == Phase::SingleSupport ? "SS" : "DS"; }

const char* to_string(ControllerMode m) {
  return m == ControllerMode::Stage1Only ? "stage1_only" : "full";
}

const char* to_string(FailureReason r) {
  switch (r) {
    case FailureReason::None:
      return "none";
    case FailureReason::QpInfeasible:
      return "qp_infeasible";
    case FailureReason::DcmDivergence:
      return "dcm_divergence";
    case FailureReason::FeetCollision:
      return "feet_collision";
  }
  return "none";
}

Interval support_interval(const PhaseState& phase, const Vec2& stance_pose,
                          const Vec2& other_foot_pose, const GaitConfig& config, int axis) {
  const double half = 0.5 * (axis == 0 ? config.foot_length : config.foot_width);
  Interval iv{stance_pose[axis] - half, stance_pose[axis] + half};
  if (phase.phase == Phase::DoubleSupport) {
    iv.lo = std::min(iv.lo, other_foot_pose[axis] - half);
    iv.hi = std::max(iv.hi, other_foot_pose[axis] + half);
  }
  return iv;
}

FlywheelPlant on_orbit_state(const GaitConfig& config, double v_des, Side stance,
                             const Vec2& u0) {
  const NominalGait nom = compute_nominal_gait(v_des, config, stance);
  const double w0 = config.omega0();
  const double tau = nom.tau_nom;
  // Mirror-periodic orbit of the point model: x leads the stance foot by half a
  // step and carries the matching DCM offset; y oscillates between the feet.
  FlywheelPlant plant;
  plant.com = {u0.x - 0.5 * nom.L_nom, u0.y + 0.5 * nom.W_nom};
  plant.com_vel = {0.5 * w0 * nom.L_nom * (tau + 1.0) / (tau - 1.0),
                   -0.5 * w0 * nom.W_nom * (tau - 1.0) / (tau + 1.0)};
  return plant;
}

FailureEvent detect_failure(const SimLog& log, const GaitConfig& config) {
  FailureEvent row_event;
  int run = 0;
  for (const SimRow& r : log.rows) {
    const bool infeasible =
        r.qp1_status == QpStatus::Infeasible || r.qp2_status == QpStatus::Infeasible;
    run = infeasible ? run + 1 : 0;
    if (run >= config.failure_qp_cycles) {
      row_event = {FailureReason::QpInfeasible, r.t};
      break;
    }
    if ((r.dcm - r.stance_pos).norm() > config.failure_dcm_excursion) {
      row_event = {FailureReason::DcmDivergence, r.t};
      break;
    }
  }

  FailureEvent collision;
  for (const StepRecord& s : log.steps) {
    if (std::abs(s.u_T.x - s.u0.x) < config.foot_length &&
        std::abs(s.u_T.y - s.u0.y) < config.foot_width) {
      collision = {FailureReason::FeetCollision, s.t_touchdown};
      break;
    }
  }

  // A touchdown at time T precedes the row logged at T, so ties go to the
  // collision.
  if (collision.reason != FailureReason::None &&
      (row_event.reason == FailureReason::None || collision.t <= row_event.t)) {
    return collision;
  }
  return row_event;
}

namespace {

StepAdaptation nominal_plan(const NominalGait& nom, const Vec2& u0) {
  StepAdaptation plan;
  plan.u_T = {u0.x + nom.L_nom, u0.y + nom.W_nom};
  plan.T_step = nom.T_nom;
  plan.b = nom.b_nom;
  plan.objective = 0.0;
  plan.status = QpStatus::Optimal;
  return plan;
}

QpStatus worse(QpStatus a, QpStatus b) {
  const auto rank = [](QpStatus s) {
    return s == QpStatus::Optimal ? 0 : (s == QpStatus::IterationLimit ? 1 : 2);
  };
  return rank(a) >= rank(b) ? a : b;
}

}  // namespace

SimLog run_closed_loop(const GaitConfig& config, double v_des,
                       const std::vector<PushEvent>& pushes, ControllerMode mode,
                       double t_end, Side start_stance) {
  config.validate();
  if (!(t_end > 0.0)) {
    throw std::invalid_argument("run_closed_loop: t_end must be positive");
  }
  for (const PushEvent& p : pushes) {
    if (!(p.duration > 0.0) || !(p.magnitude >= 0.0) || !std::isfinite(p.t_start) ||
        !std::isfinite(p.psi)) {
      throw std::invalid_argument("run_closed_loop: malformed push event");
    }
  }

  const double w0 = config.omega0();
  const double dt = config.dt_s;
  const double jmg = config.j_over_mg();

  SimLog log;
  log.config = config;
  log.mode = mode;
  log.v_des = v_des;
  log.t_end = t_end;
  log.pushes = pushes;

  const NominalGait nominal[2] = {compute_nominal_gait(v_des, config, Side::Left),
                                  compute_nominal_gait(v_des, config, Side::Right)};
  const auto nom_of = [&nominal](Side s) -> const NominalGait& {
    return nominal[s == Side::Left ? 0 : 1];
  };

  Side stance = start_stance;
  Vec2 u0{0.0, 0.0};
  FlywheelPlant plant = on_orbit_state(config, v_des, stance, u0);

  // The other foot rests one nominal step behind the stance foot.
  Vec2 rest_pos{u0.x - nom_of(other_side(stance)).L_nom,
                u0.y - nom_of(other_side(stance)).W_nom};
  FootState swing_state;
  swing_state.pos = rest_pos;

  Vec2 cmp_prev = u0;               // applied CMP of the previous cycle
  Vec2 theta_ddot_ctrl{0.0, 0.0};   // dead-reckoned trunk acceleration state
  Vec2 z_held = u0;                 // last applied pair, replayed on infeasible cycles
  Vec2 theta_ddot_held{0.0, 0.0};

  StepAdaptation plan = nominal_plan(nom_of(stance), u0);

  Stage2Builder builder(config);
  std::vector<int> warm[2];
  int warm_N = 0;

  int step_index = 0;
  double step_start = 0.0;
  // Per-step commitment ceiling for the adapted duration: the first solve of
  // a step is unconstrained, after which touchdown may only move earlier.
  double T_committed = config.T_max;

  const int cycles = static_cast<int>(std::ceil(t_end / dt - 1e-9));
  for (int k = 0; k < cycles; ++k) {
    const double t = k * dt;
    const double ts = t - step_start;

    const Vec2 xi = dcm(plant.com, plant.com_vel, w0);
    const Vec2 xi_dot_est = w0 * (xi - cmp_prev);

    PhaseState ph;
    ph.stance = stance;
    ph.step_index = step_index;
    if (ts < config.T_ds - 1e-9) {
      ph.phase = Phase::DoubleSupport;
      ph.t_in_phase = ts;
    } else {
      ph.phase = Phase::SingleSupport;
      ph.t_in_phase = ts - config.T_ds;
    }

    QpStatus qp1_status = QpStatus::Optimal;
    double qp1_objective = 0.0;
    if (ph.phase == Phase::SingleSupport) {
      // Cold start on purpose: keeps every run replayable call-for-call.
      const Stage1Inputs in{xi, u0, ts, stance};
      plan = adapt_step(in, nom_of(stance), config, nullptr, T_committed);
      T_committed = plan.T_step;
      qp1_status = plan.status;
      qp1_objective = plan.objective;
    }

    const Vec2 xi_des = desired_terminal_dcm(plan.u_T, nom_of(stance).b_nom);

    Vec2 z_applied = u0;
    Vec2 theta_ddot_applied{0.0, 0.0};
    QpStatus qp2_status = QpStatus::Optimal;
    double qp2_objective = 0.0;

    if (mode == ControllerMode::Full) {
      const int N = horizon_length(plan.T_step, ts, dt);
      Stage2Inputs in[2];
      for (int a = 0; a < 2; ++a) {
        in[a].N = N;
        in[a].z_ref.resize(N);
        in[a].z_lo.resize(N);
        in[a].z_hi.resize(N);
      }
      for (int i = 1; i <= N; ++i) {
        // Sample i is the state after i cycles, at time ts + i*dt. Samples at
        // or past the adapted touchdown (only the last can be) sit on the
        // upcoming foothold; earlier ones use whatever phase is active then.
        // The reference always sits on the pivot the periodic gait holds
        // (the stance point, then the next stance point after touchdown);
        // double-support phases only widen the bounds, never the reference,
        // or the reference itself would kick the DCM off the orbit.
        const double s = ts + i * dt;
        if (s >= plan.T_step - 1e-9) {
          // Touchdown sample: the upcoming double support widens the bounds
          // to the two-foot hull, but the pivot switches only when the next
          // step's plan takes over.
          const double half[2] = {config.foot_length / 2.0, config.foot_width / 2.0};
          for (int a = 0; a < 2; ++a) {
            in[a].z_lo(i - 1) = std::min(u0[a], plan.u_T[a]) - half[a];
            in[a].z_hi(i - 1) = std::max(u0[a], plan.u_T[a]) + half[a];
            in[a].z_ref(i - 1) = u0[a];
          }
          continue;
        }
        PhaseState sample = ph;
        sample.phase = s < config.T_ds - 1e-9 ? Phase::DoubleSupport : Phase::SingleSupport;
        for (int a = 0; a < 2; ++a) {
          const Interval iv = support_interval(sample, u0, rest_pos, config, a);
          in[a].z_lo(i - 1) = iv.lo;
          in[a].z_hi(i - 1) = iv.hi;
          in[a].z_ref(i - 1) = u0[a];
        }
      }
      in[0].xhat = {xi.x, xi_dot_est.x, plant.pitch.theta, plant.pitch.theta_dot,
                    theta_ddot_ctrl.x};
      in[1].xhat = {xi.y, xi_dot_est.y, plant.roll.theta, plant.roll.theta_dot,
                    theta_ddot_ctrl.y};
      in[0].xi_des = xi_des.x;
      in[1].xi_des = xi_des.y;

      for (int a = 0; a < 2; ++a) {
        const std::vector<int> ws = remap_active_set(warm[a], warm_N, N);
        const TrajectoryPlan traj = builder.solve_axis(in[a], &ws);
        warm[a] = traj.active_set;
        qp2_status = worse(qp2_status, traj.status);
        qp2_objective += traj.objective;

        if (traj.status != QpStatus::Optimal) {
          // Hold the previous actuation; the acceleration state stays put and
          // the consecutive-infeasibility detector decides the run's fate.
          z_applied[a] = z_held[a];
          theta_ddot_applied[a] = theta_ddot_held[a];
          continue;
        }
        // Invert the exponential DCM flow for the zero-order-hold pivot that
        // lands the plant exactly on the plan's first-sample DCM. Realized
        // positions then match the prediction model cycle-for-cycle, so each
        // replan continues the previous plan instead of chasing the
        // discretization gap between the chain and the exponential flow; the
        // step adapter would amplify that gap by e^{w0 (T - t)}.
        const double E = std::exp(w0 * dt);
        const double tdd = theta_ddot_ctrl[a] + dt * traj.theta_dddot_cmd;
        theta_ddot_ctrl[a] = tdd;
        theta_ddot_applied[a] = tdd;
        const double cmp_star = (traj.xi_traj(0) - xi[a] * E) / (1.0 - E);
        z_applied[a] =
            std::clamp(cmp_star - jmg * tdd, in[a].z_lo(0), in[a].z_hi(0));
      }
      warm_N = N;
    }

    const Vec2 cmp_applied = z_applied + jmg * theta_ddot_applied;
    const Vec2 xi_dot_log = w0 * (xi - cmp_applied);

    FootState swing_now;
    if (ph.phase == Phase::SingleSupport) {
      swing_now = swing_state;
      const SwingPlan splan =
          plan_swing(swing_state, plan.u_T, ts, plan.T_step, config.apex_height);
      swing_state = evaluate(splan, ts + dt);
    } else {
      swing_now.pos = rest_pos;
      swing_state = swing_now;
    }

    SimRow row;
    row.t = t;
    row.com = plant.com;
    row.dcm = xi;
    row.zmp = z_applied;
    row.cmp = cmp_applied;
    row.pitch = plant.pitch.theta;
    row.roll = plant.roll.theta;
    row.pitch_rate = plant.pitch.theta_dot;
    row.roll_rate = plant.roll.theta_dot;
    row.swing_pos = swing_now.pos;
    row.swing_height = swing_now.height;
    row.stance = stance;
    row.phase = ph.phase;
    row.u_T = plan.u_T;
    row.T_step = plan.T_step;
    row.b = plan.b;
    row.qp1_status = qp1_status;
    row.qp2_status = qp2_status;
    row.com_vel = plant.com_vel;
    row.stance_pos = u0;
    row.xi_dot = xi_dot_log;
    row.theta_ddot = theta_ddot_applied;
    row.qp1_objective = qp1_objective;
    row.qp2_objective = qp2_objective;
    row.step_index = step_index;
    row.t_in_step = ts;
    log.rows.push_back(row);

    {
      const FailureEvent ev = detect_failure(log, config);
      if (ev.reason != FailureReason::None) {
        log.failure = ev.reason;
        log.t_failure = ev.t;
        break;
      }
    }

    Vec2 push_accel{0.0, 0.0};
    for (const PushEvent& pev : pushes) {
      if (pev.magnitude <= 0.0) {
        continue;
      }
      if (t >= pev.t_start - 1e-9 && t < pev.t_start + pev.duration - 1e-9) {
        push_accel += (pev.magnitude / config.m) * Vec2{std::cos(pev.psi), std::sin(pev.psi)};
      }
    }
    plant = plant_step(plant, z_applied, theta_ddot_applied, push_accel, w0, config.j,
                       config.m, config.g, dt);
    cmp_prev = cmp_applied;
    z_held = z_applied;
    theta_ddot_held = theta_ddot_applied;

    const double ts_next = (k + 1) * dt - step_start;
    if (ts_next >= plan.T_step - 1e-9) {
      const double t_td = (k + 1) * dt;
      StepRecord rec;
      rec.index = step_index;
      rec.stance = stance;
      rec.t_start = step_start;
      rec.t_touchdown = t_td;
      rec.T_step = plan.T_step;
      rec.u0 = u0;
      rec.u_T = plan.u_T;
      rec.b_end = dcm(plant.com, plant.com_vel, w0) - plan.u_T;
      rec.com_touchdown = plant.com;
      log.steps.push_back(rec);

      rest_pos = u0;  // the old stance foot becomes the next swing foot
      u0 = plan.u_T;
      stance = other_side(stance);
      ++step_index;
      step_start = t_td;
      // The DCM velocity jumps at contact switch (the CMP moves to the new
      // foot with the weight), so the velocity estimate for the first cycle
      // of the new step must use the post-switch pivot, not the stale hold;
      // the left-limit velocity would seed the predictor with a phantom
      // transient that the step adapter then amplifies by e^{w0 T}.
      cmp_prev = u0;
      plan = nominal_plan(nom_of(stance), u0);
      T_committed = config.T_max;
      swing_state = FootState{};
      swing_state.pos = rest_pos;
      warm[0].clear();
      warm[1].clear();
      warm_N = 0;

      const FailureEvent ev = detect_failure(log, config);
      if (ev.reason != FailureReason::None) {
        log.failure = ev.reason;
        log.t_failure = ev.t;
        break;
      }
    }
  }
  return log;
}

RunMetrics compute_metrics(const SimLog& log) {
  RunMetrics m;
  m.cycles = static_cast<int>(log.rows.size());
  m.steps = static_cast<int>(log.steps.size());
  for (const SimRow& r : log.rows) {
    m.peak_pitch = std::max(m.peak_pitch, std::abs(r.pitch));
    m.peak_roll = std::max(m.peak_roll, std::abs(r.roll));
    m.peak_zmp_excursion = std::max(m.peak_zmp_excursion, (r.zmp - r.stance_pos).inf_norm());
  }
  if (!log.rows.empty()) {
    m.final_pitch = log.rows.back().pitch;
    m.final_roll = log.rows.back().roll;
  }

  if (m.steps >= 2) {
    const int w = std::min(6, m.steps - 1);
    const StepRecord& a = log.steps[m.steps - 1 - w];
    const StepRecord& b = log.steps[m.steps - 1];
    m.mean_velocity = (b.com_touchdown.x - a.com_touchdown.x) / (b.t_touchdown - a.t_touchdown);
  }

  if (log.pushes.empty()) {
    m.steps_to_recover = 0;
  } else if (log.ok()) {
    double push_end = -std::numeric_limits<double>::infinity();
    for (const PushEvent& p : log.pushes) {
      push_end = std::max(push_end, p.t_start + p.duration);
    }
    int count = 0;
    for (const StepRecord& s : log.steps) {
      if (s.t_touchdown <= push_end + 1e-9) {
        continue;
      }
      ++count;
      const Vec2 b_nom = compute_nominal_gait(log.v_des, log.config, s.stance).b_nom;
      if ((s.b_end - b_nom).norm() <= 2.0 * b_nom.norm()) {
        m.steps_to_recover = count;
        break;
      }
    }
  }
  return m;
}

}  // namespace wpg
