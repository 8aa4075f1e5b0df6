#pragma once

#include <vector>

#include "wpg/lipm.hpp"
#include "wpg/qp.hpp"
#include "wpg/step_adapter.hpp"
#include "wpg/swing.hpp"
#include "wpg/types.hpp"

namespace wpg {

/// Horizontal push on the CoM: constant force over [t_start, t_start + duration).
struct PushEvent {
  double t_start = 0.0;    // [s]
  double duration = 0.1;   // [s]
  double magnitude = 0.0;  // force [N]
  double psi = 0.0;        // CCW angle from the motion direction [rad]
};

enum class Phase { SingleSupport, DoubleSupport };
enum class ControllerMode { Stage1Only, Full };
enum class FailureReason { None, QpInfeasible, DcmDivergence, FeetCollision };

const char* to_string(Phase p);           // "SS" / "DS"
const char* to_string(ControllerMode m);  // "stage1_only" / "full"
const char* to_string(FailureReason r);

/// Support-phase bookkeeping at one control instant.
struct PhaseState {
  Phase phase = Phase::SingleSupport;
  Side stance = Side::Left;
  double t_in_phase = 0.0;
  int step_index = 0;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double mid() const { return 0.5 * (lo + hi); }
};

/// Per-axis support extent: single support uses the stance-foot rectangle,
/// double support the axis-aligned interval hull of both rectangles.
/// Zero-size feet collapse to the point-contact interval (u0, u0).
/// axis: 0 = x, 1 = y.
Interval support_interval(const PhaseState& phase, const Vec2& stance_pose,
                          const Vec2& other_foot_pose, const GaitConfig& config, int axis);

/// One control cycle of the closed loop. The leading fields are the exported
/// trace columns; the trailing ones keep controller internals for analysis.
struct SimRow {
  double t = 0.0;
  Vec2 com, dcm, zmp, cmp;
  double pitch = 0.0, roll = 0.0;
  double pitch_rate = 0.0, roll_rate = 0.0;
  Vec2 swing_pos;
  double swing_height = 0.0;
  Side stance = Side::Left;
  Phase phase = Phase::SingleSupport;
  Vec2 u_T;
  double T_step = 0.0;
  Vec2 b;
  QpStatus qp1_status = QpStatus::Optimal;
  QpStatus qp2_status = QpStatus::Optimal;

  // controller internals, not exported
  Vec2 com_vel;
  Vec2 stance_pos;
  Vec2 xi_dot;            // ω₀(ξ − x_CMP,applied); satisfies the output relation exactly
  Vec2 theta_ddot;        // trunk acceleration applied over the cycle (x: pitch, y: roll)
  double qp1_objective = 0.0;
  double qp2_objective = 0.0;
  int step_index = 0;
  double t_in_step = 0.0;
};

/// One completed step (touchdown to touchdown).
struct StepRecord {
  int index = 0;
  Side stance = Side::Left;  // stance foot during the step
  double t_start = 0.0;
  double t_touchdown = 0.0;
  double T_step = 0.0;  // final adapted duration
  Vec2 u0;              // stance foothold
  Vec2 u_T;             // landed foothold
  Vec2 b_end;           // DCM offset ξ(touchdown) − u_T
  Vec2 com_touchdown;
};

struct SimLog {
  std::vector<SimRow> rows;
  std::vector<StepRecord> steps;
  FailureReason failure = FailureReason::None;
  double t_failure = 0.0;
  GaitConfig config;
  ControllerMode mode = ControllerMode::Full;
  double v_des = 0.0;
  double t_end = 0.0;
  std::vector<PushEvent> pushes;

  bool ok() const { return failure == FailureReason::None; }
};

/// Plant state on the nominal periodic orbit at the start of a `stance` step
/// whose support foot sits at u0. Zero-disturbance runs started here stay on
/// the orbit to floating-point accuracy.
FlywheelPlant on_orbit_state(const GaitConfig& config, double v_des, Side stance,
                             const Vec2& u0);

struct FailureEvent {
  FailureReason reason = FailureReason::None;
  double t = 0.0;
};

/// Scans a log (typically the growing tail during a run) for the earliest
/// failure: stage-1/stage-2 QP infeasible for failure_qp_cycles consecutive
/// rows, DCM excursion ‖ξ − u0‖ beyond failure_dcm_excursion, or a touchdown
/// that lands the swing foot on the stance foot.
FailureEvent detect_failure(const SimLog& log, const GaitConfig& config);

/**
 * @brief Runs the two-stage controller in closed loop on the flywheel plant.
 *
 * Each control cycle: measure the DCM, adapt step location/timing (single
 * support only; the plan is frozen during double support), refresh the
 * terminal target ξ_des = u_T + b_nom, regenerate the DCM/trunk trajectories
 * over the remaining-step horizon (Full mode), apply the first sample through
 * a zero-order hold and integrate the plant with any active push. Touchdown
 * fires at T_step, the stance swaps and the plan resets to the nominals.
 *
 * In Stage1Only mode the ZMP is pinned to the stance foot center and the
 * trunk is left alone, reproducing the point-contact baseline.
 *
 * Failures end the run early and are recorded in the log, not thrown.
 */
SimLog run_closed_loop(const GaitConfig& config, double v_des,
                       const std::vector<PushEvent>& pushes, ControllerMode mode,
                       double t_end, Side start_stance = Side::Left);

/// Aggregates a finished run for reporting.
struct RunMetrics {
  int cycles = 0;
  int steps = 0;
  double mean_velocity = 0.0;      // forward CoM velocity over the last 6 steps
  double peak_pitch = 0.0;         // max |θ_pitch| [rad]
  double peak_roll = 0.0;
  double final_pitch = 0.0;
  double final_roll = 0.0;
  double peak_zmp_excursion = 0.0;  // max ‖z − u0‖∞ over the run
  int steps_to_recover = -1;        // touchdowns after push end until the DCM
                                    // offset re-enters 2‖b_nom‖; -1 = never/failed
};

RunMetrics compute_metrics(const SimLog& log);

}  // namespace wpg
