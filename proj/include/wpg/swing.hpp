#pragma once

#include <array>

#include "wpg/types.hpp"

namespace wpg {

/// Kinematic state of the swing foot; doubles as the replanning boundary condition.
struct FootState {
  Vec2 pos{0.0, 0.0};
  Vec2 vel{0.0, 0.0};
  Vec2 acc{0.0, 0.0};
  double height = 0.0;
  double height_vel = 0.0;
};

/// Immutable polynomial swing trajectory in the local clock s = t - t0.
struct SwingPlan {
  double t0 = 0.0;        // step time the plan was made at [s]
  double duration = 0.0;  // time left until touchdown [s]
  Vec2 target{0.0, 0.0};  // landing location
  std::array<double, 6> cx{};  // horizontal quintic coefficients
  std::array<double, 6> cy{};
  std::array<double, 5> cz{};  // vertical quartic (cubic descent stores cz[4] = 0)
};

/**
 * @brief Plans a swing trajectory from the current foot state to u_T at T_step.
 *
 * Horizontal axes use the minimum-jerk quintic through the six boundary
 * conditions (current pos/vel/acc, target with zero rates). The vertical
 * profile is a quartic through apex_height at T_step/2 when planned before the
 * apex, and a cubic descent to ground afterwards.
 *
 * Throws std::invalid_argument when T_step <= t: touchdown is due and the
 * caller should land the foot instead of replanning.
 */
SwingPlan plan_swing(const FootState& current, const Vec2& u_T, double t, double T_step,
                     double apex_height);

/// Evaluates a plan at step time t; past touchdown the exact terminal state is returned.
FootState evaluate(const SwingPlan& plan, double t);

}  // namespace wpg
