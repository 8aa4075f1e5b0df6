#pragma once

#include <Eigen/Dense>

#include "wpg/types.hpp"

namespace wpg {

using Matrix5d = Eigen::Matrix<double, 5, 5>;
using Matrix52d = Eigen::Matrix<double, 5, 2>;
using RowVector5d = Eigen::Matrix<double, 1, 5>;
using Vector5d = Eigen::Matrix<double, 5, 1>;

/// ω₀ = sqrt(g/h). Throws for non-positive arguments.
double natural_frequency(double g, double h);

/// Divergent component of motion ξ = x + ẋ/ω₀.
Vec2 dcm(const Vec2& com, const Vec2& com_vel, double omega0);

/// Centroidal moment pivot: x_CMP = z + τ_f/(m g), with τ_f the per-axis
/// flywheel torque.
Vec2 cmp_location(const Vec2& zmp, const Vec2& tau_f, double m, double g);

/// Per-axis stacked state [ξ, ξ̇, θ, θ̇, θ̈] of the flywheel-augmented model.
struct StateVector5 {
  double xi = 0.0;
  double xi_dot = 0.0;
  double theta = 0.0;
  double theta_dot = 0.0;
  double theta_ddot = 0.0;

  Vector5d vec() const {
    Vector5d v;
    v << xi, xi_dot, theta, theta_dot, theta_ddot;
    return v;
  }
  static StateVector5 from(const Vector5d& v) { return {v[0], v[1], v[2], v[3], v[4]}; }
};

/// ZMP output row [1, −1/ω₀, 0, 0, −j/(mg)] for the stacked state.
RowVector5d zmp_output_row(double omega0, double j, double m, double g);

/// ZMP output map z = ξ − ξ̇/ω₀ − (j/(m g))·θ̈, the output row applied to the
/// stacked state.
double zmp_output(const StateVector5& x, double omega0, double j, double m, double g);

/// Exact ZOH discretization of the per-axis stacked model with inputs
/// u = [ξ̈, θ⃛]: two decoupled integrator chains.
struct DiscreteModel {
  Matrix5d A = Matrix5d::Zero();
  Matrix52d B = Matrix52d::Zero();
  double dt_s = 0.0;
};

DiscreteModel discretize(double omega0, double dt_s);

/// Trunk flywheel state about one horizontal axis.
struct TrunkState {
  double theta = 0.0;
  double theta_dot = 0.0;
};

/// Point-mass LIPM with a trunk flywheel. The trunk acceleration is an input,
/// not a state: each control cycle applies a piecewise-constant (z, θ̈) pair.
struct FlywheelPlant {
  Vec2 com;
  Vec2 com_vel;
  TrunkState pitch;  // sagittal axis (x)
  TrunkState roll;   // lateral axis (y)
};

/// Advances the plant by dt under piecewise-constant ZMP, trunk acceleration
/// and push acceleration. The CoM uses the closed-form solution of
/// ẍ = ω₀²(x − x_CMP) + a_push; the trunk integrates θ̈ exactly.
FlywheelPlant plant_step(const FlywheelPlant& state, const Vec2& zmp,
                         const Vec2& theta_ddot_cmd, const Vec2& push_accel,
                         double omega0, double j, double m, double g, double dt);

}  // namespace wpg
