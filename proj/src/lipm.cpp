#include "wpg/lipm.hpp"

#include <cmath>
#include <stdexcept>

namespace wpg {

double natural_frequency(double g, double h) {
  if (g <= 0.0 || h <= 0.0) {
    throw std::invalid_argument("natural_frequency: g and h must be positive");
  }
  return std::sqrt(g / h);
}

Vec2 dcm(const Vec2& com, const Vec2& com_vel, double omega0) {
  return {com.x + com_vel.x / omega0, com.y + com_vel.y / omega0};
}

Vec2 cmp_location(const Vec2& zmp, const Vec2& tau_f, double m, double g) {
  const double mg = m * g;
  return {zmp.x + tau_f.x / mg, zmp.y + tau_f.y / mg};
}

RowVector5d zmp_output_row(double omega0, double j, double m, double g) {
  if (omega0 <= 0.0) {
    throw std::invalid_argument("zmp_output_row: omega0 must be positive");
  }
  RowVector5d c;
  c << 1.0, -1.0 / omega0, 0.0, 0.0, -j / (m * g);
  return c;
}

double zmp_output(const StateVector5& x, double omega0, double j, double m, double g) {
  return x.xi - x.xi_dot / omega0 - j / (m * g) * x.theta_ddot;
}

DiscreteModel discretize(double omega0, double dt_s) {
  if (omega0 <= 0.0 || dt_s < 0.0) {
    throw std::invalid_argument("discretize: omega0 must be positive, dt_s non-negative");
  }
  DiscreteModel md;
  md.dt_s = dt_s;
  const double T = dt_s;
  // DCM chain (double integrator on [ξ, ξ̇] driven by ξ̈) and trunk chain
  // (triple integrator on [θ, θ̇, θ̈] driven by θ⃛), both exact under ZOH.
  md.A << 1, T, 0, 0, 0,
          0, 1, 0, 0, 0,
          0, 0, 1, T, T * T / 2.0,
          0, 0, 0, 1, T,
          0, 0, 0, 0, 1;
  md.B << T * T / 2.0, 0,
          T, 0,
          0, T * T * T / 6.0,
          0, T * T / 2.0,
          0, T;
  return md;
}

namespace {

// One axis of ẍ = ω₀²(x − c) + a over dt, exact. With x_eq = c − a/ω₀²:
// x(t) = x_eq + (x₀ − x_eq)cosh(ω₀t) + (v₀/ω₀)sinh(ω₀t).
void lipm_axis(double& x, double& v, double c, double a, double omega0, double dt) {
  const double x_eq = c - a / (omega0 * omega0);
  const double ch = std::cosh(omega0 * dt);
  const double sh = std::sinh(omega0 * dt);
  const double dx = x - x_eq;
  x = x_eq + dx * ch + v / omega0 * sh;
  v = omega0 * dx * sh + v * ch;
}

void trunk_axis(TrunkState& t, double acc, double dt) {
  t.theta += t.theta_dot * dt + 0.5 * acc * dt * dt;
  t.theta_dot += acc * dt;
}

}  // namespace

FlywheelPlant plant_step(const FlywheelPlant& state, const Vec2& zmp,
                         const Vec2& theta_ddot_cmd, const Vec2& push_accel,
                         double omega0, double j, double m, double g, double dt) {
  if (dt <= 0.0) {
    throw std::invalid_argument("plant_step: dt must be positive");
  }
  FlywheelPlant next = state;
  const Vec2 cmp = cmp_location(zmp, {j * theta_ddot_cmd.x, j * theta_ddot_cmd.y}, m, g);
  lipm_axis(next.com.x, next.com_vel.x, cmp.x, push_accel.x, omega0, dt);
  lipm_axis(next.com.y, next.com_vel.y, cmp.y, push_accel.y, omega0, dt);
  trunk_axis(next.pitch, theta_ddot_cmd.x, dt);
  trunk_axis(next.roll, theta_ddot_cmd.y, dt);
  return next;
}

}  // namespace wpg
