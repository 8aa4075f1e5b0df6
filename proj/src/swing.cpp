#include "wpg/swing.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace wpg {

namespace {

// Completes a quintic whose first three coefficients are fixed by the initial
// state so that position/velocity/acceleration reach (target, 0, 0) at s = d.
void complete_quintic(const Eigen::PartialPivLU<Eigen::Matrix3d>& lu, double p0, double v0,
                      double a0, double target, double d, std::array<double, 6>& c) {
  c[0] = p0;
  c[1] = v0;
  c[2] = 0.5 * a0;
  Eigen::Vector3d rhs;
  rhs << target - (c[0] + c[1] * d + c[2] * d * d), -(c[1] + 2.0 * c[2] * d), -2.0 * c[2];
  const Eigen::Vector3d tail = lu.solve(rhs);
  c[3] = tail(0);
  c[4] = tail(1);
  c[5] = tail(2);
}

}  // namespace

SwingPlan plan_swing(const FootState& current, const Vec2& u_T, double t, double T_step,
                     double apex_height) {
  if (!(T_step > t)) {
    throw std::invalid_argument("plan_swing: touchdown due, no time left to swing");
  }

  SwingPlan plan;
  plan.t0 = t;
  plan.duration = T_step - t;
  plan.target = u_T;

  const double d = plan.duration;
  const double d2 = d * d;
  const double d3 = d2 * d;

  // Both horizontal axes share the terminal-condition system.
  Eigen::Matrix3d M;
  M << d3, d2 * d2, d2 * d3,
      3.0 * d2, 4.0 * d3, 5.0 * d2 * d2,
      6.0 * d, 12.0 * d2, 20.0 * d3;
  const Eigen::PartialPivLU<Eigen::Matrix3d> lu(M);
  complete_quintic(lu, current.pos.x, current.vel.x, current.acc.x, u_T.x, d, plan.cx);
  complete_quintic(lu, current.pos.y, current.vel.y, current.acc.y, u_T.y, d, plan.cy);

  const double z0 = current.height;
  const double v0 = current.height_vel;
  const double s_apex = 0.5 * T_step - t;
  if (s_apex > 1e-3) {
    // Quartic through the apex at T_step/2, landing flat at s = d.
    plan.cz[0] = z0;
    plan.cz[1] = v0;
    Eigen::Matrix3d A;
    A << s_apex * s_apex, s_apex * s_apex * s_apex, s_apex * s_apex * s_apex * s_apex,
        d2, d3, d2 * d2,
        2.0 * d, 3.0 * d2, 4.0 * d3;
    Eigen::Vector3d rhs;
    rhs << apex_height - z0 - v0 * s_apex, -z0 - v0 * d, -v0;
    const Eigen::Vector3d tail = A.partialPivLu().solve(rhs);
    plan.cz[2] = tail(0);
    plan.cz[3] = tail(1);
    plan.cz[4] = tail(2);
  } else {
    // Past the apex: cubic descent to ground with zero touchdown velocity.
    plan.cz[0] = z0;
    plan.cz[1] = v0;
    plan.cz[2] = -(3.0 * z0 + 2.0 * v0 * d) / d2;
    plan.cz[3] = (2.0 * z0 + v0 * d) / d3;
    plan.cz[4] = 0.0;
  }
  return plan;
}

FootState evaluate(const SwingPlan& plan, double t) {
  const double s = t - plan.t0;
  FootState out;
  if (s >= plan.duration) {
    // Terminal state is exact by construction.
    out.pos = plan.target;
    return out;
  }

  const auto horner = [s](const double* c, int n, double& p, double& v, double& a) {
    p = 0.0;
    v = 0.0;
    a = 0.0;
    for (int i = n - 1; i >= 0; --i) {
      a = a * s + v * 2.0;
      v = v * s + p;
      p = p * s + c[i];
    }
  };

  double p = 0.0;
  double v = 0.0;
  double a = 0.0;
  horner(plan.cx.data(), 6, p, v, a);
  out.pos.x = p;
  out.vel.x = v;
  out.acc.x = a;
  horner(plan.cy.data(), 6, p, v, a);
  out.pos.y = p;
  out.vel.y = v;
  out.acc.y = a;
  horner(plan.cz.data(), 5, p, v, a);
  out.height = p;
  out.height_vel = v;
  return out;
}

}  // namespace wpg
