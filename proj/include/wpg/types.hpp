#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace wpg {

/// Which foot is the stance foot.
enum class Side { Left, Right };

inline Side other_side(Side s) { return s == Side::Left ? Side::Right : Side::Left; }
inline const char* to_string(Side s) { return s == Side::Left ? "L" : "R"; }

/// Planar vector in the horizontal plane. x points along the motion
/// direction, y to the left of it.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  double& operator[](int axis) { return axis == 0 ? x : y; }
  double operator[](int axis) const { return axis == 0 ? x : y; }

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }

  double norm() const { return std::hypot(x, y); }
  double inf_norm() const { return std::max(std::abs(x), std::abs(y)); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

/// Physical and controller parameters for the pattern generator.
///
/// Width bounds are labeled by the stance side: W_right_* constrain the
/// landing offset (relative to the stance foot, +y = left) while the right
/// foot is stance. W_nom is the unsigned nominal step width magnitude.
struct GaitConfig {
  // model
  double m = 60.0;        // total mass [kg]
  double g = 9.81;        // gravity [m/s^2]
  double h = 0.8;         // CoM height [m]
  double j = 8.0;         // flywheel (trunk) inertia [kg m^2]

  // trunk actuation limits, per axis
  double tau_max = 150.0;            // flywheel torque bound [Nm]
  double theta_min = -M_PI / 3.0;    // trunk angle bounds [rad]
  double theta_max = M_PI / 3.0;

  // step location/timing bounds (stance-relative)
  double L_min = -0.5, L_max = 0.5;          // step length [m]
  double W_right_min = -0.1, W_right_max = 0.2;  // width, right foot stance
  double W_left_min = -0.2, W_left_max = 0.1;    // width, left foot stance
  double T_min = 0.3, T_max = 1.0;           // step duration [s]

  // nominal gait
  double T_nom_ss = 0.55;  // single-support duration [s]
  double T_ds = 0.1;       // double-support duration [s]
  double W_nom = 0.15;     // step width magnitude [m]

  // feet geometry (rectangles centered on the foot point)
  double foot_length = 0.2;  // x extent [m]
  double foot_width = 0.1;   // y extent [m]

  // control rate
  double dt_s = 0.01;  // control cycle [s]

  // stage-1 weights (step location, timing, DCM offset)
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  double alpha3 = 1000.0;

  // stage-2 weights (ZMP tracking, DCM-acceleration input, trunk jerk,
  // trunk rate, terminal DCM). The input weights are regularizer-scale:
  // the squared-norm QP needs them far below the tracking weights or the
  // input-energy term outbids ZMP tracking and the optimum reshapes the
  // DCM flow off the support midline.
  double beta1 = 1.0;
  double beta2 = 1.0e-6;
  double beta3 = 1.0e-6;
  double beta4 = 1.0;
  double beta5 = 1.0e5;

  // swing foot
  double apex_height = 0.05;  // swing apex [m]

  // failure detection
  double failure_dcm_excursion = 1.0;  // ‖ξ − u0‖ bound [m]
  int failure_qp_cycles = 3;           // consecutive infeasible cycles

  double T_nom() const { return T_nom_ss + T_ds; }
  double omega0() const;          // sqrt(g/h)
  double theta_ddot_max() const { return tau_max / j; }
  double j_over_mg() const { return j / (m * g); }

  /// Throws std::invalid_argument when physically or logically inconsistent.
  void validate() const;

  /// Landing-offset bounds for the given stance side.
  double w_min(Side stance) const { return stance == Side::Right ? W_right_min : W_left_min; }
  double w_max(Side stance) const { return stance == Side::Right ? W_right_max : W_left_max; }

  /// Signed nominal landing offset while `stance` is the support foot
  /// (+y when the left foot is to be placed, i.e. right stance).
  double w_nom_signed(Side stance) const { return stance == Side::Right ? W_nom : -W_nom; }
};

}  // namespace wpg
