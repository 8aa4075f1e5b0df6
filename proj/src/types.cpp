#include "wpg/types.hpp"

#include <cmath>
#include <sstream>

namespace wpg {

double GaitConfig::omega0() const {
  if (g <= 0.0 || h <= 0.0) {
    throw std::invalid_argument("GaitConfig: g and h must be positive");
  }
  return std::sqrt(g / h);
}

namespace {

void require(bool ok, const char* what) {
  if (!ok) {
    throw std::invalid_argument(std::string("GaitConfig: ") + what);
  }
}

}  // namespace

void GaitConfig::validate() const {
  require(m > 0.0, "mass must be positive");
  require(g > 0.0, "gravity must be positive");
  require(h > 0.0, "CoM height must be positive");
  require(j > 0.0, "flywheel inertia must be positive");
  require(tau_max > 0.0, "tau_max must be positive");
  require(theta_min < theta_max, "trunk angle bounds must be ordered");
  require(L_min <= L_max, "step length bounds must be ordered");
  require(W_right_min <= W_right_max, "right-stance width bounds must be ordered");
  require(W_left_min <= W_left_max, "left-stance width bounds must be ordered");
  require(T_min <= T_max, "step duration bounds must be ordered");
  require(T_min > 0.0, "T_min must be positive");
  require(T_nom_ss > 0.0, "T_nom_ss must be positive");
  require(T_ds >= 0.0, "T_ds must be non-negative");
  require(T_nom() >= T_min && T_nom() <= T_max, "nominal step duration outside [T_min, T_max]");
  require(W_nom >= 0.0, "W_nom is a magnitude");
  require(W_nom <= W_right_max && -W_nom >= W_left_min,
          "nominal width outside stance-side bounds");
  require(foot_length >= 0.0 && foot_width >= 0.0, "foot extents must be non-negative");
  require(dt_s > 0.0, "control cycle must be positive");
  require(alpha1 > 0.0 && alpha2 > 0.0 && alpha3 > 0.0, "stage-1 weights must be positive");
  // beta2/beta3 = 0 is allowed (the QP solver regularizes a singular
  // Hessian); the CoP-only reduction relies on it.
  require(beta1 >= 0.0 && beta2 >= 0.0 && beta3 >= 0.0 && beta4 >= 0.0 && beta5 >= 0.0,
          "stage-2 weights must be non-negative");
  require(failure_dcm_excursion > 0.0, "failure_dcm_excursion must be positive");
  require(failure_qp_cycles >= 1, "failure_qp_cycles must be at least 1");
}

}  // namespace wpg
