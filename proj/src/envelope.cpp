#include "wpg/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wpg {

bool trials_monotone(const std::vector<EnvelopeTrial>& trials) {
  double max_recovered = -std::numeric_limits<double>::infinity();
  double min_failed = std::numeric_limits<double>::infinity();
  for (const EnvelopeTrial& t : trials) {
    if (t.recovered) {
      max_recovered = std::max(max_recovered, t.magnitude);
    } else {
      min_failed = std::min(min_failed, t.magnitude);
    }
  }
  return max_recovered < min_failed;
}

GaitConfig stage1_baseline_config(const GaitConfig& base) {
  GaitConfig cfg = base;
  cfg.T_nom_ss = base.T_nom_ss + base.T_ds;  // same nominal step time, no DS
  cfg.T_ds = 0.0;
  return cfg;
}

namespace {

bool push_trial(const GaitConfig& cfg, ControllerMode mode, double psi, double magnitude,
                double dt_push, FailureReason& reason) {
  PushEvent push;
  push.t_start = 2.0 * cfg.T_nom();  // start of the third step: left stance
  push.duration = dt_push;
  push.magnitude = magnitude;
  push.psi = psi;
  const double t_end = push.t_start + dt_push + 4.0;
  const SimLog log = run_closed_loop(cfg, 0.0, {push}, mode, t_end, Side::Left);
  reason = log.failure;
  return log.ok();
}

void sweep_direction(const GaitConfig& cfg, ControllerMode mode, double psi,
                     double F_hi_init, double dt_push, double& f_max,
                     FailureReason& reason, std::vector<EnvelopeTrial>& trials) {
  const double cap = 8.0 * F_hi_init;
  double lo = 0.0;  // largest recovered magnitude so far
  double hi = F_hi_init;
  FailureReason edge = FailureReason::None;

  // Double the probe until it fails (or hits the cap), then bisect to 1 N.
  while (true) {
    FailureReason r = FailureReason::None;
    const bool ok = push_trial(cfg, mode, psi, hi, dt_push, r);
    trials.push_back({hi, ok});
    if (!ok) {
      edge = r;
      break;
    }
    lo = hi;
    if (hi >= cap) {
      break;
    }
    hi = std::min(2.0 * hi, cap);
  }
  if (edge != FailureReason::None) {
    while (hi - lo > 1.0) {
      const double mid = 0.5 * (lo + hi);
      FailureReason r = FailureReason::None;
      const bool ok = push_trial(cfg, mode, psi, mid, dt_push, r);
      trials.push_back({mid, ok});
      if (ok) {
        lo = mid;
      } else {
        hi = mid;
        edge = r;
      }
    }
  }
  f_max = lo;
  reason = edge;
}

}  // namespace

EnvelopeResult run_envelope(const GaitConfig& config, int psi_count, double F_hi_init,
                            double dt_push, EnvelopeMode mode) {
  if (psi_count < 4) {
    throw std::invalid_argument("run_envelope: psi_count must be at least 4");
  }
  if (!(dt_push > 0.0)) {
    throw std::invalid_argument("run_envelope: dt_push must be positive");
  }
  if (!(F_hi_init > 0.0)) {
    throw std::invalid_argument("run_envelope: F_hi_init must be positive");
  }
  config.validate();

  const GaitConfig cfg_s1 = stage1_baseline_config(config);

  EnvelopeResult result;
  result.mode = mode;
  result.points.resize(psi_count);
  for (int k = 0; k < psi_count; ++k) {
    EnvelopePoint& pt = result.points[k];
    pt.psi = -M_PI + 2.0 * M_PI * k / psi_count;
    pt.f_max_stage1 = std::numeric_limits<double>::quiet_NaN();
    pt.f_max_full = std::numeric_limits<double>::quiet_NaN();
    if (mode != EnvelopeMode::Full) {
      sweep_direction(cfg_s1, ControllerMode::Stage1Only, pt.psi, F_hi_init, dt_push,
                      pt.f_max_stage1, pt.reason_stage1, pt.trials_stage1);
    }
    if (mode != EnvelopeMode::Stage1) {
      sweep_direction(config, ControllerMode::Full, pt.psi, F_hi_init, dt_push,
                      pt.f_max_full, pt.reason_full, pt.trials_full);
    }
  }
  return result;
}

CompareResult compare_modes(const Scenario& scenario) {
  CompareResult out;
  out.stage1 = run_closed_loop(scenario.config, scenario.v_des, scenario.pushes,
                               ControllerMode::Stage1Only, scenario.t_end,
                               scenario.start_stance);
  out.full = run_closed_loop(scenario.config, scenario.v_des, scenario.pushes,
                             ControllerMode::Full, scenario.t_end, scenario.start_stance);
  return out;
}

}  // namespace wpg
