#pragma once

#include <vector>

#include "wpg/scenario.hpp"
#include "wpg/simulator.hpp"
#include "wpg/types.hpp"

namespace wpg {

/// Which controller modes a sweep covers.
enum class EnvelopeMode { Stage1, Full, Both };

/// One simulated push trial during the bracket search.
struct EnvelopeTrial {
  double magnitude = 0.0;
  bool recovered = false;
};

/// Maximum recoverable push per direction; trials keep the search trace so the
/// monotonicity property stays checkable.
struct EnvelopePoint {
  double psi = 0.0;
  double f_max_stage1 = 0.0;
  double f_max_full = 0.0;
  FailureReason reason_stage1 = FailureReason::None;  // failure mode at the bracket edge
  FailureReason reason_full = FailureReason::None;
  std::vector<EnvelopeTrial> trials_stage1;
  std::vector<EnvelopeTrial> trials_full;
};

struct EnvelopeResult {
  EnvelopeMode mode = EnvelopeMode::Both;
  std::vector<EnvelopePoint> points;
};

/// True when every recovered trial magnitude lies below every failed one.
bool trials_monotone(const std::vector<EnvelopeTrial>& trials);

/// The step-adjustment-only baseline walks without double support: T_ds folds
/// into the single-support duration, leaving the nominal step time unchanged.
/// Feet keep their size so both modes share the same collision rule.
GaitConfig stage1_baseline_config(const GaitConfig& base);

/**
 * @brief Sweeps the maximum recoverable push over psi_count directions.
 *
 * Zero-velocity stepping; each trial applies one force of duration dt_push at
 * the start of the third step (a left-stance step). Starting from F_hi_init
 * the magnitude doubles while the gait recovers, then bisects to a bracket of
 * 1 N; F_max is the largest recovered magnitude. "Recovered" means no failure
 * through push end + 4 s.
 *
 * psi_count must be at least 4 and dt_push positive (std::invalid_argument).
 */
EnvelopeResult run_envelope(const GaitConfig& config, int psi_count = 16,
                            double F_hi_init = 600.0, double dt_push = 0.1,
                            EnvelopeMode mode = EnvelopeMode::Both);

/// Both controller modes on one scenario.
struct CompareResult {
  SimLog stage1;
  SimLog full;
};

CompareResult compare_modes(const Scenario& scenario);

}  // namespace wpg
