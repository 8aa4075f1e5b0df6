#pragma once

#include <string>
#include <vector>

#include "wpg/simulator.hpp"
#include "wpg/types.hpp"

namespace wpg {

/// One experiment definition: configuration overrides plus the run setup.
struct Scenario {
  GaitConfig config;
  double v_des = 0.5;
  double t_end = 10.0;
  ControllerMode mode = ControllerMode::Full;
  Side start_stance = Side::Left;
  unsigned long seed = 0;
  std::vector<PushEvent> pushes;
};

/**
 * @brief Parses the flat key=value scenario format.
 *
 * Lines hold `key = value` pairs; `#` starts a comment; blank lines are
 * ignored. Recognized keys: v_des, t_end, mode (full | stage1_only),
 * start_stance (left | right), seed, push.<field> or push.<index>.<field>
 * (t_start, duration, magnitude, psi) and config.<name> for every GaitConfig
 * parameter. Unknown or duplicate keys and malformed numbers are rejected
 * with a line diagnostic (std::invalid_argument).
 */
Scenario parse_scenario_text(const std::string& text);

/// parse_scenario_text on a file's contents; diagnostics carry the path.
Scenario parse_scenario_file(const std::string& path);

}  // namespace wpg
