#include "wpg/scenario.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace wpg {

namespace {

std::string trim(const std::string& s) {
  const size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) {
    return "";
  }
  const size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw std::invalid_argument("line " + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& v, int line) {
  size_t idx = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &idx);
  } catch (const std::exception&) {
    fail(line, "expected a number, got '" + v + "'");
  }
  if (idx != v.size()) {
    fail(line, "trailing characters in number '" + v + "'");
  }
  return x;
}

long parse_long(const std::string& v, int line) {
  size_t idx = 0;
  long x = 0;
  try {
    x = std::stol(v, &idx);
  } catch (const std::exception&) {
    fail(line, "expected an integer, got '" + v + "'");
  }
  if (idx != v.size()) {
    fail(line, "trailing characters in integer '" + v + "'");
  }
  return x;
}

const std::map<std::string, double GaitConfig::*>& config_fields() {
  static const std::map<std::string, double GaitConfig::*> fields = {
      {"m", &GaitConfig::m},
      {"g", &GaitConfig::g},
      {"h", &GaitConfig::h},
      {"j", &GaitConfig::j},
      {"tau_max", &GaitConfig::tau_max},
      {"theta_min", &GaitConfig::theta_min},
      {"theta_max", &GaitConfig::theta_max},
      {"L_min", &GaitConfig::L_min},
      {"L_max", &GaitConfig::L_max},
      {"W_right_min", &GaitConfig::W_right_min},
      {"W_right_max", &GaitConfig::W_right_max},
      {"W_left_min", &GaitConfig::W_left_min},
      {"W_left_max", &GaitConfig::W_left_max},
      {"T_min", &GaitConfig::T_min},
      {"T_max", &GaitConfig::T_max},
      {"T_nom_ss", &GaitConfig::T_nom_ss},
      {"T_ds", &GaitConfig::T_ds},
      {"W_nom", &GaitConfig::W_nom},
      {"foot_length", &GaitConfig::foot_length},
      {"foot_width", &GaitConfig::foot_width},
      {"dt_s", &GaitConfig::dt_s},
      {"alpha1", &GaitConfig::alpha1},
      {"alpha2", &GaitConfig::alpha2},
      {"alpha3", &GaitConfig::alpha3},
      {"beta1", &GaitConfig::beta1},
      {"beta2", &GaitConfig::beta2},
      {"beta3", &GaitConfig::beta3},
      {"beta4", &GaitConfig::beta4},
      {"beta5", &GaitConfig::beta5},
      {"apex_height", &GaitConfig::apex_height},
      {"failure_dcm_excursion", &GaitConfig::failure_dcm_excursion},
  };
  return fields;
}

}  // namespace

Scenario parse_scenario_text(const std::string& text) {
  Scenario sc;
  std::map<long, PushEvent> pushes;
  std::set<std::string> seen;

  std::istringstream stream(text);
  std::string raw;
  int line = 0;
  while (std::getline(stream, raw)) {
    ++line;
    const size_t hash = raw.find('#');
    if (hash != std::string::npos) {
      raw.erase(hash);
    }
    const std::string entry = trim(raw);
    if (entry.empty()) {
      continue;
    }
    const size_t eq = entry.find('=');
    if (eq == std::string::npos) {
      fail(line, "expected 'key = value', got '" + entry + "'");
    }
    const std::string key = trim(entry.substr(0, eq));
    const std::string value = trim(entry.substr(eq + 1));
    if (key.empty()) {
      fail(line, "empty key");
    }
    if (value.empty()) {
      fail(line, "empty value for key '" + key + "'");
    }
    if (!seen.insert(key).second) {
      fail(line, "duplicate key '" + key + "'");
    }

    if (key == "v_des") {
      sc.v_des = parse_double(value, line);
    } else if (key == "t_end") {
      sc.t_end = parse_double(value, line);
    } else if (key == "seed") {
      const long s = parse_long(value, line);
      if (s < 0) {
        fail(line, "seed must be non-negative");
      }
      sc.seed = static_cast<unsigned long>(s);
    } else if (key == "mode") {
      if (value == "full") {
        sc.mode = ControllerMode::Full;
      } else if (value == "stage1_only") {
        sc.mode = ControllerMode::Stage1Only;
      } else {
        fail(line, "mode must be 'full' or 'stage1_only', got '" + value + "'");
      }
    } else if (key == "start_stance") {
      if (value == "left") {
        sc.start_stance = Side::Left;
      } else if (value == "right") {
        sc.start_stance = Side::Right;
      } else {
        fail(line, "start_stance must be 'left' or 'right', got '" + value + "'");
      }
    } else if (key.rfind("config.", 0) == 0) {
      const std::string name = key.substr(7);
      if (name == "failure_qp_cycles") {
        sc.config.failure_qp_cycles = static_cast<int>(parse_long(value, line));
      } else {
        const auto& fields = config_fields();
        const auto it = fields.find(name);
        if (it == fields.end()) {
          fail(line, "unknown config parameter '" + name + "'");
        }
        sc.config.*(it->second) = parse_double(value, line);
      }
    } else if (key.rfind("push.", 0) == 0) {
      std::string rest = key.substr(5);
      long index = 0;
      if (!rest.empty() && std::isdigit(static_cast<unsigned char>(rest[0]))) {
        const size_t dot = rest.find('.');
        if (dot == std::string::npos) {
          fail(line, "push index needs a field, e.g. push.0.magnitude");
        }
        index = parse_long(rest.substr(0, dot), line);
        rest = rest.substr(dot + 1);
      }
      PushEvent& push = pushes[index];
      if (rest == "t_start") {
        push.t_start = parse_double(value, line);
      } else if (rest == "duration") {
        push.duration = parse_double(value, line);
      } else if (rest == "magnitude") {
        push.magnitude = parse_double(value, line);
      } else if (rest == "psi") {
        push.psi = parse_double(value, line);
      } else {
        fail(line, "unknown push field '" + rest + "'");
      }
    } else {
      fail(line, "unknown key '" + key + "'");
    }
  }

  for (const auto& [index, push] : pushes) {
    if (!(push.duration > 0.0)) {
      throw std::invalid_argument("push " + std::to_string(index) +
                                  ": duration must be positive");
    }
    if (!(push.magnitude >= 0.0)) {
      throw std::invalid_argument("push " + std::to_string(index) +
                                  ": magnitude must be non-negative");
    }
    sc.pushes.push_back(push);
  }

  sc.config.validate();
  if (!(sc.t_end > 0.0)) {
    throw std::invalid_argument("t_end must be positive");
  }
  if (!std::isfinite(sc.v_des)) {
    throw std::invalid_argument("v_des must be finite");
  }
  return sc;
}

Scenario parse_scenario_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) {
    throw std::invalid_argument(path + ": cannot open scenario file");
  }
  std::ostringstream buffer;
  buffer << file.rdbuf();
  try {
    return parse_scenario_text(buffer.str());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

}  // namespace wpg
