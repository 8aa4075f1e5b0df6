#include "wpg/trace_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace wpg {
namespace {

constexpr const char* kTraceVersion = "# wpg-trace v1";
constexpr const char* kTraceColumns =
    "t,com_x,com_y,dcm_x,dcm_y,zmp_x,zmp_y,cmp_x,cmp_y,pitch,roll,"
    "pitch_rate,roll_rate,swing_x,swing_y,swing_z,stance,phase,"
    "uT_x,uT_y,T_step,b_x,b_y,qp1_status,qp2_status";

// 12 significant digits: enough that decimal -> double -> decimal is exact.
std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

nlohmann::json vec2_json(const Vec2& v) { return nlohmann::json{v.x, v.y}; }

nlohmann::json run_block(const SimLog& log) {
  const RunMetrics m = compute_metrics(log);
  nlohmann::json j;
  j["status"] = log.ok() ? "ok" : "failed";
  j["failure_reason"] = to_string(log.failure);
  if (!log.ok()) j["t_failure"] = log.t_failure;
  j["mode"] = to_string(log.mode);
  j["v_des"] = log.v_des;
  j["t_end"] = log.t_end;
  j["cycles"] = m.cycles;
  j["steps"] = m.steps;
  j["metrics"] = {{"mean_velocity", m.mean_velocity},
                  {"peak_pitch", m.peak_pitch},
                  {"peak_roll", m.peak_roll},
                  {"final_pitch", m.final_pitch},
                  {"final_roll", m.final_roll},
                  {"peak_zmp_excursion", m.peak_zmp_excursion},
                  {"steps_to_recover", m.steps_to_recover}};
  return j;
}

nlohmann::json trials_json(const std::vector<EnvelopeTrial>& trials) {
  nlohmann::json arr = nlohmann::json::array();
  for (const EnvelopeTrial& t : trials)
    arr.push_back({{"magnitude", t.magnitude}, {"recovered", t.recovered}});
  return arr;
}

const char* to_string(EnvelopeMode m) {
  switch (m) {
    case EnvelopeMode::Stage1: return "stage1";
    case EnvelopeMode::Full: return "full";
    case EnvelopeMode::Both: return "both";
  }
  return "?";
}

// Ten comparison columns per mode, matching the header in compare_csv_text.
std::string compare_cells(const SimLog& log, std::size_t i) {
  if (i >= log.rows.size()) return ",,,,,,,,,";
  const SimRow& r = log.rows[i];
  std::string s;
  for (double v : {r.com.x, r.com.y, r.dcm.x, r.dcm.y, r.zmp.x, r.zmp.y, r.cmp.x,
                   r.cmp.y, r.pitch, r.roll}) {
    if (!s.empty()) s += ',';
    s += fmt(v);
  }
  return s;
}

}  // namespace

std::string trace_csv_text(const SimLog& log) {
  std::string out;
  out.reserve(64 + 220 * log.rows.size());
  out += kTraceVersion;
  out += '\n';
  out += kTraceColumns;
  out += '\n';
  for (const SimRow& r : log.rows) {
    const double numeric[] = {r.t,          r.com.x,     r.com.y,      r.dcm.x,
                              r.dcm.y,      r.zmp.x,     r.zmp.y,      r.cmp.x,
                              r.cmp.y,      r.pitch,     r.roll,       r.pitch_rate,
                              r.roll_rate,  r.swing_pos.x, r.swing_pos.y, r.swing_height};
    for (double v : numeric) {
      out += fmt(v);
      out += ',';
    }
    out += to_string(r.stance);
    out += ',';
    out += to_string(r.phase);
    out += ',';
    out += fmt(r.u_T.x);
    out += ',';
    out += fmt(r.u_T.y);
    out += ',';
    out += fmt(r.T_step);
    out += ',';
    out += fmt(r.b.x);
    out += ',';
    out += fmt(r.b.y);
    out += ',';
    out += to_string(r.qp1_status);
    out += ',';
    out += to_string(r.qp2_status);
    out += '\n';
  }
  return out;
}

void write_trace_csv(const std::string& path, const SimLog& log) {
  write_text_file(path, trace_csv_text(log));
}

int TraceData::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

std::vector<double> TraceData::numeric(const std::string& name) const {
  const int c = column(name);
  if (c < 0) throw std::invalid_argument("trace has no column '" + name + "'");
  std::vector<double> values;
  values.reserve(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::string& cell = cells[i][static_cast<std::size_t>(c)];
    std::size_t idx = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &idx);
    } catch (const std::exception&) {
      idx = std::string::npos;
    }
    if (idx != cell.size())
      throw std::invalid_argument("trace row " + std::to_string(i + 1) + " column '" +
                                  name + "': not a number: '" + cell + "'");
    values.push_back(v);
  }
  return values;
}

TraceData parse_trace_csv(const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  TraceData data;
  if (!std::getline(ss, line) || line.rfind("# ", 0) != 0)
    throw std::invalid_argument("trace: missing version comment on line 1");
  data.version = line;
  if (!std::getline(ss, line) || line.empty())
    throw std::invalid_argument("trace: missing column header on line 2");
  data.columns = split_csv(line);
  int lineno = 2;
  while (std::getline(ss, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells = split_csv(line);
    if (cells.size() != data.columns.size())
      throw std::invalid_argument("trace line " + std::to_string(lineno) + ": expected " +
                                  std::to_string(data.columns.size()) + " cells, got " +
                                  std::to_string(cells.size()));
    data.cells.push_back(std::move(cells));
  }
  return data;
}

TraceData read_trace_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_trace_csv(ss.str());
}

std::string summary_json_text(const SimLog& log) {
  nlohmann::json j = run_block(log);
  nlohmann::json pushes = nlohmann::json::array();
  for (const PushEvent& p : log.pushes)
    pushes.push_back({{"t_start", p.t_start},
                      {"duration", p.duration},
                      {"magnitude", p.magnitude},
                      {"psi", p.psi}});
  j["pushes"] = pushes;
  nlohmann::json steps = nlohmann::json::array();
  for (const StepRecord& s : log.steps)
    steps.push_back({{"index", s.index},
                     {"stance", to_string(s.stance)},
                     {"t_start", s.t_start},
                     {"t_touchdown", s.t_touchdown},
                     {"T_step", s.T_step},
                     {"u0", vec2_json(s.u0)},
                     {"u_T", vec2_json(s.u_T)},
                     {"b_end", vec2_json(s.b_end)}});
  j["steps_detail"] = steps;
  return j.dump(2) + "\n";
}

void write_summary_json(const std::string& path, const SimLog& log) {
  write_text_file(path, summary_json_text(log));
}

std::string envelope_csv_text(const EnvelopeResult& result) {
  std::string out = "# wpg-envelope v1\npsi,f_max_stage1,f_max_full\n";
  for (const EnvelopePoint& p : result.points) {
    out += fmt(p.psi);
    out += ',';
    out += fmt(p.f_max_stage1);
    out += ',';
    out += fmt(p.f_max_full);
    out += '\n';
  }
  return out;
}

void write_envelope_csv(const std::string& path, const EnvelopeResult& result) {
  write_text_file(path, envelope_csv_text(result));
}

std::string envelope_json_text(const EnvelopeResult& result) {
  nlohmann::json j;
  j["mode"] = to_string(result.mode);
  nlohmann::json points = nlohmann::json::array();
  for (const EnvelopePoint& p : result.points) {
    nlohmann::json pt;
    pt["psi"] = p.psi;
    if (result.mode != EnvelopeMode::Full) {
      pt["f_max_stage1"] = p.f_max_stage1;
      pt["reason_stage1"] = to_string(p.reason_stage1);
      pt["monotone_stage1"] = trials_monotone(p.trials_stage1);
      pt["trials_stage1"] = trials_json(p.trials_stage1);
    }
    if (result.mode != EnvelopeMode::Stage1) {
      pt["f_max_full"] = p.f_max_full;
      pt["reason_full"] = to_string(p.reason_full);
      pt["monotone_full"] = trials_monotone(p.trials_full);
      pt["trials_full"] = trials_json(p.trials_full);
    }
    points.push_back(std::move(pt));
  }
  j["points"] = points;
  return j.dump(2) + "\n";
}

void write_envelope_json(const std::string& path, const EnvelopeResult& result) {
  write_text_file(path, envelope_json_text(result));
}

std::string compare_csv_text(const CompareResult& result) {
  std::string out = "# wpg-compare v1\nt";
  for (const char* mode : {"s1", "full"})
    for (const char* col : {"com_x", "com_y", "dcm_x", "dcm_y", "zmp_x", "zmp_y",
                            "cmp_x", "cmp_y", "pitch", "roll"}) {
      out += ',';
      out += mode;
      out += '_';
      out += col;
    }
  out += '\n';
  const std::size_t n = std::max(result.stage1.rows.size(), result.full.rows.size());
  for (std::size_t i = 0; i < n; ++i) {
    const SimRow& any =
        i < result.full.rows.size() ? result.full.rows[i] : result.stage1.rows[i];
    out += fmt(any.t);
    out += ',';
    out += compare_cells(result.stage1, i);
    out += ',';
    out += compare_cells(result.full, i);
    out += '\n';
  }
  return out;
}

void write_compare_csv(const std::string& path, const CompareResult& result) {
  write_text_file(path, compare_csv_text(result));
}

std::string compare_json_text(const CompareResult& result) {
  nlohmann::json j;
  j["stage1_only"] = run_block(result.stage1);
  j["full"] = run_block(result.full);
  return j.dump(2) + "\n";
}

void write_compare_json(const std::string& path, const CompareResult& result) {
  write_text_file(path, compare_json_text(result));
}

}  // namespace wpg
