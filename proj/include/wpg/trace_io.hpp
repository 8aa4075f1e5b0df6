#pragma once

#include <string>
#include <vector>

#include "wpg/envelope.hpp"
#include "wpg/simulator.hpp"

namespace wpg {

/// Serializes a run to the versioned trace CSV. Numbers carry 12 significant
/// digits, so parsing and re-emitting a file reproduces it byte for byte.
std::string trace_csv_text(const SimLog& log);
void write_trace_csv(const std::string& path, const SimLog& log);

/// Parsed trace file: version comment, column names and raw cells.
struct TraceData {
  std::string version;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> cells;

  /// Column index by name, -1 when absent.
  int column(const std::string& name) const;
  /// Numeric column by name; throws std::invalid_argument when missing.
  std::vector<double> numeric(const std::string& name) const;
};

TraceData parse_trace_csv(const std::string& text);
TraceData read_trace_csv(const std::string& path);

std::string summary_json_text(const SimLog& log);
void write_summary_json(const std::string& path, const SimLog& log);

std::string envelope_csv_text(const EnvelopeResult& result);
void write_envelope_csv(const std::string& path, const EnvelopeResult& result);
std::string envelope_json_text(const EnvelopeResult& result);
void write_envelope_json(const std::string& path, const EnvelopeResult& result);

std::string compare_csv_text(const CompareResult& result);
void write_compare_csv(const std::string& path, const CompareResult& result);
std::string compare_json_text(const CompareResult& result);
void write_compare_json(const std::string& path, const CompareResult& result);

}  // namespace wpg
