#pragma once

#include <string>
#include <vector>

#include "hilbertctl/serialize.hpp"

namespace hilbertctl {

/// A CSV payload with header row; `name` is a bare file name.
struct CsvTable {
  std::string name;
  std::string content;
};

/// What a command produced. An empty `report` (null) is written as {}.
struct RunResult {
  json report;
  std::vector<CsvTable> tables;
  std::vector<std::string> summary;
};

/// Writes report.json, every table, and summary.txt (only when there are
/// summary lines) into `dir`, creating it if needed. Returns the sorted
/// file names written. Throws IOError with the offending path.
std::vector<std::string> emit_outputs(const RunResult& result,
                                      const std::string& dir);

/// Stable text form used for report.json.
std::string dump_json(const json& j);

/// Formats doubles with 17 significant digits.
std::string csv_number(double v);

}  // namespace hilbertctl
