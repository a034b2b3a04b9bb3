#include "hilbertctl/outputs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "hilbertctl/errors.hpp"

namespace hilbertctl {

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IOError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.close();
  if (!out) throw IOError("write failed for '" + path.string() + "'");
}

}  // namespace

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> emit_outputs(const RunResult& result,
                                      const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) {
    throw IOError("cannot create directory '" + root.string() +
                  "': " + ec.message());
  }
  std::vector<std::string> files;
  write_file(root / "report.json",
             dump_json(result.report.is_null() ? json::object()
                                               : result.report));
  files.push_back("report.json");
  for (const auto& t : result.tables) {
    if (t.name.empty() || t.name.find('/') != std::string::npos ||
        t.name == "report.json" || t.name == "summary.txt") {
      throw IOError("invalid table name '" + t.name + "'");
    }
    write_file(root / t.name, t.content);
    files.push_back(t.name);
  }
  if (!result.summary.empty()) {
    std::string text;
    for (const auto& line : result.summary) text += line + "\n";
    write_file(root / "summary.txt", text);
    files.push_back("summary.txt");
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace hilbertctl
