#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "obslab/app/config.hpp"

namespace obslab::app {

inline constexpr const char* kToolVersion = "0.3.0";

/// One numeric check. `comparison` is "<=", "<", ">=", ">" or "==".
/// Non-gating verdicts are reported but leave the exit code alone.
struct Verdict {
  std::string name;
  double value = 0.0;
  std::string comparison;
  double threshold = 0.0;
  std::string anchor;  // stable identifier of the property checked
  bool gating = true;
  bool passed = false;
};

Verdict check(std::string name, double value, std::string comparison, double threshold, std::string anchor,
              bool gating = true);
/// A boolean property, recorded as value 1/0 against "== 1".
Verdict check_true(std::string name, bool ok, std::string anchor, bool gating = true);

/// Named CSV table; all columns have equal length.
struct Series {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> data;  // [column][row]
  std::vector<std::string> text_column;   // optional leading string column
  std::string text_header;

  void add_column(std::string header, std::vector<double> values);
};

struct FieldDump {
  std::string name;
  Field field;
};

struct Report {
  std::string experiment;
  Json config;
  Json results = Json::object();
  std::vector<Verdict> verdicts;
  std::vector<Series> series;
  std::vector<FieldDump> dumps;
  double max_wrap_mass = 0.0;
  bool wrap_monitored = false;
  double wall_seconds = 0.0;  // written to timing.json only

  void add(Verdict v) { verdicts.push_back(std::move(v)); }
  void monitor_wrap(double mass);
  bool passed() const;
  Json to_json() const;
};

/// Finite doubles as numbers; inf and nan as strings so the file stays JSON.
Json number(double x);
Json numbers(const std::vector<double>& xs);

/// Stable JSON text: two-space indent, trailing newline.
std::string dump_json(const Json& j);

std::string format_csv_number(double x);
std::string to_csv(const Series& s);
void write_text_file(const std::filesystem::path& path, const std::string& text);
/// Little-endian complex64 (float32 re, im) plus a JSON sidecar.
void write_field_dump(const std::filesystem::path& dir, const FieldDump& d);

/// Writes report.json, timing.json, every series and dump under dir.
void write_report(const std::filesystem::path& dir, const Report& r);

}  // namespace obslab::app
