#include "obslab/app/report.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace obslab::app {

namespace fs = std::filesystem;

Verdict check(std::string name, double value, std::string comparison, double threshold, std::string anchor,
              bool gating) {
  Verdict v{std::move(name), value, std::move(comparison), threshold, std::move(anchor), gating, false};
  if (v.comparison == "<=") v.passed = value <= threshold;
  else if (v.comparison == "<") v.passed = value < threshold;
  else if (v.comparison == ">=") v.passed = value >= threshold;
  else if (v.comparison == ">") v.passed = value > threshold;
  else if (v.comparison == "==") v.passed = value == threshold;
  else throw Error("unknown comparison " + v.comparison);
  return v;
}

Verdict check_true(std::string name, bool ok, std::string anchor, bool gating) {
  return check(std::move(name), ok ? 1.0 : 0.0, "==", 1.0, std::move(anchor), gating);
}

void Series::add_column(std::string header, std::vector<double> values) {
  if (!data.empty() && values.size() != data.front().size())
    throw Error("series " + name + ": column " + header + " has a different length");
  columns.push_back(std::move(header));
  data.push_back(std::move(values));
}

void Report::monitor_wrap(double mass) {
  wrap_monitored = true;
  max_wrap_mass = std::max(max_wrap_mass, mass);
}

bool Report::passed() const {
  for (const auto& v : verdicts)
    if (v.gating && !v.passed) return false;
  return true;
}

Json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

Json numbers(const std::vector<double>& xs) {
  Json a = Json::array();
  for (double x : xs) a.push_back(number(x));
  return a;
}

Json Report::to_json() const {
  Json j;
  j["experiment"] = experiment;
  j["version"] = kToolVersion;
  j["config"] = config;
  j["results"] = results;
  Json vs = Json::array();
  for (const auto& v : verdicts) {
    Json e;
    e["name"] = v.name;
    e["passed"] = v.passed;
    e["value"] = number(v.value);
    e["comparison"] = v.comparison;
    e["threshold"] = number(v.threshold);
    e["anchor"] = v.anchor;
    e["gating"] = v.gating;
    vs.push_back(e);
  }
  j["verdicts"] = vs;
  Json wrap;
  wrap["monitored"] = wrap_monitored;
  wrap["max_boundary_mass"] = number(max_wrap_mass);
  wrap["threshold"] = kWrapThreshold;
  wrap["flagged"] = wrap_monitored && max_wrap_mass > kWrapThreshold;
  j["wrap_monitor"] = wrap;
  Json files = Json::array();
  for (const auto& s : series) files.push_back(s.name + ".csv");
  for (const auto& d : dumps) files.push_back(d.name + ".bin");
  j["files"] = files;
  j["passed"] = passed();
  return j;
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

std::string format_csv_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string to_csv(const Series& s) {
  std::string out;
  bool first = true;
  if (!s.text_header.empty()) {
    out += s.text_header;
    first = false;
  }
  for (const auto& c : s.columns) {
    out += (first ? "" : ",") + c;
    first = false;
  }
  out += "\n";
  const std::size_t rows = s.data.empty() ? s.text_column.size() : s.data.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    first = true;
    if (!s.text_header.empty()) {
      out += s.text_column.at(r);
      first = false;
    }
    for (const auto& col : s.data) {
      out += (first ? "" : ",") + format_csv_number(col[r]);
      first = false;
    }
    out += "\n";
  }
  return out;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

void write_field_dump(const fs::path& dir, const FieldDump& d) {
  std::string bytes;
  bytes.reserve(d.field.size() * 8);
  auto put = [&bytes](float x) {
    auto u = std::bit_cast<std::uint32_t>(x);
    for (int b = 0; b < 4; ++b) bytes.push_back(static_cast<char>((u >> (8 * b)) & 0xFF));
  };
  for (const auto& z : d.field.values) {
    put(static_cast<float>(z.real()));
    put(static_cast<float>(z.imag()));
  }
  write_text_file(dir / (d.name + ".bin"), bytes);
  const GridSpec& g = d.field.grid;
  Json side;
  side["file"] = d.name + ".bin";
  side["dtype"] = "complex64";
  side["byte_order"] = "little";
  side["layout"] = "row-major, axis 0 slowest";
  side["shape"] = std::vector<std::size_t>(static_cast<std::size_t>(g.dim), g.points_per_axis);
  side["grid"] = Json{{"dim", g.dim}, {"half_extent", g.half_extent}, {"points", g.points_per_axis},
                      {"spacing", g.spacing()}, {"origin", -g.half_extent}};
  write_text_file(dir / (d.name + ".json"), dump_json(side));
}

void write_report(const fs::path& dir, const Report& r) {
  fs::create_directories(dir);
  for (const auto& s : r.series) write_text_file(dir / (s.name + ".csv"), to_csv(s));
  for (const auto& d : r.dumps) write_field_dump(dir, d);
  Json timing;
  timing["experiment"] = r.experiment;
  timing["wall_clock_seconds"] = r.wall_seconds;
  write_text_file(dir / "timing.json", dump_json(timing));
  write_text_file(dir / "report.json", dump_json(r.to_json()));
}

}  // namespace obslab::app
