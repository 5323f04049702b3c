#include "santalo/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "nlohmann/json.hpp"
#include "santalo/errors.hpp"

namespace santalo {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  // %.17g round-trips every finite double.
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  bool need = false;
  for (char ch : s) {
    if (ch == ',' || ch == '"' || ch == '\n') {
      need = true;
      break;
    }
  }
  if (!need) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += "\"\"";
    else out += ch;
  }
  out += '"';
  return out;
}

static nlohmann::json row_json(const ReportRow& r) {
  nlohmann::json j;
  j["scenario"] = r.scenario;
  j["quantity"] = r.quantity;
  j["value"] = r.value;
  j["se"] = r.se;
  j["bound"] = r.bound;
  j["margin"] = r.margin;
  j["pass"] = r.pass;
  j["flagged"] = r.flagged;
  j["detail"] = r.detail;
  j["seconds"] = r.seconds;
  return j;
}

void write_report_json(const std::string& path, const std::vector<ReportRow>& rows,
                       const RunInfo& info) {
  nlohmann::json j;
  j["tool"] = kToolName;
  j["version"] = info.version;
  j["generator"] = info.generator;
  j["config"] = info.config_path;
  j["workers"] = info.workers;
  if (info.seed_override) j["seed_override"] = *info.seed_override;
  else j["seed_override"] = nullptr;
  j["started_utc"] = info.started_utc;
  j["wall_seconds"] = info.wall_seconds;
  int failures = 0;
  for (const auto& r : rows)
    if (!r.pass) ++failures;
  j["failures"] = failures;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) j["rows"].push_back(row_json(r));

  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open for writing: " + path);
  os << j.dump(2) << '\n';
}

void write_report_csv(const std::string& path, const std::vector<ReportRow>& rows) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open for writing: " + path);
  os << "scenario,quantity,value,se,bound,margin,pass,flagged,detail\n";
  for (const auto& r : rows) {
    os << csv_escape(r.scenario) << ',' << csv_escape(r.quantity) << ','
       << format_double(r.value) << ',' << format_double(r.se) << ','
       << format_double(r.bound) << ',' << format_double(r.margin) << ','
       << (r.pass ? "1" : "0") << ',' << (r.flagged ? "1" : "0") << ','
       << csv_escape(r.detail) << '\n';
  }
}

}  // namespace santalo
