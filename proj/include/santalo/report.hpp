#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace santalo {

inline constexpr const char* kToolName = "santalo-lab";
inline constexpr const char* kToolVersion = "1.0.0";

struct ReportRow {
  std::string scenario;
  std::string quantity;
  double value = 0.0;
  double se = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  bool pass = true;
  bool flagged = false;  // expected violation / bound not claimed
  std::string detail;
  double seconds = 0.0;  // JSON only; the CSV must be byte-stable
};

struct RunInfo {
  std::string config_path;
  std::string generator;
  std::string version = kToolVersion;
  std::optional<std::uint64_t> seed_override;
  int workers = 0;
  std::string started_utc;
  double wall_seconds = 0.0;
};

// Full report with metadata and timings.
void write_report_json(const std::string& path, const std::vector<ReportRow>& rows,
                       const RunInfo& info);
// Deterministic summary: same seed + config => byte-identical file.
void write_report_csv(const std::string& path, const std::vector<ReportRow>& rows);

// Shortest round-trip decimal representation.
std::string format_double(double v);
std::string csv_escape(const std::string& s);

}  // namespace santalo
