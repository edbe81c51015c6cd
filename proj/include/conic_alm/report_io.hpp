#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "conic_alm/alm.hpp"
#include "conic_alm/theory_lab.hpp"

// CSV and JSON emitters for traces and verifier reports. Decimals are written
// with 17 significant digits; column and key order is fixed.

namespace conic_alm {

inline constexpr const char* kTraceSchema = "conic-alm-trace/1";
inline constexpr const char* kSummarySchema = "conic-alm-summary/1";
inline constexpr const char* kReportSchema = "conic-alm-report/1";

/// Everything needed to rerun a command.
struct RunManifest {
  std::string command;
  nlohmann::ordered_json instance;  ///< builtin name + parameters, or the SDPA path
  AlmConfig config;
  std::uint64_t seed = 0;
  std::string timestamp;  ///< UTC, ISO 8601
  std::string version;
};

std::string format_double(double v);
/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();
const char* artifact_version();

nlohmann::ordered_json to_json(const AlmConfig& cfg);
nlohmann::ordered_json to_json(const RunManifest& m);
nlohmann::ordered_json to_json(const ResidualSet& r);

/// Column names of trace.csv for the given trace (dist columns only when the
/// first record carries them).
std::vector<std::string> trace_columns(const AlmTrace& trace);
/// "# schema=..." line, header, then one row per record. Missing values are empty.
void write_trace_csv(const AlmTrace& trace, std::ostream& out);
void write_trace_csv(const AlmTrace& trace, const std::filesystem::path& path);

/// Tail rate fits used in summaries; nullopt when the series is too short.
std::optional<RateFit> tail_rate(const std::vector<double>& series);
/// Series truncated before the first value below 1e-9 (the floor).
std::vector<double> eps3_series(const AlmTrace& trace);
std::vector<double> dist_dual_series(const AlmTrace& trace);

nlohmann::ordered_json summary_json(const AlmTrace& trace, const RunManifest& manifest);

nlohmann::ordered_json to_json(const GrowthReport& r);
nlohmann::ordered_json to_json(const CurveTable& t);
nlohmann::ordered_json to_json(const PreimageReport& r);
nlohmann::ordered_json to_json(const GrowthLemmaReport& r);
nlohmann::ordered_json to_json(const TraceBoundReport& r);
nlohmann::ordered_json to_json(const ComplementarityReport& r);
nlohmann::ordered_json to_json(const PenaltyEquivalenceReport& r);

/// Writes `j` with four-space indentation and a trailing newline.
void write_json(const nlohmann::ordered_json& j, const std::filesystem::path& path);

}  // namespace conic_alm
