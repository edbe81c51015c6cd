#include "conic_alm/report_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

namespace conic_alm {

using nlohmann::ordered_json;

namespace {

constexpr double kSeriesFloor = 1e-9;

ordered_json opt(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json fit_json(const std::optional<RateFit>& f) {
  if (!f) return nullptr;
  return {{"rate_q", f->rate_q}, {"r_squared", f->r_squared}, {"points", f->points}};
}

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::vector<double> until_floor(std::vector<double> s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(s[i] >= kSeriesFloor)) {
      s.resize(i);
      break;
    }
  }
  return s;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

const char* artifact_version() { return CONIC_ALM_VERSION; }

ordered_json to_json(const AlmConfig& c) {
  return {{"r0", c.r0},         {"r_growth", c.r_growth},   {"r_max", c.r_max},
          {"eps0", c.eps0},     {"delta0", c.delta0},       {"decay", c.decay},
          {"max_outer", c.max_outer}, {"stop_eps3", c.stop_eps3},
          {"inner_max_iter", c.inner_max_iter}, {"diameter", c.diameter}};
}

ordered_json to_json(const RunManifest& m) {
  return {{"command", m.command}, {"instance", m.instance}, {"config", to_json(m.config)},
          {"seed", m.seed},       {"timestamp", m.timestamp}, {"version", m.version}};
}

ordered_json to_json(const ResidualSet& r) {
  return {{"eps1", opt(r.eps1)}, {"eps2", opt(r.eps2)}, {"eta1", r.eta[0]}, {"eta2", r.eta[1]},
          {"eta3", r.eta[2]},    {"eta4", r.eta[3]},    {"eta5", r.eta[4]}, {"eps3", r.eps3}};
}

std::vector<std::string> trace_columns(const AlmTrace& trace) {
  std::vector<std::string> cols = {"k",    "eps1", "eps2", "eta1",  "eta2",    "eta3",
                                   "eta4", "eta5", "eps3", "r_k",   "eps_k",   "delta_k",
                                   "inner_iterations", "inner_status", "gap_certificate",
                                   "criterion_a", "criterion_b", "step_norm"};
  if (!trace.records.empty()) {
    const IterationRecord& r = trace.records.front();
    if (r.dist_primal) cols.push_back("dist_primal");
    if (r.dist_dual) cols.push_back("dist_dual");
  }
  return cols;
}

void write_trace_csv(const AlmTrace& trace, std::ostream& out) {
  out << "# schema=" << kTraceSchema << " form=" << to_string(trace.form) << '\n';
  const std::vector<std::string> cols = trace_columns(trace);
  const bool has_primal = std::find(cols.begin(), cols.end(), "dist_primal") != cols.end();
  const bool has_dual = std::find(cols.begin(), cols.end(), "dist_dual") != cols.end();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const IterationRecord& r : trace.records) {
    out << r.k << ',' << cell(r.residuals.eps1) << ',' << cell(r.residuals.eps2);
    for (double e : r.residuals.eta) out << ',' << format_double(e);
    out << ',' << format_double(r.residuals.eps3) << ',' << format_double(r.r) << ','
        << format_double(r.eps) << ',' << format_double(r.delta) << ',' << r.inner_iterations
        << ',' << r.inner_status << ',' << format_double(r.gap_certificate) << ','
        << int(r.criterion_a) << ',' << int(r.criterion_b) << ',' << format_double(r.step_norm);
    if (has_primal) out << ',' << cell(r.dist_primal);
    if (has_dual) out << ',' << cell(r.dist_dual);
    out << '\n';
  }
}

void write_trace_csv(const AlmTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_trace_csv(trace, out);
}

std::optional<RateFit> tail_rate(const std::vector<double>& series) {
  try {
    return fit_linear_rate(series, 0.5);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

std::vector<double> eps3_series(const AlmTrace& trace) {
  std::vector<double> s;
  for (const IterationRecord& r : trace.records) s.push_back(r.residuals.eps3);
  return until_floor(std::move(s));
}

std::vector<double> dist_dual_series(const AlmTrace& trace) {
  std::vector<double> s;
  for (const IterationRecord& r : trace.records) {
    if (!r.dist_dual) return {};
    s.push_back(*r.dist_dual);
  }
  return until_floor(std::move(s));
}

ordered_json summary_json(const AlmTrace& trace, const RunManifest& manifest) {
  ordered_json j;
  j["schema_version"] = kSummarySchema;
  j["manifest"] = to_json(manifest);
  j["form"] = to_string(trace.form);
  j["problem"] = trace.problem_name;
  j["converged"] = trace.converged;
  j["outer_iterations"] = trace.records.size();
  if (trace.records.empty()) {
    j["final"] = nullptr;
  } else {
    const IterationRecord& last = trace.last();
    ordered_json f = to_json(last.residuals);
    f["r_k"] = last.r;
    f["dist_primal"] = opt(last.dist_primal);
    f["dist_dual"] = opt(last.dist_dual);
    j["final"] = f;
  }
  int inner_total = 0;
  for (const IterationRecord& r : trace.records) inner_total += r.inner_iterations;
  j["inner_iterations_total"] = inner_total;
  j["rates"] = {{"eps3", fit_json(tail_rate(eps3_series(trace)))},
                {"dist_dual", fit_json(tail_rate(dist_dual_series(trace)))}};
  j["warnings"] = trace.warnings;
  j["wall_seconds"] = trace.wall_seconds;
  return j;
}

ordered_json to_json(const GrowthReport& r) {
  ordered_json v = ordered_json::array();
  for (const GrowthSample& s : r.violated) {
    v.push_back({{"point", std::vector<double>(s.point.data(), s.point.data() + s.point.size())},
                 {"lhs", s.lhs},
                 {"dist_sq", s.dist_sq}});
  }
  return {{"sampled_points", r.sampled_points},
          {"counted_points", r.counted_points},
          {"min_ratio", r.counted_points > 0 ? ordered_json(r.min_ratio) : ordered_json(nullptr)},
          {"kappa", opt(r.kappa)},
          {"violation_count", r.violation_count},
          {"violations", v},
          {"gamma", r.gamma},
          {"alpha", r.alpha},
          {"rho", r.rho},
          {"ball_radius", r.ball_radius}};
}

ordered_json to_json(const CurveTable& t) {
  ordered_json rows = ordered_json::array();
  for (const CurveRow& r : t.rows) {
    rows.push_back({{"y1", r.y1}, {"y2", r.y2}, {"value_gap", r.value_gap},
                    {"closed_form", r.closed_form}, {"dist_lower", r.dist_lower},
                    {"dist", r.dist}, {"ratio", r.ratio}});
  }
  return {{"max_closed_form_error", t.max_closed_form_error},
          {"ratio_monotone", t.ratio_monotone},
          {"rows", rows}};
}

ordered_json to_json(const PreimageReport& r) {
  return {{"face_samples", r.face_samples},         {"face_passed", r.face_passed},
          {"off_face_samples", r.off_face_samples}, {"off_face_detected", r.off_face_detected},
          {"probes_per_point", r.probes_per_point}, {"face_dimension", r.face_dimension}};
}

ordered_json to_json(const GrowthLemmaReport& r) {
  return {{"kappa", r.kappa},
          {"lambda1_min", r.lambda1_min},
          {"samples", r.samples},
          {"violations", r.violations},
          {"min_ratio", r.min_ratio},
          {"penalty_kappa", opt(r.penalty_kappa)},
          {"penalty_violations", r.penalty_violations}};
}

ordered_json to_json(const TraceBoundReport& r) {
  return {{"samples", r.samples}, {"violations", r.violations}, {"max_excess", r.max_excess}};
}

ordered_json to_json(const ComplementarityReport& r) {
  return {{"rank_x", r.rank_x}, {"rank_z", r.rank_z}, {"holds", r.holds}};
}

ordered_json to_json(const PenaltyEquivalenceReport& r) {
  return {{"rho", r.rho},
          {"distance", r.distance},
          {"value_gap", r.value_gap},
          {"matches", r.matches},
          {"control_rho", r.control_rho},
          {"control_value", r.control_value},
          {"control_distance", r.control_distance},
          {"control_detected", r.control_detected}};
}

void write_json(const ordered_json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(4) << '\n';
}

}  // namespace conic_alm
