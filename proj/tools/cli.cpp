#include "conic_alm/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "conic_alm/report_io.hpp"
#include "conic_alm/sdpa_io.hpp"
#include "conic_alm/theory_lab.hpp"

namespace conic_alm::cli {

using nlohmann::ordered_json;

namespace {

// Bad flags or incompatible instance/form combinations.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string join_argv(int argc, const char* const* argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

AlmForm parse_form(const std::string& s) {
  if (s == "primal") return AlmForm::primal;
  if (s == "dual") return AlmForm::dual;
  if (s == "ineq") return AlmForm::ineq;
  throw InputError("unknown form '" + s + "' (expected primal, dual or ineq)");
}

void add_instance_options(CLI::App* cmd, InstanceArgs& a) {
  cmd->add_option("--builtin", a.builtin, "builtin instance name");
  cmd->add_option("--sdpa", a.sdpa, "SDPA-format input file");
  cmd->add_option("--n", a.n, "matrix size (synth, random-pair) or variables (lasso-random)");
  cmd->add_option("--m", a.m, "constraints (synth) or samples (svm-random, lasso-random)");
  cmd->add_option("--rank-x", a.rank_x, "rank of the primal solution");
  cmd->add_option("--d", a.d, "feature dimension (svm-random)");
  cmd->add_option("--lambda", a.lambda, "regularization weight");
  cmd->add_option("--seed", a.seed, "random seed");
}

void add_config_options(CLI::App* cmd, AlmConfig& c) {
  cmd->add_option("--r0", c.r0, "initial penalty parameter");
  cmd->add_option("--r-growth", c.r_growth, "penalty growth factor");
  cmd->add_option("--r-max", c.r_max, "penalty cap");
  cmd->add_option("--max-outer", c.max_outer, "outer iteration limit");
  cmd->add_option("--stop-eps3", c.stop_eps3, "stop when eps3 falls below this");
  cmd->add_option("--inner-max-iter", c.inner_max_iter, "inner iteration limit");
}

RunManifest make_manifest(const std::string& command, const LoadedInstance& inst,
                          const AlmConfig& cfg, std::uint64_t seed) {
  RunManifest m;
  m.command = command;
  m.instance = inst.descriptor;
  m.config = cfg;
  m.seed = seed;
  m.timestamp = utc_timestamp();
  m.version = artifact_version();
  return m;
}

void check_form(const LoadedInstance& inst, AlmForm form) {
  if (form == AlmForm::ineq && !inst.ineq) throw InputError("form ineq needs an inequality-form instance");
  if (form != AlmForm::ineq && !inst.sdp) throw InputError("forms primal/dual need an SDP instance");
}

void write_run(const AlmTrace& trace, const RunManifest& manifest, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_trace_csv(trace, dir / "trace.csv");
  write_json(summary_json(trace, manifest), dir / "summary.json");
}

std::string final_line(const AlmTrace& trace) {
  std::ostringstream s;
  s << trace.problem_name << " form=" << to_string(trace.form)
    << " iterations=" << trace.records.size();
  if (!trace.records.empty()) s << " eps3=" << format_double(trace.last().residuals.eps3);
  if (!trace.records.empty() && trace.last().dist_dual) {
    s << " dist_dual=" << format_double(*trace.last().dist_dual);
  }
  s << (trace.converged ? " converged" : " not-converged");
  return s.str();
}

std::string r_label(double r) {
  std::ostringstream s;
  s << r;
  return s.str();
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  std::string name;
  InstanceArgs inst;
  double mu = 1.0;
  int samples = 10000;
  std::optional<double> rho;
  std::optional<double> penalty_rho;
  std::optional<double> gamma;
  std::optional<double> alpha;
  std::optional<double> kappa;
  double radius = 1.0;
  std::string grid;
  int n_min = 2;
  int n_max = 8;
  int points = 100;
  std::string out;
};

const KnownSolutionInstance& need_known(const LoadedInstance& inst, const std::string& verifier) {
  if (!inst.known) throw InputError(verifier + " needs an instance with a known solution");
  return *inst.known;
}

GrowthOptions growth_options(const VerifyArgs& a) {
  GrowthOptions o;
  o.samples = a.samples;
  o.ball_radius = a.radius;
  o.seed = a.inst.seed;
  o.kappa = a.kappa;
  return o;
}

// Returns (result json, violation count).
std::pair<ordered_json, int> run_verifier(const VerifyArgs& a) {
  const std::string& v = a.name;
  if (v == "trace-bound") {
    const TraceBoundReport r = check_trace_bound(a.samples, a.n_min, a.n_max, a.inst.seed);
    return {to_json(r), r.violations};
  }
  if (v == "no-sharp-growth") {
    if (a.points < 1) throw InputError("--points must be positive");
    std::vector<double> grid;
    for (int i = 0; i < a.points; ++i) grid.push_back(static_cast<double>(i) / a.points);
    const CurveTable t = no_sharp_growth_curve(grid);
    const int bad = int(!(t.max_closed_form_error <= 1e-10)) + int(!t.ratio_monotone);
    return {to_json(t), bad};
  }
  if (v == "growth-lemma") {
    SymMatrix xbar(1), zbar(1);
    if (a.inst.builtin == "random-pair") {
      std::tie(xbar, zbar) = random_complementary_pair(a.inst.n, a.inst.rank_x, a.inst.seed);
    } else {
      const LoadedInstance inst = load_instance(a.inst);
      const KnownSolutionInstance& k = need_known(inst, v);
      xbar = k.x_star;
      zbar = k.z_star;
    }
    const GrowthLemmaReport r = verify_growth_lemma(xbar, zbar, a.mu, a.samples, a.inst.seed, a.penalty_rho);
    return {to_json(r), r.violations + r.penalty_violations};
  }

  const LoadedInstance inst = load_instance(a.inst);
  const KnownSolutionInstance& k = need_known(inst, v);
  const double gamma = a.gamma.value_or(default_gamma(k));
  const double alpha = a.alpha.value_or(default_alpha(k));
  if (v == "qg-primal" || v == "qg-dual") {
    std::optional<Grid2> grid;
    if (!a.grid.empty()) {
      if (a.grid != "fig-d1") throw InputError("unknown grid '" + a.grid + "'");
      grid = fig_d1_grid();
    }
    const bool penalty = a.rho.has_value();
    if (grid && !penalty) throw InputError("--grid requires --rho");
    const GrowthReport r = v == "qg-primal"
                               ? verify_qg_primal(k, gamma, growth_options(a), penalty, a.rho.value_or(0.0))
                               : verify_qg_dual(k, gamma, growth_options(a), penalty, a.rho.value_or(0.0), grid);
    return {to_json(r), r.violation_count};
  }
  if (v == "eb-primal" || v == "eb-dual") {
    const GrowthReport r = v == "eb-primal" ? verify_eb_primal(k, gamma, alpha, growth_options(a))
                                            : verify_eb_dual(k, gamma, alpha, growth_options(a));
    return {to_json(r), r.violation_count};
  }
  const double rho = a.rho.value_or(2.0 * k.z_star.trace() + 1.0);
  if (v == "penalty-preimage") {
    const int samples = std::min(a.samples, 1000);
    const PreimageReport r = verify_penalty_preimage(k.z_star, rho, samples, a.inst.seed);
    return {to_json(r), (r.face_samples - r.face_passed) + (r.off_face_samples - r.off_face_detected)};
  }
  if (v == "exact-penalty") {
    const PenaltyEquivalenceReport r = exact_penalty_equivalence(k, rho);
    return {to_json(r), int(!r.matches) + int(!r.control_detected)};
  }
  if (v == "strict-complementarity") {
    const ComplementarityReport r = check_strict_complementarity(k.x_star, k.z_star);
    return {to_json(r), int(!r.holds)};
  }
  throw InputError("unknown verifier '" + v + "'");
}

int cmd_verify(const VerifyArgs& a, const std::string& command, std::ostream& out, std::ostream& err) {
  std::pair<ordered_json, int> result;
  try {
    result = run_verifier(a);
  } catch (const std::invalid_argument& e) {
    err << "precondition failed: " << e.what() << '\n';
    return kInputError;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  ordered_json j;
  j["schema_version"] = kReportSchema;
  j["verifier"] = a.name;
  j["command"] = command;
  j["seed"] = a.inst.seed;
  j["version"] = artifact_version();
  j["violations"] = result.second;
  j["passed"] = result.second == 0;
  j["report"] = std::move(result.first);
  if (a.out.empty()) {
    out << j.dump(2) << '\n';
  } else {
    std::filesystem::create_directories(a.out);
    write_json(j, std::filesystem::path(a.out) / "report.json");
    out << a.name << ": violations=" << result.second << '\n';
  }
  return result.second == 0 ? kOk : kViolations;
}

}  // namespace

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("CONIC_ALM_DATA_DIR"); env && *env) return env;
  return CONIC_ALM_DATA_DIR;
}

LoadedInstance load_instance(const InstanceArgs& a) {
  if (a.builtin.empty() == a.sdpa.empty()) {
    throw std::invalid_argument("exactly one of --builtin and --sdpa is required");
  }
  LoadedInstance li;
  if (!a.sdpa.empty()) {
    li.sdp = sdpa_read(a.sdpa);
    li.descriptor = {{"sdpa", a.sdpa}};
    return li;
  }
  const std::string& b = a.builtin;
  li.descriptor = {{"builtin", b}};
  if (b == "example-d1") {
    li.known = example_d1();
  } else if (b == "synth") {
    li.known = synth_known_solution(a.n, a.m, a.rank_x, a.seed);
    li.descriptor.update({{"n", a.n}, {"m", a.m}, {"rank_x", a.rank_x}, {"seed", a.seed}});
  } else if (b == "maxcut-g1-20" || b == "maxcut-g2-20" || b == "maxcut-g3-20") {
    const std::string file = std::string("G") + b[8] + ".20";
    li.sdp = maxcut_instance(read_gset(data_dir() / "gset" / file), b);
    li.descriptor["file"] = file;
  } else if (b == "svm-random") {
    li.ineq = svm_random(a.m, a.d, a.lambda, a.seed);
    li.descriptor.update({{"m", a.m}, {"d", a.d}, {"lambda", a.lambda}, {"seed", a.seed}});
  } else if (b == "lasso-random") {
    li.ineq = lasso_random(a.m, a.n, a.lambda, a.seed);
    li.descriptor.update({{"m", a.m}, {"n", a.n}, {"lambda", a.lambda}, {"seed", a.seed}});
  } else {
    throw std::invalid_argument("unknown builtin instance '" + b + "'");
  }
  if (li.known) li.sdp = li.known->problem;
  return li;
}

AlmTrace solve_instance(const LoadedInstance& inst, AlmForm form, const AlmConfig& cfg) {
  check_form(inst, form);
  if (form == AlmForm::ineq) {
    return solve_ineq_alm(*inst.ineq, Eigen::VectorXd::Zero(inst.ineq->num_constraints()), cfg);
  }
  const SdpProblem& p = *inst.sdp;
  std::optional<SdpOracle> oracle;
  if (inst.known) oracle = oracle_of(*inst.known);
  if (form == AlmForm::primal) {
    const DualPoint w0{Eigen::VectorXd::Zero(p.m()), SymMatrix(p.n())};
    return solve_primal_alm(p, w0, cfg, oracle);
  }
  return solve_dual_alm(p, SymMatrix(p.n()), cfg, oracle);
}

unsigned bench_thread_cap() {
  unsigned cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CONIC_ALM_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v > 0) cap = static_cast<unsigned>(v);
  }
  return cap;
}

std::vector<AlmTrace> bench_traces(const LoadedInstance& inst, AlmForm form, const AlmConfig& cfg,
                                   const std::vector<double>& rs, unsigned threads) {
  check_form(inst, form);
  std::vector<AlmConfig> cfgs;
  for (double r : rs) {
    AlmConfig c = cfg;
    c.r0 = r;
    c.r_growth = 1.0;
    c.r_max = r;
    c.validate();
    cfgs.push_back(c);
  }
  std::vector<AlmTrace> traces(rs.size());
  std::vector<std::exception_ptr> errors(rs.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(rs.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < rs.size(); i += workers) {
        try {
          traces[i] = solve_instance(inst, form, cfgs[i]);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return traces;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Inexact augmented Lagrangian methods for semidefinite programs"};
  app.require_subcommand(1);
  const std::string command = join_argv(argc, argv);

  InstanceArgs solve_inst;
  AlmConfig solve_cfg;
  std::string solve_form = "primal";
  std::string solve_out = "conic_alm_out";
  CLI::App* solve = app.add_subcommand("solve", "run one ALM and write trace.csv and summary.json");
  add_instance_options(solve, solve_inst);
  add_config_options(solve, solve_cfg);
  solve->add_option("--form", solve_form, "primal | dual | ineq");
  solve->add_option("--out", solve_out, "output directory");

  VerifyArgs va;
  CLI::App* verify = app.add_subcommand("verify", "run a theory-lab verifier and write a JSON report");
  verify->add_option("verifier", va.name,
                     "growth-lemma | trace-bound | qg-primal | qg-dual | eb-primal | eb-dual | "
                     "penalty-preimage | exact-penalty | strict-complementarity | no-sharp-growth")
      ->required();
  add_instance_options(verify, va.inst);
  verify->add_option("--mu", va.mu, "ball radius of the growth lemma");
  verify->add_option("--samples", va.samples, "number of samples");
  verify->add_option("--rho", va.rho, "penalty parameter (selects the penalty variant for qg-*)");
  verify->add_option("--penalty-rho", va.penalty_rho, "also test the penalty growth lemma");
  verify->add_option("--gamma", va.gamma, "feasibility weight");
  verify->add_option("--alpha", va.alpha, "cone-distance weight");
  verify->add_option("--kappa", va.kappa, "asserted growth constant");
  verify->add_option("--radius", va.radius, "sampling ball radius");
  verify->add_option("--grid", va.grid, "fig-d1");
  verify->add_option("--n-min", va.n_min, "smallest block size (trace-bound)");
  verify->add_option("--n-max", va.n_max, "largest block size (trace-bound)");
  verify->add_option("--points", va.points, "curve points (no-sharp-growth)");
  verify->add_option("--out", va.out, "directory for report.json (stdout when omitted)");

  InstanceArgs bench_inst;
  AlmConfig bench_cfg;
  std::string bench_form = "primal";
  std::string bench_out = "conic_alm_bench";
  std::vector<double> bench_rs;
  CLI::App* bench = app.add_subcommand("bench", "compare runs with different fixed r");
  add_instance_options(bench, bench_inst);
  add_config_options(bench, bench_cfg);
  bench->add_option("--form", bench_form, "primal | dual | ineq");
  bench->add_option("--r", bench_rs, "comma-separated r values")->delimiter(',')->required();
  bench->add_option("--out", bench_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  if (*verify) return cmd_verify(va, command, out, err);

  const bool is_solve = static_cast<bool>(*solve);
  const InstanceArgs& ia = is_solve ? solve_inst : bench_inst;
  const AlmConfig& cfg = is_solve ? solve_cfg : bench_cfg;
  LoadedInstance inst;
  AlmForm form{};
  try {
    form = parse_form(is_solve ? solve_form : bench_form);
    cfg.validate();
    inst = load_instance(ia);
    check_form(inst, form);
    if (!is_solve) {
      if (bench_rs.empty()) throw InputError("--r needs at least one value");
      for (double r : bench_rs) {
        if (!(r > 0.0)) throw InputError("r values must be positive");
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  try {
    if (is_solve) {
      const AlmTrace trace = solve_instance(inst, form, cfg);
      write_run(trace, make_manifest(command, inst, cfg, ia.seed), solve_out);
      out << final_line(trace) << '\n';
      return trace.converged ? kOk : kNotConverged;
    }

    const std::vector<AlmTrace> traces = bench_traces(inst, form, cfg, bench_rs, bench_thread_cap());
    const std::filesystem::path root(bench_out);
    std::filesystem::create_directories(root);
    ordered_json runs = ordered_json::array();
    bool all = true;
    std::size_t rows = 0;
    for (std::size_t i = 0; i < traces.size(); ++i) {
      AlmConfig c = cfg;
      c.r0 = c.r_max = bench_rs[i];
      c.r_growth = 1.0;
      const std::string dir = "r_" + r_label(bench_rs[i]);
      write_run(traces[i], make_manifest(command, inst, c, ia.seed), root / dir);
      const std::vector<IterationRecord>& rec = traces[i].records;
      runs.push_back({{"r", bench_rs[i]},
                      {"directory", dir},
                      {"converged", traces[i].converged},
                      {"outer_iterations", rec.size()},
                      {"final_eps3", rec.empty() ? ordered_json(nullptr) : ordered_json(rec.back().residuals.eps3)},
                      {"eta1_at_k5", rec.size() >= 5 ? ordered_json(rec[4].residuals.eta[0]) : ordered_json(nullptr)}});
      all = all && traces[i].converged;
      rows = std::max(rows, rec.size());
      out << "r=" << r_label(bench_rs[i]) << ' ' << final_line(traces[i]) << '\n';
    }

    std::ofstream csv(root / "comparison.csv");
    csv << "# schema=conic-alm-bench/1\nk";
    for (double r : bench_rs) csv << ",eps3@r=" << r_label(r);
    for (double r : bench_rs) csv << ",eta1@r=" << r_label(r);
    csv << '\n';
    for (std::size_t k = 0; k < rows; ++k) {
      csv << k + 1;
      for (const AlmTrace& t : traces) {
        csv << ',' << (k < t.records.size() ? format_double(t.records[k].residuals.eps3) : "");
      }
      for (const AlmTrace& t : traces) {
        csv << ',' << (k < t.records.size() ? format_double(t.records[k].residuals.eta[0]) : "");
      }
      csv << '\n';
    }
    ordered_json summary;
    summary["schema_version"] = "conic-alm-bench/1";
    summary["command"] = command;
    summary["instance"] = inst.descriptor;
    summary["form"] = to_string(form);
    summary["version"] = artifact_version();
    summary["runs"] = runs;
    write_json(summary, root / "bench.json");
    return all ? kOk : kNotConverged;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
}

}  // namespace conic_alm::cli
