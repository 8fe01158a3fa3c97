// Command-line surface for the hyperentangled-state analysis library:
// detector-basis inspection, Bell-functional evaluation and optimization,
// bounds, steering, count simulation, and visibility/steering scans.
// All output is byte-reproducible given the seed: headers carry the full
// configuration and never a clock.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hyperbell/hyperbell.hpp"

using namespace hyperbell;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Grid {
  double lo = 0.0, hi = 0.0, step = 0.0;
  std::vector<double> points() const {
    std::vector<double> p;
    for (int k = 0;; ++k) {
      double v = lo + k * step;
      if (v > hi + 1e-12) break;
      p.push_back(std::min(v, hi));
    }
    return p;
  }
};

// "lo:hi:step" or a single value.
Grid parse_grid(const std::string& text, const char* flag) {
  Grid g;
  auto bad = [&] {
    throw ConfigError(std::string(flag) + ": expected VALUE or LO:HI:STEP, got '" +
                      text + "'");
  };
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(tok, &used));
      if (used != tok.size()) bad();
    } catch (const std::logic_error&) {
      bad();
    }
  }
  if (parts.size() == 1) {
    g.lo = g.hi = parts[0];
    g.step = 1.0;
  } else if (parts.size() == 3) {
    g.lo = parts[0];
    g.hi = parts[1];
    g.step = parts[2];
    if (g.step <= 0.0) throw ConfigError(std::string(flag) + ": step must be positive");
    if (g.hi < g.lo) throw ConfigError(std::string(flag) + ": empty range");
  } else {
    bad();
  }
  if (g.lo < 0.0 || g.hi > 1.0)
    throw ConfigError(std::string(flag) + ": grid must lie in [0,1]");
  return g;
}

struct StateFlags {
  std::string family = "psi4";
  double phi_p = 0.0, phi_t = 0.0;
  double phi_e1 = 0.0, phi_e2 = M_PI, phi_r = 0.0;
  double lambda_pol = 1.0, lambda_time = 1.0, lambda = 1.0;

  void add_to(CLI::App* cmd, bool with_noise) {
    cmd->add_option("--state", family,
                    "state family: pol_only, time_only, hyper, psi4, phi4, "
                    "phi4_phased");
    cmd->add_option("--phi-p", phi_p, "polarization pair phase, radians");
    cmd->add_option("--phi-t", phi_t, "time-bin pair phase, radians");
    cmd->add_option("--phi-e1", phi_e1, "first sector phase, radians");
    cmd->add_option("--phi-e2", phi_e2, "second sector phase, radians");
    cmd->add_option("--phi-r", phi_r, "reference phase, radians");
    if (with_noise) {
      cmd->add_option("--lambda-pol", lambda_pol, "polarization visibility in [0,1]");
      cmd->add_option("--lambda-time", lambda_time, "temporal visibility in [0,1]");
      cmd->add_option("--lambda", lambda, "mixing parameter in [0,1]");
    }
  }

  StateSpec spec() const {
    StateSpec s;
    try {
      s.family = family_from_name(family);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    s.phi_p = phi_p;
    s.phi_t = phi_t;
    s.phi_e1 = phi_e1;
    s.phi_e2 = phi_e2;
    s.phi_r = phi_r;
    return s;
  }

  bool pure() const {
    return lambda_pol == 1.0 && lambda_time == 1.0 && lambda == 1.0;
  }

  // Noise model keyed by family: the product model dephases each carrier of a
  // doubly entangled pair, the mixing model floors the four-level pair.
  Mat density() const {
    StateSpec s = spec();
    if (pure()) {
      Vec psi = make_state(s);
      return psi * psi.adjoint();
    }
    NoiseSpec n{lambda_pol, lambda_time, lambda};
    if (s.family == Family::psi4 || s.family == Family::hyper)
      return apply_noise(s, n, NoiseModel::product_dephase);
    if (s.family == Family::phi4 || s.family == Family::phi4_phased)
      return apply_noise(s, n, NoiseModel::rho4);
    throw ConfigError("state family '" + family + "' has no noise model");
  }

  void record(TableWriter& w, bool with_noise) const {
    w.header("state", family);
    w.header("phi_p", format_double(phi_p));
    w.header("phi_t", format_double(phi_t));
    w.header("phi_e1", format_double(phi_e1));
    w.header("phi_e2", format_double(phi_e2));
    w.header("phi_r", format_double(phi_r));
    if (with_noise) {
      w.header("lambda_pol", format_double(lambda_pol));
      w.header("lambda_time", format_double(lambda_time));
      w.header("lambda", format_double(lambda));
    }
  }
};

struct OutputFlags {
  std::string format = "csv";
  std::string out;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--format", format, "output format: csv or json");
    cmd->add_option("--out", out, "output path (default: stdout)");
  }

  void validate() const {
    if (format != "csv" && format != "json")
      throw ConfigError("--format must be csv or json");
    if (!out.empty()) {
      std::ofstream probe(out, std::ios::app);
      if (!probe) throw ConfigError("cannot write '" + out + "'");
    }
  }

  void write(const TableWriter& w) const {
    if (out.empty()) {
      w.write(std::cout);
      return;
    }
    std::ofstream os(out);
    if (!os) throw ConfigError("cannot write '" + out + "'");
    w.write(os);
  }
};

TableWriter make_writer(const OutputFlags& of, const std::string& command,
                        std::vector<std::string> columns) {
  TableWriter w(of.format, std::move(columns));
  w.header("tool", "hyperbell");
  w.header("version", kVersion);
  w.header("schema_version", kSchemaVersion);
  w.header("command", command);
  return w;
}

// Inequality resolution: builtin name, explicit file path, then
// <registry>/<name>.json with the registry from --registry or the
// HYPERBELL_REGISTRY environment variable.
BellFunctional resolve_inequality(const std::string& name, const std::string& registry) {
  if (name == "i18") return builtin_i18();
  if (name == "chsh") return builtin_chsh();
  auto try_load = [](const std::string& path) -> std::optional<BellFunctional> {
    std::ifstream probe(path);
    if (!probe) return std::nullopt;
    return load_functional(path);
  };
  try {
    if (auto f = try_load(name)) return *f;
    std::string dir = registry;
    if (dir.empty())
      if (const char* env = std::getenv("HYPERBELL_REGISTRY")) dir = env;
    if (!dir.empty())
      if (auto f = try_load(dir + "/" + name + ".json")) return *f;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown inequality '" + name +
                    "' (builtin: i18, chsh; or a file path, or a name in the "
                    "registry directory)");
}

std::string bound_cell(const std::optional<double>& b) {
  return b ? format_double(*b) : "nan";
}

const char* level_label(int level) {
  static const char* kLabels[4] = {"Ht1", "Ht2", "Vt1", "Vt2"};
  return kLabels[level];
}

AnalyzerSettings settings_from_degrees(const std::vector<double>& deg) {
  AnalyzerSettings s;
  s.hwp1 = deg[0] * kDegree;
  s.qwp1 = deg[1] * kDegree;
  s.hwp2 = deg[2] * kDegree;
  s.qwp2 = deg[3] * kDegree;
  s.hwp3 = deg[4] * kDegree;
  s.qwp3 = deg[5] * kDegree;
  return s;
}

std::vector<double> parse_settings_list(const std::string& text) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      vals.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::logic_error&) {
      throw ConfigError("--settings: '" + tok + "' is not a number");
    }
  }
  if (vals.size() != 6)
    throw ConfigError("--settings: expected 6 comma-separated angles in degrees "
                      "(hwp1,qwp1,hwp2,qwp2,hwp3,qwp3)");
  return vals;
}

struct PlanSource {
  std::string settings_file;
  void add_to(CLI::App* cmd) {
    cmd->add_option("--settings-file", settings_file,
                    "measurement plan JSON (default: builtin working point)");
  }
  std::pair<MeasurementPlan, MeasurementPlan> resolve(OutcomeMode mode) const {
    MeasurementPlan pa, pb;
    if (settings_file.empty()) {
      pa = reference_plan_a();
      pb = reference_plan_b();
    } else {
      try {
        LoadedPlans lp = load_plans(settings_file);
        pa = lp.planA;
        pb = lp.planB;
      } catch (const std::exception& e) {
        throw ConfigError(e.what());
      }
    }
    pa.mode = pb.mode = mode;
    return {pa, pb};
  }
  std::string describe() const {
    return settings_file.empty() ? std::string("builtin") : settings_file;
  }
};

OutcomeMode mode_for(const BellFunctional& f) {
  return f.nA == 2 && f.nB == 2 ? OutcomeMode::portA_vs_portB
                                : OutcomeMode::detector1_vs_rest;
}

int run_basis(const std::string& settings_text, const OutputFlags& of) {
  AnalyzerSettings s = settings_from_degrees(parse_settings_list(settings_text));
  TableWriter w = make_writer(of, "basis", {"detector", "component", "re", "im"});
  w.header("settings_deg", settings_text);
  DetectorBasis basis = detector_basis(s);
  for (int det = 0; det < 4; ++det)
    for (int level = 0; level < 4; ++level) {
      cx amp = basis[det](level);
      if (std::abs(amp) < 1e-12) continue;
      w.row({"D" + std::to_string(det + 1), level_label(level),
             format_double(amp.real()), format_double(amp.imag())});
    }
  of.write(w);
  return kExitOk;
}

int run_chsh(const StateFlags& sf, const OutputFlags& of) {
  Mat rho = sf.density();
  MeasurementPlan pa = chsh_plan_a(), pb = chsh_plan_b();
  auto tables = binarized_tables(rho, pa, pb);
  Eigen::Matrix2d e;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) e(i, j) = correlator(tables[i][j]);
  // Best placement of the odd sign over the four correlators; the analysis
  // angles fix the measurements, the sign pattern is a labeling choice.
  double s_best = -8.0;
  for (int k = 0; k < 4; ++k) {
    double s = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) s += (2 * i + j == k ? -1.0 : 1.0) * e(i, j);
    s_best = std::max(s_best, std::fabs(s));
  }
  TableWriter w = make_writer(of, "chsh",
                              {"E00", "E01", "E10", "E11", "S", "S_best"});
  sf.record(w, true);
  w.header("anglesA_deg", format_double(kChshAnglesAdeg[0]) + "," +
                              format_double(kChshAnglesAdeg[1]));
  w.header("anglesB_deg", format_double(kChshAnglesBdeg[0]) + "," +
                              format_double(kChshAnglesBdeg[1]));
  w.row({format_double(e(0, 0)), format_double(e(0, 1)), format_double(e(1, 0)),
         format_double(e(1, 1)), format_double(chsh_value(e)),
         format_double(s_best)});
  of.write(w);
  return kExitOk;
}

int run_i4422_evaluate(const StateFlags& sf, const PlanSource& ps,
                       const BellFunctional& f, const OutputFlags& of) {
  auto [pa, pb] = ps.resolve(mode_for(f));
  if (static_cast<int>(pa.settings.size()) != f.nA ||
      static_cast<int>(pb.settings.size()) != f.nB)
    throw ConfigError("plan size does not match inequality settings count");
  Mat rho = sf.density();
  double value = evaluate_on_state(f, rho, pa, pb);
  TableWriter w = make_writer(of, "i4422 evaluate",
                              {"value", "local_bound", "qubit_bound",
                               "apparatus_max", "quantum_bound"});
  sf.record(w, true);
  w.header("inequality", f.name);
  w.header("settings_source", ps.describe());
  w.row({format_double(value), bound_cell(f.bound_local), bound_cell(f.bound_qubit),
         bound_cell(f.bound_apparatus_max), bound_cell(f.bound_quantum)});
  of.write(w);
  return kExitOk;
}

int run_i4422_optimize(const StateFlags& sf, const BellFunctional& f, int starts,
                       std::uint64_t seed, const std::string& save_plan,
                       const OutputFlags& of) {
  OptimizerConfig cfg;
  cfg.starts = starts;
  cfg.seed = seed;
  Mat rho = sf.density();
  OptimizeResult r = optimize_settings(rho, f, cfg);
  if (!save_plan.empty()) {
    std::ofstream os(save_plan);
    if (!os) throw ConfigError("cannot write '" + save_plan + "'");
    os << plan_to_json(r.planA, r.planB, r.value).dump(2) << "\n";
  }
  TableWriter w = make_writer(of, "i4422 optimize",
                              {"value", "best_start", "evals"});
  sf.record(w, true);
  w.header("inequality", f.name);
  w.header("starts", std::to_string(starts));
  w.header("seed", std::to_string(seed));
  w.row({format_double(r.value), std::to_string(r.best_start),
         std::to_string(r.evals)});
  of.write(w);
  return kExitOk;
}

int run_bound_local(const BellFunctional& f, const OutputFlags& of) {
  TableWriter w = make_writer(of, "bound local", {"inequality", "local_bound"});
  w.header("inequality", f.name);
  w.row({f.name, format_double(local_bound_bruteforce(f))});
  of.write(w);
  return kExitOk;
}

int run_bound_seesaw(const BellFunctional& f, int dim, int starts,
                     std::uint64_t seed, const OutputFlags& of) {
  OptimizerConfig cfg;
  cfg.starts = starts;
  cfg.seed = seed;
  SeesawResult r = seesaw_bound(f, dim, cfg);
  TableWriter w = make_writer(of, "bound seesaw",
                              {"inequality", "dim", "value", "best_start",
                               "iterations"});
  w.header("inequality", f.name);
  w.header("dim", std::to_string(dim));
  w.header("starts", std::to_string(starts));
  w.header("seed", std::to_string(seed));
  w.row({f.name, std::to_string(dim), format_double(r.value),
         std::to_string(r.best_start), std::to_string(r.best_trace.size())});
  of.write(w);
  return kExitOk;
}

int run_steer_eval(const StateFlags& sf, const OutputFlags& of) {
  Mat rho = sf.density();
  MeasurementPlan plan = steering_plan();
  Eigen::Matrix4d tx = outcome_table(rho, plan.settings[0], plan.settings[0]);
  Eigen::Matrix4d tz = outcome_table(rho, plan.settings[1], plan.settings[1]);
  double s = steering_from_tables(tx, tz);
  PortPhaseProbabilities pp = phase_probabilities(tx);
  TableWriter w = make_writer(of, "steer eval",
                              {"steering_value", "threshold", "p1", "p2",
                               "phase_estimate"});
  sf.record(w, true);
  std::string phase = "nan";
  try {
    phase = format_double(extract_phase(pp.p1, pp.p2));
  } catch (const std::domain_error&) {
  }
  w.row({format_double(s), format_double(steering_threshold()),
         format_double(pp.p1), format_double(pp.p2), phase});
  of.write(w);
  return kExitOk;
}

int run_counts_simulate(const StateFlags& sf, const PlanSource& ps,
                        const BellFunctional& f, long long n, int reps,
                        std::uint64_t seed, int bootstrap,
                        const std::string& dump_counts, const OutputFlags& of) {
  if (n <= 0) throw ConfigError("--n must be positive");
  if (reps <= 0) throw ConfigError("--reps must be positive");
  OutcomeMode mode = mode_for(f);
  auto [pa, pb] = ps.resolve(mode);
  if (static_cast<int>(pa.settings.size()) != f.nA ||
      static_cast<int>(pb.settings.size()) != f.nB)
    throw ConfigError("plan size does not match inequality settings count");
  Mat rho = sf.density();
  auto probs = expected_tables(rho, pa, pb);
  auto budget = split_total(n, f.nA, f.nB);
  TableWriter w = make_writer(of, "counts simulate",
                              {"rep", "value", "sigma", "sigma_bootstrap"});
  sf.record(w, true);
  w.header("inequality", f.name);
  w.header("settings_source", ps.describe());
  w.header("n", std::to_string(n));
  w.header("reps", std::to_string(reps));
  w.header("seed", std::to_string(seed));
  w.header("bootstrap", std::to_string(bootstrap));
  Rng master(seed);
  for (int r = 0; r < reps; ++r) {
    CountTable t = simulate_counts(probs, budget, master.derive(r).raw());
    if (r == 0 && !dump_counts.empty()) {
      std::ofstream os(dump_counts);
      if (!os) throw ConfigError("cannot write '" + dump_counts + "'");
      write_counts_csv(t, os);
    }
    EstimateWithError e = estimate_with_uncertainty(t, f, mode, mode, bootstrap,
                                                    master.derive(r).raw() + 1);
    w.row({std::to_string(r), format_double(e.value), format_double(e.sigma),
           format_double(e.sigma_bootstrap)});
  }
  of.write(w);
  return kExitOk;
}

int run_scan_vis(const StateFlags& sf, const Grid& grid, const PlanSource& ps,
                 const BellFunctional& f, const OutputFlags& of) {
  StateSpec spec = sf.spec();
  if (spec.family != Family::psi4 && spec.family != Family::hyper)
    throw ConfigError("scan vis needs a doubly entangled family (psi4 or hyper)");
  auto [pa, pb] = ps.resolve(mode_for(f));
  TableWriter w = make_writer(of, "scan vis",
                              {"visibility", "lambda_pol", "bell_value",
                               "local_bound", "qubit_bound"});
  sf.record(w, false);
  w.header("inequality", f.name);
  w.header("settings_source", ps.describe());
  w.header("lambda_pol", format_double(sf.lambda_pol));
  w.header("grid", format_double(grid.lo) + ":" + format_double(grid.hi) + ":" +
                       format_double(grid.step));
  for (double v : grid.points()) {
    Mat rho = apply_noise(spec, {sf.lambda_pol, v, 1.0}, NoiseModel::product_dephase);
    double value = evaluate_on_state(f, rho, pa, pb);
    w.row({format_double(v), format_double(sf.lambda_pol), format_double(value),
           bound_cell(f.bound_local), bound_cell(f.bound_qubit)});
  }
  of.write(w);
  return kExitOk;
}

int run_scan_steer(const StateFlags& sf, const Grid& grid, const OutputFlags& of) {
  StateSpec spec = sf.spec();
  if (spec.family != Family::phi4 && spec.family != Family::phi4_phased)
    throw ConfigError("scan steer needs the four-level family (phi4 or phi4_phased)");
  MeasurementPlan plan = steering_plan();
  TableWriter w = make_writer(of, "scan steer",
                              {"lambda", "phi_e2", "steering_value", "threshold"});
  sf.record(w, false);
  w.header("grid", format_double(grid.lo) + ":" + format_double(grid.hi) + ":" +
                       format_double(grid.step));
  for (double lam : grid.points()) {
    Mat rho = apply_noise(spec, {1.0, 1.0, lam}, NoiseModel::rho4);
    Eigen::Matrix4d tx = outcome_table(rho, plan.settings[0], plan.settings[0]);
    Eigen::Matrix4d tz = outcome_table(rho, plan.settings[1], plan.settings[1]);
    w.row({format_double(lam), format_double(spec.phi_e2),
           format_double(steering_from_tables(tx, tz)),
           format_double(steering_threshold())});
  }
  of.write(w);
  return kExitOk;
}

}

int main(int argc, char** argv) {
  CLI::App app{"hyperentangled-state analysis toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(kVersion));

  std::string inequality = "i18", registry;
  app.add_option("--registry", registry,
                 "directory of inequality JSON files (or HYPERBELL_REGISTRY)");

  StateFlags sf;
  OutputFlags of;
  PlanSource ps;
  std::string settings_text, grid_text, save_plan, dump_counts;
  long long n_events = 85000;
  int reps = 1, starts = 64, dim = 2, bootstrap = 0;
  std::uint64_t seed = 1;

  CLI::App* basis = app.add_subcommand("basis", "print the analyzer detector basis");
  basis->add_option("--settings", settings_text,
                    "hwp1,qwp1,hwp2,qwp2,hwp3,qwp3 in degrees")
      ->required();
  of.add_to(basis);

  CLI::App* chsh = app.add_subcommand("chsh", "polarization CHSH at the analysis angles");
  StateFlags sf_chsh;
  sf_chsh.family = "pol_only";
  sf_chsh.add_to(chsh, true);
  of.add_to(chsh);

  CLI::App* i4422 = app.add_subcommand("i4422", "four-setting Bell functional");
  i4422->require_subcommand(1);
  CLI::App* i4422_eval = i4422->add_subcommand("evaluate", "evaluate at fixed settings");
  sf.add_to(i4422_eval, true);
  ps.add_to(i4422_eval);
  i4422_eval->add_option("--inequality", inequality, "builtin name, path, or registry name");
  of.add_to(i4422_eval);
  CLI::App* i4422_opt = i4422->add_subcommand("optimize", "optimize analyzer settings");
  sf.add_to(i4422_opt, true);
  i4422_opt->add_option("--inequality", inequality, "builtin name, path, or registry name");
  i4422_opt->add_option("--starts", starts, "multistart count");
  i4422_opt->add_option("--seed", seed, "random seed");
  i4422_opt->add_option("--save-plan", save_plan, "write the optimal plan JSON here");
  of.add_to(i4422_opt);

  CLI::App* bound = app.add_subcommand("bound", "classical and dimension-restricted bounds");
  bound->require_subcommand(1);
  CLI::App* bound_local = bound->add_subcommand("local", "exact local-strategy bound");
  bound_local->add_option("--inequality", inequality, "builtin name, path, or registry name");
  of.add_to(bound_local);
  CLI::App* bound_seesaw = bound->add_subcommand("seesaw", "alternating optimization bound");
  bound_seesaw->add_option("--inequality", inequality, "builtin name, path, or registry name");
  bound_seesaw->add_option("--dim", dim, "local Hilbert-space dimension");
  bound_seesaw->add_option("--starts", starts, "multistart count");
  bound_seesaw->add_option("--seed", seed, "random seed");
  of.add_to(bound_seesaw);

  CLI::App* steer = app.add_subcommand("steer", "steering protocol");
  steer->require_subcommand(1);
  CLI::App* steer_eval = steer->add_subcommand("eval", "steering parameter of the state");
  StateFlags sf_steer;
  sf_steer.family = "phi4_phased";
  sf_steer.add_to(steer_eval, true);
  of.add_to(steer_eval);

  CLI::App* counts = app.add_subcommand("counts", "finite-statistics simulation");
  counts->require_subcommand(1);
  CLI::App* counts_sim = counts->add_subcommand("simulate", "Poisson counts and estimates");
  sf.add_to(counts_sim, true);
  ps.add_to(counts_sim);
  counts_sim->add_option("--inequality", inequality, "builtin name, path, or registry name");
  counts_sim->add_option("--n", n_events, "total events per repetition");
  counts_sim->add_option("--reps", reps, "number of repetitions");
  counts_sim->add_option("--seed", seed, "random seed");
  counts_sim->add_option("--bootstrap", bootstrap, "bootstrap resamples per repetition");
  counts_sim->add_option("--dump-counts", dump_counts,
                         "write the first repetition's raw counts CSV here");
  of.add_to(counts_sim);

  CLI::App* scan = app.add_subcommand("scan", "grid scans");
  scan->require_subcommand(1);
  CLI::App* scan_vis = scan->add_subcommand("vis", "Bell value vs temporal visibility");
  sf.add_to(scan_vis, false);
  scan_vis->add_option("--lambda-pol", sf.lambda_pol, "polarization visibility in [0,1]");
  scan_vis->add_option("--vis", grid_text, "visibility grid LO:HI:STEP or value");
  ps.add_to(scan_vis);
  scan_vis->add_option("--inequality", inequality, "builtin name, path, or registry name");
  of.add_to(scan_vis);
  CLI::App* scan_steer = scan->add_subcommand("steer", "steering parameter vs mixing");
  StateFlags sf_scan_steer;
  sf_scan_steer.family = "phi4_phased";
  sf_scan_steer.add_to(scan_steer, false);
  scan_steer->add_option("--lambda", grid_text, "mixing grid LO:HI:STEP or value");
  of.add_to(scan_steer);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  BellFunctional f;
  Grid grid;
  try {
    of.validate();
    f = resolve_inequality(inequality, registry);
    if (scan_vis->parsed())
      grid = parse_grid(grid_text.empty() ? "0.40:1.00:0.01" : grid_text, "--vis");
    if (scan_steer->parsed())
      grid = parse_grid(grid_text.empty() ? "0:1:0.01" : grid_text, "--lambda");
    auto check_unit = [](double v, const char* flag) {
      if (v < 0.0 || v > 1.0)
        throw ConfigError(std::string(flag) + " must lie in [0,1]");
    };
    for (const StateFlags* s : {&sf, &sf_chsh, &sf_steer, &sf_scan_steer}) {
      check_unit(s->lambda_pol, "--lambda-pol");
      check_unit(s->lambda_time, "--lambda-time");
      check_unit(s->lambda, "--lambda");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (basis->parsed()) return run_basis(settings_text, of);
    if (chsh->parsed()) return run_chsh(sf_chsh, of);
    if (i4422_eval->parsed()) return run_i4422_evaluate(sf, ps, f, of);
    if (i4422_opt->parsed())
      return run_i4422_optimize(sf, f, starts, seed, save_plan, of);
    if (bound_local->parsed()) return run_bound_local(f, of);
    if (bound_seesaw->parsed()) return run_bound_seesaw(f, dim, starts, seed, of);
    if (steer_eval->parsed()) return run_steer_eval(sf_steer, of);
    if (counts_sim->parsed())
      return run_counts_simulate(sf, ps, f, n_events, reps, seed, bootstrap,
                                 dump_counts, of);
    if (scan_vis->parsed()) return run_scan_vis(sf, grid, ps, f, of);
    if (scan_steer->parsed()) return run_scan_steer(sf_scan_steer, grid, of);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  std::cerr << "error: no command\n";
  return kExitConfig;
}
