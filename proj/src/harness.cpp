#include "pllab/harness.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "pllab/acceptance.hpp"
#include "pllab/catalogue.hpp"
#include "pllab/distance_fields.hpp"
#include "pllab/errors.hpp"
#include "pllab/flow.hpp"
#include "pllab/minset.hpp"
#include "pllab/pl_certify.hpp"
#include "pllab/region.hpp"

namespace pllab {
namespace {

namespace fs = std::filesystem;

int classify(const Error& e) {
  if (dynamic_cast<const ConfigParseError*>(&e) ||
      dynamic_cast<const InvalidParams*>(&e) ||
      dynamic_cast<const UnknownCatalogueName*>(&e) ||
      dynamic_cast<const DimensionMismatch*>(&e) ||
      dynamic_cast<const SyntaxError*>(&e))
    return kExitConfigError;
  return kExitNumericalError;
}

void write_json_file(const fs::path& path, const json& j) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  os << j.dump(2) << "\n";
}

FlowConfig flow_config_from(const json& tp) {
  FlowConfig cfg;
  cfg.rel_tol = tp.value("rel_tol", cfg.rel_tol);
  cfg.abs_tol = tp.value("abs_tol", cfg.abs_tol);
  cfg.max_time = tp.value("max_time", cfg.max_time);
  cfg.max_steps = tp.value("max_steps", cfg.max_steps);
  cfg.stop_grad_norm = tp.value("stop_grad_norm", cfg.stop_grad_norm);
  cfg.stop_f_gap = tp.value("stop_f_gap", cfg.stop_f_gap);
  return cfg;
}

double resolve_c(const json& tp, const ScalarField& f, const char* task) {
  if (tp.contains("c")) return tp["c"].get<double>();
  if (f.known_pl_constant) return *f.known_pl_constant;
  throw ConfigParseError(std::string(task) +
                         ": no certified constant available, set task_params.c");
}

double resolve_inf(const json& tp, const ScalarField& f, const char* task) {
  if (tp.contains("inf")) return tp["inf"].get<double>();
  if (f.known_inf) return *f.known_inf;
  throw ConfigParseError(std::string(task) +
                         ": no known infimum, set task_params.inf");
}

struct TaskOutcome {
  json result;
  bool pass = true;
};

TaskOutcome task_flow(const ScalarField& f, const json& tp,
                      std::uint64_t seed, const fs::path& out_dir) {
  (void)seed;
  const Vector x0 = vector_from_json(tp.at("x0"), "task_params.x0");
  const FlowConfig cfg = flow_config_from(tp);
  const double c = resolve_c(tp, f, "flow");
  const double inf_f = resolve_inf(tp, f, "flow");
  const double eps = tp.value("epsilon", 1e-6);

  const Trajectory traj = integrate_flow(f, x0, cfg);
  const DecayReport dec = decay_check(f, traj, c, inf_f, eps);
  const LengthReport len = length_check(traj, c, inf_f, eps);

  const fs::path csv = out_dir / "trajectory.csv";
  std::ofstream os(csv, std::ios::binary);
  if (!os) throw Error("cannot write " + csv.string());
  write_trajectory_csv(traj, os);

  TaskOutcome t;
  t.result = {{"trajectory", json_of(traj)},
              {"decay", json_of(dec)},
              {"length", json_of(len)},
              {"trajectory_csv", "trajectory.csv"}};
  t.pass = dec.pass && len.pass;
  return t;
}

TaskOutcome task_certify(const ScalarField& f, const Region& region,
                         const json& tp, std::uint64_t seed) {
  const int n = tp.value("n_samples", 200);
  const double inf_f = resolve_inf(tp, f, "certify");
  TaskOutcome t;
  if (tp.contains("c_claimed")) {
    const double eps = tp.value("epsilon", 1e-6);
    const PLReport rep = check_pl_claim(f, region, tp["c_claimed"].get<double>(),
                                        n, inf_f, seed, eps);
    t.result = {{"claim", json_of(rep)}};
    t.pass = rep.pass;
  } else {
    const PLReport rep = estimate_pl_constant(f, region, n, inf_f, seed);
    t.result = {{"estimate", json_of(rep)}};
    t.pass = true;  // informational: c_hat is an upper bound, not a check
  }
  return t;
}

TaskOutcome task_growth(const ScalarField& f, const Region& region,
                        const json& tp, std::uint64_t seed) {
  const double c = resolve_c(tp, f, "growth");
  std::vector<Vector> argmin;
  if (tp.contains("argmin_points")) {
    for (const auto& p : tp["argmin_points"])
      argmin.push_back(vector_from_json(p, "task_params.argmin_points[]"));
  } else {
    const int k = tp.value("argmin_from_starts", 0);
    if (k <= 0)
      throw ConfigParseError(
          "growth: need task_params.argmin_points or argmin_from_starts");
    argmin = locate_minimizers(f, region, k, flow_config_from(tp), 1e-5, seed);
  }
  const int n = tp.value("n_samples", 100);
  const double eps = tp.value("epsilon", 1e-3);
  const GrowthReport rep =
      quadratic_growth_check(f, region, c, argmin, n, seed, eps);
  TaskOutcome t;
  t.result = {{"growth", json_of(rep)}};
  t.pass = rep.pass;
  return t;
}

TaskOutcome task_minset(const ScalarField& f, const Region& region,
                        const json& tp, std::uint64_t) {
  const double c = resolve_c(tp, f, "minset");
  const int n_starts = tp.value("n_starts", 30);
  const double r_link = tp.value("r_link", -1.0);
  const CriticalSetModel model =
      build_model(f, region, c, n_starts, flow_config_from(tp), r_link);
  TaskOutcome t;
  t.result = {{"model", json_of(model)}};
  t.pass = model.gap_ok && model.pl_claim_ok && model.tension.empty();
  return t;
}

TaskOutcome task_distfield(const json& tp, std::uint64_t seed) {
  const ClosedSetRep set = set_from_json(tp.at("set"));
  const bool convex = set.convex_certified();
  TaskOutcome t;
  t.result["variant"] = set.variant_name();
  t.result["convex_certified"] = convex;

  // Sampling box: explicit, or the hull of set samples inflated by 1.
  Vector lo, hi;
  if (tp.contains("sample_box")) {
    lo = vector_from_json(tp["sample_box"].at("lower"), "sample_box.lower");
    hi = vector_from_json(tp["sample_box"].at("upper"), "sample_box.upper");
  } else {
    const auto pts = sample_set(set, 64, seed);
    lo = pts[0];
    hi = pts[0];
    for (const auto& p : pts) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    lo.array() -= 1.0;
    hi.array() += 1.0;
  }
  const Region box = BoxRegion(lo, hi);

  const int n_x = tp.value("n_x", 20);
  const int y_per_x = tp.value("y_per_x", 10);
  std::vector<Vector> xs;
  std::vector<Vector> probes;
  for (const Vector& x : sample_region(box, 8 * n_x, seed)) {
    const ProjectionResult pr = project(set, x);
    if (!pr.unique || pr.distance <= 1e-6) continue;
    xs.push_back(x);
    if (static_cast<int>(xs.size()) == n_x) break;
  }
  if (tp.contains("probes")) {
    for (const auto& p : tp["probes"])
      probes.push_back(vector_from_json(p, "task_params.probes[]"));
  } else {
    for (std::size_t i = 0; i < xs.size() && i < 6; ++i) probes.push_back(xs[i]);
  }

  const SeparationReport sep = separation_convexity_test(set, xs, y_per_x, seed);
  const RegularityReport reg = regularity_probe(set, probes);
  t.result["separation"] = json_of(sep);
  t.result["regularity"] = json_of(reg);

  bool formula_ok = true;
  if (tp.contains("x0")) {
    const Vector x0 = vector_from_json(tp["x0"], "task_params.x0");
    FlowConfig cfg;
    cfg.max_time = tp.value("max_time", 10.0);
    const FlowFormulaReport formula = flow_formula_check(set, x0, cfg);
    const RayInvarianceReport ray = ray_invariance_check(set, x0);
    t.result["flow_formula"] = json_of(formula);
    t.result["ray_invariance"] = json_of(ray);
    if (convex) formula_ok = formula.pass && ray.pass;
  }

  const bool sep_ok = !convex || sep.consistent_with_convex;
  t.pass = sep_ok && reg.matches_expectation && formula_ok;
  return t;
}

void print_summary(const std::string& task, bool pass, int exit_code,
                   const fs::path& report) {
  json line = {{"task", task},
               {"pass", pass},
               {"exit", exit_code},
               {"report", report.string()}};
  std::cout << line.dump() << "\n";
}

const char* const kCriterionIds[10] = {
    "exponential_decay",       "trajectory_length", "quadratic_growth",
    "hessian_gap",             "singleton_verdict", "kernel_chart",
    "projection_flow_formula", "convexity_dichotomy", "retraction_bound",
    "determinism"};

}  // namespace

int run_experiment(const json& config, const RunOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string task;
  fs::path out_dir;
  try {
    if (!config.is_object())
      throw ConfigParseError("config: expected a JSON object");
    if (config.value("schema_version", 1) != 1)
      throw ConfigParseError("config: unsupported schema_version");
    task = config.at("task").get<std::string>();
    const std::uint64_t seed =
        opts.seed ? *opts.seed : config.value("seed", std::uint64_t{42});
    out_dir = opts.out ? *opts.out : config.value("output_dir", "pllab_out");

    if (task == "suite") return run_suite(opts, false);

    const json tp = config.value("task_params", json::object());
    if (!tp.is_object())
      throw ConfigParseError("config: task_params must be an object");

    fs::create_directories(out_dir);

    json report;
    report["schema_version"] = 1;
    report["task"] = task;
    report["seed"] = seed;

    TaskOutcome outcome;
    if (task == "distfield") {
      outcome = task_distfield(tp, seed);
    } else {
      const ScalarField f = field_from_spec(config.at("field"));
      report["field"] = json_of(f);
      if (task == "flow") {
        outcome = task_flow(f, tp, seed, out_dir);
      } else {
        const Region region = region_from_json(config.at("region"));
        report["region"] = json_of(region);
        if (task == "certify")
          outcome = task_certify(f, region, tp, seed);
        else if (task == "growth")
          outcome = task_growth(f, region, tp, seed);
        else if (task == "minset")
          outcome = task_minset(f, region, tp, seed);
        else
          throw ConfigParseError("config: unknown task '" + task + "'");
      }
    }

    report["result"] = std::move(outcome.result);
    report["pass"] = outcome.pass;
    write_json_file(out_dir / "report.json", report);

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    write_json_file(out_dir / "report_meta.json", {{"wall_seconds", wall}});

    const int code = outcome.pass ? kExitPass : kExitBoundViolation;
    print_summary(task, outcome.pass, code, out_dir / "report.json");
    return code;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const Error& e) {
    const int code = classify(e);
    std::cerr << (code == kExitConfigError ? "config error: " : "numerical error: ")
              << e.what() << "\n";
    return code;
  }
}

int run_config_file(const std::string& path, const RunOptions& opts) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    std::cerr << "config error: cannot open " << path << "\n";
    return kExitConfigError;
  }
  json config;
  try {
    is >> config;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << path << ": " << e.what() << "\n";
    return kExitConfigError;
  }
  return run_experiment(config, opts);
}

int run_suite(const RunOptions& opts, bool list_only) {
  if (list_only) {
    for (const char* id : kCriterionIds) std::cout << id << "\n";
    return kExitPass;
  }
  const auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t seed = opts.seed.value_or(42);
  const fs::path out_dir = opts.out.value_or(std::string("pllab_out"));

  try {
    std::vector<CriterionResult> results = run_acceptance_core(seed, opts.jobs);
    // Criterion 10: a full re-run must reproduce the report byte for byte.
    const std::vector<CriterionResult> rerun = run_acceptance_core(seed, opts.jobs);
    const std::string dump1 = acceptance_report(results, seed).dump(2);
    const std::string dump2 = acceptance_report(rerun, seed).dump(2);
    const bool identical = dump1 == dump2;
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    const bool wall_ok = wall < 300.0;

    CriterionResult det;
    det.index = 10;
    det.id = kCriterionIds[9];
    det.pass = identical && wall_ok;
    det.detail = identical ? "re-run is byte-identical" : "re-run differs";
    if (!wall_ok) det.detail += ", wall time over limit";
    det.data = {{"byte_identical", identical}, {"wall_under_limit", wall_ok}};
    results.push_back(det);

    bool all = true;
    for (const auto& c : results) {
      all = all && c.pass;
      std::cout << "criterion " << c.index << " [" << c.id
                << "]: " << (c.pass ? "PASS" : "FAIL");
      if (!c.pass) std::cout << " (" << c.detail << ")";
      std::cout << "\n";
    }

    fs::create_directories(out_dir);
    write_json_file(out_dir / "report.json", acceptance_report(results, seed));
    const double wall_total =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    write_json_file(out_dir / "report_meta.json",
                    {{"wall_seconds", wall_total}});
    return all ? kExitPass : kExitBoundViolation;
  } catch (const Error& e) {
    std::cerr << "suite error: " << e.what() << "\n";
    return classify(e);
  }
}

int print_catalogue() {
  for (const CatalogueEntry& e : catalogue_listing()) {
    std::cout << e.name << "\n  params: " << e.params_schema
              << "\n  smoothness: " << e.smoothness << "\n  " << e.notes
              << "\n";
  }
  return kExitPass;
}

}  // namespace pllab
