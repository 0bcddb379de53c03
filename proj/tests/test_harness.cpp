#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "pllab/errors.hpp"
#include "pllab/harness.hpp"
#include "pllab/json_io.hpp"
#include "pllab/parallel.hpp"

using namespace pllab;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "pllab_harness_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

json quadratic_flow_config() {
  // The decay bound is exactly tight for a quadratic (ratio identically 1),
  // so the verification needs integrator error well under the 1e-6 slack:
  // tighter tolerances and a stop gap above the state error floor.
  return json{{"task", "flow"},
              {"seed", 7},
              {"field",
               {{"catalogue", "quadratic_psd"},
                {"params", {{"q", {{0.5, 0.0}, {0.0, 0.5}}}}}}},
              {"task_params",
               {{"x0", {1.0, 1.0}},
                {"rel_tol", 1e-12},
                {"abs_tol", 1e-300},
                {"stop_f_gap", 1e-10}}}};
}

int exit_of(const std::string& cmd) {
  int rc = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(rc));
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("non-finite doubles are clamped for serialization") {
  CHECK(clamp_finite(1.5) == 1.5);
  CHECK(clamp_finite(std::numeric_limits<double>::infinity()) == 1e308);
  CHECK(clamp_finite(-std::numeric_limits<double>::infinity()) == -1e308);
  CHECK(clamp_finite(std::numeric_limits<double>::quiet_NaN()) == 0.0);
}

TEST_CASE("eigenvalue rounding keeps 12 significant digits") {
  CHECK(round_sig12(0.0) == 0.0);
  CHECK(round_sig12(1.0) == 1.0);
  double r = round_sig12(1.0 / 3.0);
  CHECK(r == doctest::Approx(1.0 / 3.0).epsilon(1e-11));
  CHECK(r != 1.0 / 3.0);           // genuinely truncated
  CHECK(round_sig12(r) == r);      // idempotent
  CHECK(round_sig12(-1.23456789012345e-17) ==
        round_sig12(round_sig12(-1.23456789012345e-17)));
}

TEST_CASE("parallel_map keeps input order on any worker count") {
  auto square = [](std::size_t i) { return static_cast<int>(i * i); };
  auto seq = parallel_map(64, 1, square);
  auto par = parallel_map(64, 4, square);
  auto def = parallel_map(64, 0, square);  // hardware concurrency
  REQUIRE(seq.size() == 64);
  CHECK(seq == par);
  CHECK(seq == def);
}

TEST_CASE("parallel_map rethrows the smallest failing index") {
  auto fn = [](std::size_t i) -> int {
    if (i == 3 || i == 7) throw std::runtime_error(std::to_string(i));
    return static_cast<int>(i);
  };
  for (int jobs : {1, 4}) {
    CAPTURE(jobs);
    try {
      parallel_map(16, jobs, fn);
      FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()) == "3");
    }
  }
}

TEST_CASE("field specs parse from json") {
  ScalarField q = field_from_spec(
      json{{"catalogue", "quadratic_psd"},
           {"params", {{"q", {{1.0, 0.0}, {0.0, 1.0}}}}}});
  CHECK(q.dim == 2);
  CHECK(*q.known_pl_constant == doctest::Approx(4.0));

  ScalarField e = field_from_spec(json{{"expr", "x1^2"}, {"dim", 1}});
  CHECK(eval(e, Vector::Constant(1, 2.0)) == doctest::Approx(4.0));

  ScalarField g = field_from_spec(
      json{{"catalogue", "graph_residual"},
           {"params", {{"g", {{"builtin", "sin"}}}}}});
  CHECK(g.dim == 2);
  Vector x(2);
  x << 1.0, 0.0;
  CHECK(eval(g, x) == doctest::Approx(std::sin(1.0) * std::sin(1.0)));

  ScalarField lift = field_from_spec(
      json{{"catalogue", "cylinder_lift"},
           {"params",
            {{"k", 2},
             {"inner", {{"catalogue", "half_sq_dist_interval"},
                        {"params", {{"a", 0.0}, {"b", 1.0}}}}}}}});
  CHECK(lift.dim == 3);

  CHECK_THROWS_AS(field_from_spec(json{{"catalogue", "nope"}, {"params", {}}}),
                  UnknownCatalogueName);
  CHECK_THROWS_AS(field_from_spec(json{{"dim", 2}}), ConfigParseError);
  CHECK_THROWS_AS(field_from_spec(json{{"expr", "x1"},
                                       {"dim", 1},
                                       {"catalogue", "quadratic_psd"},
                                       {"params", {}}}),
                  ConfigParseError);
}

TEST_CASE("regions and sets round trip through json") {
  Region box = BoxRegion(Vector::Constant(2, -1.0), Vector::Constant(2, 2.0));
  Region ball = BallRegion(Vector::Zero(2), 1.5);
  Region sub = SublevelRegion(
      0.5, BoxRegion(Vector::Constant(2, -2.0), Vector::Constant(2, 2.0)));
  for (const Region& r : {box, ball, sub}) {
    Region back = region_from_json(json_of(r));
    CHECK(json_of(back) == json_of(r));
  }
  CHECK_THROWS_AS(region_from_json(json{{"variant", "cone"}}), ConfigParseError);

  Vector c2 = Vector::Zero(2);
  Matrix basis(2, 1);
  basis << 1, 0;
  Matrix a(3, 2);
  a << -1, 0, 0, -1, 1, 1;
  Vector b(3);
  b << 0, 0, 1;
  Vector fp(2);
  fp << 0.25, 0.25;
  std::vector<ClosedSetRep> sets = {
      PointCloudSet{{c2}},
      BoxSet{Vector::Zero(2), Vector::Constant(2, 1.0)},
      SphereSet{c2, 1.0},
      AffineSet{c2, basis},
      PolytopeSet{a, b, fp},
      UnionSet{{ClosedSetRep(PointCloudSet{{c2}}),
                ClosedSetRep(SphereSet{c2, 2.0})}}};
  for (const ClosedSetRep& s : sets) {
    ClosedSetRep back = set_from_json(json_of(s));
    CHECK(back.variant_name() == s.variant_name());
    CHECK(json_of(back) == json_of(s));
  }
}

TEST_CASE("pl reports document what c_hat means") {
  ScalarField f = field_from_spec(
      json{{"catalogue", "quadratic_psd"}, {"params", {{"q", {{0.5}}}}}});
  Region box = BoxRegion(Vector::Constant(1, -2.0), Vector::Constant(1, 2.0));
  PLReport rep = estimate_pl_constant(f, box, 50, 0.0, 1);
  json j = json_of(rep);
  CHECK(j["c_hat_meaning"] == "empirical upper bound on the best C");
  CHECK(j["violation"].is_null());
  CHECK(j["c_hat"].get<double>() == doctest::Approx(2.0));
}

TEST_CASE("experiments run end to end in process") {
  SUBCASE("flow task passes and writes its artifacts") {
    fs::path dir = fresh_dir("flow_ok");
    RunOptions opts;
    opts.out = dir.string();
    CHECK(run_experiment(quadratic_flow_config(), opts) == kExitPass);
    json report = json::parse(slurp(dir / "report.json"));
    CHECK(report["pass"] == true);
    CHECK(report["task"] == "flow");
    CHECK(report["schema_version"] == 1);
    CHECK(fs::exists(dir / "trajectory.csv"));
    CHECK(fs::exists(dir / "report_meta.json"));
  }
  SUBCASE("an overclaimed constant exits with the violation code") {
    json cfg{{"task", "certify"},
             {"field", {{"catalogue", "quadratic_psd"}, {"params", {{"q", {{0.5}}}}}}},
             {"region", {{"variant", "box"}, {"lower", {-2.0}}, {"upper", {2.0}}}},
             {"task_params", {{"c_claimed", 2.5}}}};
    fs::path dir = fresh_dir("certify_bad");
    RunOptions opts;
    opts.out = dir.string();
    CHECK(run_experiment(cfg, opts) == kExitBoundViolation);
    json report = json::parse(slurp(dir / "report.json"));
    CHECK(report["pass"] == false);
  }
  SUBCASE("config mistakes exit with the usage code") {
    RunOptions opts;
    opts.out = fresh_dir("cfg_err").string();
    json bad = quadratic_flow_config();
    bad["field"]["catalogue"] = "nope";
    CHECK(run_experiment(bad, opts) == kExitConfigError);

    json v2 = quadratic_flow_config();
    v2["schema_version"] = 2;
    CHECK(run_experiment(v2, opts) == kExitConfigError);

    json no_x0 = quadratic_flow_config();
    no_x0["task_params"] = json::object();
    CHECK(run_experiment(no_x0, opts) == kExitConfigError);

    json bad_task = quadratic_flow_config();
    bad_task["task"] = "dance";
    CHECK(run_experiment(bad_task, opts) == kExitConfigError);
  }
  SUBCASE("numerical contradictions exit with the numerics code") {
    // Supplied infimum above the sampled values.
    json cfg{{"task", "certify"},
             {"field", {{"catalogue", "quadratic_psd"}, {"params", {{"q", {{0.5}}}}}}},
             {"region", {{"variant", "box"}, {"lower", {-2.0}}, {"upper", {2.0}}}},
             {"task_params", {{"inf", 1.0}}}};
    RunOptions opts;
    opts.out = fresh_dir("num_err").string();
    CHECK(run_experiment(cfg, opts) == kExitNumericalError);
  }
}

TEST_CASE("reports are byte deterministic for a fixed seed") {
  json cfg{{"task", "certify"},
           {"field", {{"catalogue", "graph_residual"},
                      {"params", {{"g", {{"builtin", "sin"}}}}}}},
           {"region",
            {{"variant", "box"}, {"lower", {-2.0, -2.0}}, {"upper", {2.0, 2.0}}}},
           {"task_params", {{"c_claimed", 4.0}, {"n_samples", 100}}}};
  fs::path d1 = fresh_dir("det1");
  fs::path d2 = fresh_dir("det2");
  RunOptions o1;
  o1.out = d1.string();
  RunOptions o2;
  o2.out = d2.string();
  REQUIRE(run_experiment(cfg, o1) == kExitPass);
  REQUIRE(run_experiment(cfg, o2) == kExitPass);
  CHECK(slurp(d1 / "report.json") == slurp(d2 / "report.json"));
}

TEST_CASE("the command line wires up the same paths") {
  const char* bin = std::getenv("PLLAB_BIN");
  REQUIRE(bin != nullptr);
  const std::string exe = std::string("\"") + bin + "\"";
  fs::path dir = fresh_dir("cli");

  SUBCASE("run executes a config file") {
    std::ofstream(dir / "cfg.json") << quadratic_flow_config().dump(2);
    int code = exit_of(exe + " run \"" + (dir / "cfg.json").string() +
                       "\" --out \"" + (dir / "out").string() +
                       "\" > /dev/null 2>&1");
    CHECK(code == kExitPass);
    CHECK(fs::exists(dir / "out" / "report.json"));
  }
  SUBCASE("malformed json is a usage error") {
    std::ofstream(dir / "broken.json") << "{ not json";
    int code = exit_of(exe + " run \"" + (dir / "broken.json").string() +
                       "\" > /dev/null 2>&1");
    CHECK(code == kExitConfigError);
  }
  SUBCASE("a missing config file is a usage error") {
    int code = exit_of(exe + " run \"" + (dir / "absent.json").string() +
                       "\" > /dev/null 2>&1");
    CHECK(code == kExitConfigError);
  }
  SUBCASE("suite --list names the ten criteria") {
    fs::path out = dir / "list.txt";
    int code = exit_of(exe + " suite --list > \"" + out.string() + "\" 2>&1");
    CHECK(code == kExitPass);
    std::string text = slurp(out);
    for (const char* id :
         {"exponential_decay", "trajectory_length", "quadratic_growth",
          "hessian_gap", "singleton_verdict", "kernel_chart",
          "projection_flow_formula", "convexity_dichotomy", "retraction_bound",
          "determinism"})
      CHECK(text.find(id) != std::string::npos);
  }
  SUBCASE("catalogue documents names and constants") {
    fs::path out = dir / "cat.txt";
    int code = exit_of(exe + " catalogue > \"" + out.string() + "\" 2>&1");
    CHECK(code == kExitPass);
    std::string text = slurp(out);
    CHECK(text.find("half_sq_dist_interval") != std::string::npos);
    CHECK(text.find("known_pl_constant=4") != std::string::npos);
    CHECK(text.find("sq_dist_sphere") != std::string::npos);
  }
}
