#include "pllab/acceptance.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "pllab/catalogue.hpp"
#include "pllab/distance_fields.hpp"
#include "pllab/errors.hpp"
#include "pllab/flow.hpp"
#include "pllab/minset.hpp"
#include "pllab/parallel.hpp"
#include "pllab/pl_certify.hpp"
#include "pllab/region.hpp"

namespace pllab {
namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

FlowConfig tight_config() {
  FlowConfig cfg;
  cfg.rel_tol = 1e-12;
  cfg.abs_tol = 1e-300;
  return cfg;
}

// 1. Exponential decay, tight scalar case plus a seeded nonconvex sweep.
CriterionResult criterion_decay(std::uint64_t seed, int jobs) {
  CriterionResult r;
  r.index = 1;
  r.id = "exponential_decay";

  Matrix q(1, 1);
  q << 0.5;
  const ScalarField f = catalogue_quadratic_psd(q);
  Vector x0(1);
  x0 << 1.0;
  const Trajectory traj = integrate_flow(f, x0, tight_config());
  const DecayReport tight = decay_check(f, traj, 2.0, 0.0, 1e-6);
  const bool tight_ok = tight.pass && tight.max_scaled_ratio <= 1.0 + 1e-6 &&
                        tight.min_scaled_ratio >= 1.0 - 1e-6;

  const ScalarField g = catalogue_graph_residual(sin_field());
  const Region box = BoxRegion(vec2(-2, -2), vec2(2, 2));
  const std::vector<Vector> starts = sample_region(box, 20, seed);
  // Stop at gap 1e-10, not 1e-16: below that the residual r ~ sqrt(gap)
  // approaches the state error floor and f picks up O(1) relative noise,
  // which would swamp the 1e-6 decay slack on near-tight trajectories.
  FlowConfig sweep_cfg = tight_config();
  sweep_cfg.stop_f_gap = 1e-10;
  const auto reports = parallel_map(starts.size(), jobs, [&](std::size_t i) {
    const Trajectory t = integrate_flow(g, starts[i], sweep_cfg);
    return decay_check(g, t, 4.0, 0.0, 1e-6);
  });
  bool sweep_ok = true;
  double sweep_max = 0.0;
  for (const auto& rep : reports) {
    sweep_ok = sweep_ok && rep.pass;
    sweep_max = std::max(sweep_max, rep.max_scaled_ratio);
  }

  r.pass = tight_ok && sweep_ok;
  r.detail = "tight ratio in [" + fmt(tight.min_scaled_ratio) + ", " +
             fmt(tight.max_scaled_ratio) + "], sweep max " + fmt(sweep_max) +
             " over 20 starts";
  r.data = {{"tight", json_of(tight)},
            {"sweep_max_scaled_ratio", clamp_finite(sweep_max)},
            {"sweep_all_pass", sweep_ok},
            {"n_starts", starts.size()}};
  return r;
}

// 2. Trajectory length equals the general-C bound for the radial quadratic.
CriterionResult criterion_length(std::uint64_t) {
  CriterionResult r;
  r.index = 2;
  r.id = "trajectory_length";

  const ScalarField f = catalogue_quadratic_psd(0.5 * Matrix::Identity(2, 2));
  const Trajectory traj = integrate_flow(f, vec2(3, 4), tight_config());
  const LengthReport len = length_check(traj, 2.0, 0.0);

  const bool arc_ok = std::abs(len.arclength - 5.0) <= 1e-6;
  const bool bound_ok = std::abs(len.arclength - len.bound) <= 1e-6;
  r.pass = arc_ok && bound_ok;
  r.detail = "arclength " + fmt(len.arclength) + " vs bound " + fmt(len.bound);
  r.data = {{"length", json_of(len)},
            {"arclength_error", clamp_finite(std::abs(len.arclength - 5.0))}};
  return r;
}

// 3. Quadratic growth holds with factor c/4 and fails with factor c.
CriterionResult criterion_growth(std::uint64_t seed) {
  CriterionResult r;
  r.index = 3;
  r.id = "quadratic_growth";

  Matrix q(1, 1);
  q << 0.25;
  const ScalarField f = catalogue_quadratic_psd(q);
  Vector lo(1), hi(1), zero(1);
  lo << -1.0;
  hi << 1.0;
  zero << 0.0;
  const std::vector<Vector> argmin = {zero};

  const GrowthReport hold =
      quadratic_growth_check(f, BoxRegion(lo, hi), 1.0, argmin, 100, seed);
  const bool hold_ok = hold.pass && std::abs(hold.min_ratio - 1.0) <= 1e-12 &&
                       std::abs(hold.max_ratio - 1.0) <= 1e-12;

  Vector lo2(1), hi2(1);
  lo2 << 0.5;
  hi2 << 1.5;
  const GrowthReport fail =
      quadratic_growth_check(f, BoxRegion(lo2, hi2), 4.0, argmin, 100, seed);
  const bool fail_ok = !fail.pass && fail.violation.has_value() &&
                       std::abs(fail.violation->ratio - 0.25) <= 1e-12;

  r.pass = hold_ok && fail_ok;
  r.detail = "factor c/4 ratios in [" + fmt(hold.min_ratio) + ", " +
             fmt(hold.max_ratio) + "]; factor c violation ratio " +
             fmt(fail.violation ? fail.violation->ratio : -1.0);
  r.data = {{"holds_with_quarter_factor", json_of(hold)},
            {"fails_with_unit_factor", json_of(fail)}};
  return r;
}

// 4. Hessian eigenvalue gap and constant rank across located minimizers.
CriterionResult criterion_gap(const ScalarField& f,
                              const std::vector<Vector>& mins) {
  CriterionResult r;
  r.index = 4;
  r.id = "hessian_gap";

  const bool count_ok = mins.size() >= 30;
  const HessianGapReport gap = hessian_gap_check(f, mins, 4.0);
  bool eig_ok = true;
  double worst_low = 0.0, worst_high = std::numeric_limits<double>::infinity();
  for (const auto& spec : gap.spectra) {
    for (int i = 0; i < spec.size(); ++i) {
      const double ev = spec[i];
      const bool near_zero = ev > -1e-6 && ev < 1e-6;
      const bool above_half = ev >= 2.0 - 1e-6;
      if (!near_zero && !above_half) eig_ok = false;
      if (ev < 1.0)
        worst_low = std::max(worst_low, std::abs(ev));
      else
        worst_high = std::min(worst_high, ev);
    }
  }
  const ConstantRankReport rank = constant_rank_check(f, mins, 4.0);
  const bool rank_ok = rank.constant_rank && rank.common_rank &&
                       *rank.common_rank == 1;

  r.pass = count_ok && gap.gap_ok && eig_ok && rank_ok;
  r.detail = std::to_string(mins.size()) + " minimizers, |zero band| <= " +
             fmt(worst_low) + ", lower edge " + fmt(worst_high) + ", rank " +
             (rank.common_rank ? std::to_string(*rank.common_rank) : "mixed");
  r.data = {{"n_minimizers", mins.size()},
            {"gap", json_of(gap)},
            {"rank", json_of(rank)},
            {"eigenvalues_in_bands", eig_ok}};
  return r;
}

double component_diameter(const CriticalSetModel& m, const std::vector<int>& c) {
  double d = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j)
      d = std::max(d, (m.points[c[i]] - m.points[c[j]]).norm());
  return d;
}

// 5. Singleton verdict on three argmin geometries.
CriterionResult criterion_singleton(std::uint64_t) {
  CriterionResult r;
  r.index = 5;
  r.id = "singleton_verdict";

  Matrix q = Matrix::Zero(2, 2);
  q(0, 0) = 1.0;
  q(1, 1) = 3.0;
  const ScalarField fq = catalogue_quadratic_psd(q);
  const CriticalSetModel ma =
      build_model(fq, BoxRegion(vec2(-1, -1), vec2(1, 1)), 4.0, 20, FlowConfig{});
  const double origin_dist = ma.points.empty()
                                 ? std::numeric_limits<double>::infinity()
                                 : ma.points[0].norm();
  const bool a_ok = ma.singleton && origin_dist <= 1e-6;

  const ScalarField fi = catalogue_half_sq_dist_interval(0.0, 1.0);
  Vector lo(1), hi(1);
  lo << -2.0;
  hi << 3.0;
  const CriticalSetModel mb =
      build_model(fi, BoxRegion(lo, hi), 2.0, 40, FlowConfig{});
  double diam = 0.0;
  for (const auto& comp : mb.components)
    diam = std::max(diam, component_diameter(mb, comp));
  const bool b_ok = !mb.singleton && mb.components.size() == 1 &&
                    diam >= 0.99 && diam <= 1.01 && mb.tension.empty();

  const ScalarField fs = catalogue_sq_dist_sphere(vec2(0, 0), 1.0);
  const Region annulus =
      SublevelRegion(0.24, BoxRegion(vec2(-1.5, -1.5), vec2(1.5, 1.5)));
  const CriticalSetModel mc = build_model(fs, annulus, 4.0, 40, FlowConfig{});
  const bool c_ok =
      !mc.singleton && mc.manifold_dim.has_value() && *mc.manifold_dim == 1;

  r.pass = a_ok && b_ok && c_ok;
  r.detail = "quadratic singleton=" + std::string(ma.singleton ? "yes" : "no") +
             " at " + fmt(origin_dist) + " from origin; interval diameter " +
             fmt(diam) + "; sphere manifold_dim " +
             (mc.manifold_dim ? std::to_string(*mc.manifold_dim) : "none");
  r.data = {{"quadratic", json_of(ma)},
            {"interval", json_of(mb)},
            {"interval_component_diameter", clamp_finite(diam)},
            {"sphere", json_of(mc)}};
  return r;
}

// 6. Kernel chart probes: tangency slopes and projection injectivity.
CriterionResult criterion_chart(const ScalarField& fsin,
                                const std::vector<Vector>& sin_mins) {
  CriterionResult r;
  r.index = 6;
  r.id = "kernel_chart";

  const KernelChartReport pg =
      kernel_chart_probe(fsin, vec2(0, 0), sin_mins, 0.5, 4.0);
  double slope_g = std::numeric_limits<double>::infinity();
  for (const auto& probe : pg.tangency) slope_g = std::min(slope_g, probe.slope);
  const bool g_ok = pg.kernel_dim == 1 && slope_g >= 5.5 &&
                    pg.injective_at_r_requested && pg.injective_at_r_used;

  const ScalarField fs = catalogue_sq_dist_sphere(vec2(0, 0), 1.0);
  const Region annulus =
      SublevelRegion(0.24, BoxRegion(vec2(-1.5, -1.5), vec2(1.5, 1.5)));
  const std::vector<Vector> circle_mins =
      locate_minimizers(fs, annulus, 40, FlowConfig{});
  const KernelChartReport ps =
      kernel_chart_probe(fs, vec2(1, 0), circle_mins, 0.5, 4.0);
  double slope_s = std::numeric_limits<double>::infinity();
  for (const auto& probe : ps.tangency) slope_s = std::min(slope_s, probe.slope);
  const bool s_ok = ps.kernel_dim == 1 && slope_s >= 3.5;

  r.pass = g_ok && s_ok;
  r.detail = "graph slope " + fmt(slope_g) + " (needs 5.5), sphere slope " +
             fmt(slope_s) + " (needs 3.5), injectivity " +
             (pg.injective_at_r_requested ? "holds" : "fails");
  r.data = {{"graph", json_of(pg)}, {"sphere", json_of(ps)}};
  return r;
}

// 7. Closed-form projection flow against the integrator.
CriterionResult criterion_flow_formula(std::uint64_t) {
  CriterionResult r;
  r.index = 7;
  r.id = "projection_flow_formula";

  const ClosedSetRep box = BoxSet{vec2(0, 0), vec2(1, 1)};
  FlowConfig cfg;
  cfg.max_time = 10.0;
  const FlowFormulaReport rep = flow_formula_check(box, vec2(2, 2), cfg, 1e-6);

  r.pass = rep.pass && rep.max_deviation <= 1e-6 && rep.reprojection_ok &&
           rep.max_reprojection_drift <= 1e-8;
  r.detail = "max deviation " + fmt(rep.max_deviation) +
             ", reprojection drift " + fmt(rep.max_reprojection_drift);
  r.data = json_of(rep);
  return r;
}

std::vector<Vector> filtered_x_samples(const ClosedSetRep& set, int want,
                                       std::uint64_t seed) {
  const Region box = BoxRegion(vec2(-2, -2), vec2(2, 2));
  std::vector<Vector> out;
  int batch = 4 * want;
  while (static_cast<int>(out.size()) < want && batch <= 4096 * want) {
    out.clear();
    for (const Vector& x : sample_region(box, batch, seed)) {
      const ProjectionResult pr = project(set, x);
      if (!pr.unique || pr.distance <= 1e-6) continue;
      out.push_back(x);
      if (static_cast<int>(out.size()) == want) break;
    }
    batch *= 2;
  }
  return out;
}

// 8. Convexity dichotomy: separation witnesses and FD regularity labels.
CriterionResult criterion_dichotomy(std::uint64_t seed) {
  CriterionResult r;
  r.index = 8;
  r.id = "convexity_dichotomy";

  const ClosedSetRep boxF = BoxSet{vec2(0, 0), vec2(1, 1)};
  Matrix basis(2, 1);
  basis << 1, 0;
  const ClosedSetRep affF = AffineSet{vec2(0, 0), basis};
  Matrix a(3, 2);
  a << -1, 0, 0, -1, 1, 1;
  Vector b(3);
  b << 0, 0, 1;
  const ClosedSetRep polyF = PolytopeSet{a, b, vec2(0.25, 0.25)};
  const ClosedSetRep sphF = SphereSet{vec2(0, 0), 1.0};

  bool convex_ok = true;
  json convex_data = json::array();
  for (const ClosedSetRep* set : {&boxF, &affF, &polyF}) {
    const std::vector<Vector> xs = filtered_x_samples(*set, 20, seed);
    const SeparationReport rep = separation_convexity_test(*set, xs, 10, seed);
    convex_ok = convex_ok && rep.consistent_with_convex && rep.n_pairs == 200;
    convex_data.push_back(
        {{"variant", set->variant_name()}, {"separation", json_of(rep)}});
  }

  std::vector<Vector> xs_sphere = filtered_x_samples(sphF, 19, seed);
  xs_sphere.insert(xs_sphere.begin(), vec2(0.5, 0));
  const SeparationReport sph = separation_convexity_test(sphF, xs_sphere, 10, seed);
  const bool witness_ok = !sph.consistent_with_convex && sph.witness &&
                          sph.witness->inner >= 0.5;

  const std::vector<Vector> aff_probes = {vec2(0.3, 0.7), vec2(-1.2, 0.4),
                                          vec2(2.0, -0.8), vec2(0.5, 1.5)};
  const RegularityReport reg_aff = regularity_probe(affF, aff_probes);
  const bool aff_ok = reg_aff.observed == RegularityLabel::C2_candidate &&
                      reg_aff.matches_expectation;

  const std::vector<Vector> box_probes = {vec2(-1e-3, -0.5), vec2(1e-3, -0.5),
                                          vec2(-1e-5, -0.5), vec2(1e-5, -0.5)};
  const RegularityReport reg_box = regularity_probe(boxF, box_probes);
  const double jump = std::abs(reg_box.probes[1].hessian_at_finest(0, 0) -
                               reg_box.probes[0].hessian_at_finest(0, 0));
  const bool box_ok = reg_box.observed == RegularityLabel::C11_candidate &&
                      reg_box.matches_expectation && jump >= 0.95 &&
                      jump <= 1.05;

  r.pass = convex_ok && witness_ok && aff_ok && box_ok;
  r.detail = "convex fixtures clean, sphere witness inner " +
             fmt(sph.witness ? sph.witness->inner : 0.0) +
             ", box Hessian jump " + fmt(jump);
  r.data = {{"convex_fixtures", std::move(convex_data)},
            {"sphere", json_of(sph)},
            {"regularity_affine", json_of(reg_aff)},
            {"regularity_box", json_of(reg_box)},
            {"hessian_jump", clamp_finite(jump)}};
  return r;
}

// 9. Retraction displacement bound on a grid.
CriterionResult criterion_retraction(std::uint64_t) {
  CriterionResult r;
  r.index = 9;
  r.id = "retraction_bound";

  const ScalarField f = catalogue_quadratic_psd(0.5 * Matrix::Identity(2, 2));
  std::vector<Vector> grid;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      grid.push_back(vec2(-1.0 + 0.5 * i, -1.0 + 0.5 * j));
  const RetractionReport rep =
      retraction_check(f, grid, 2.0, 0.0, tight_config());

  bool ratios_ok = true;
  bool origin_ok = false;
  for (const auto& p : rep.points) {
    if (p.minimizer_case) {
      origin_ok = p.displacement <= 1e-8;
    } else {
      ratios_ok = ratios_ok && std::abs(p.ratio - 1.0) <= 1e-6;
    }
  }

  r.pass = rep.pass && ratios_ok && origin_ok;
  r.detail = "ratio in [" + fmt(rep.min_ratio) + ", " + fmt(rep.max_ratio) +
             "] over 24 points, origin fixed";
  r.data = json_of(rep);
  return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance_core(std::uint64_t seed, int jobs) {
  const ScalarField fsin = catalogue_graph_residual(sin_field());
  const std::vector<Vector> sin_mins = locate_minimizers(
      fsin, BoxRegion(vec2(-3, -3), vec2(3, 3)), 60, FlowConfig{}, 1e-5, seed);

  std::vector<CriterionResult> out;
  out.push_back(criterion_decay(seed, jobs));
  out.push_back(criterion_length(seed));
  out.push_back(criterion_growth(seed));
  out.push_back(criterion_gap(fsin, sin_mins));
  out.push_back(criterion_singleton(seed));
  out.push_back(criterion_chart(fsin, sin_mins));
  out.push_back(criterion_flow_formula(seed));
  out.push_back(criterion_dichotomy(seed));
  out.push_back(criterion_retraction(seed));
  return out;
}

json acceptance_report(const std::vector<CriterionResult>& results,
                       std::uint64_t seed) {
  json criteria = json::array();
  bool all = true;
  for (const auto& c : results) {
    all = all && c.pass;
    criteria.push_back({{"index", c.index},
                        {"id", c.id},
                        {"pass", c.pass},
                        {"detail", c.detail},
                        {"data", c.data}});
  }
  json j;
  j["schema_version"] = 1;
  j["task"] = "suite";
  j["seed"] = seed;
  j["criteria"] = std::move(criteria);
  j["all_pass"] = all;
  return j;
}

}  // namespace pllab
