#include "pllab/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "pllab/catalogue.hpp"
#include "pllab/errors.hpp"
#include "pllab/expr.hpp"

namespace pllab {

double clamp_finite(double v) {
  if (std::isnan(v)) return 0.0;
  if (v > 1e308) return 1e308;
  if (v < -1e308) return -1e308;
  return v;
}

double round_sig12(double v) {
  if (!std::isfinite(v)) return clamp_finite(v);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

json json_of(const Vector& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(clamp_finite(v[i]));
  return a;
}

json json_of(const Matrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(clamp_finite(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Vector vector_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty())
    throw ConfigParseError(what + ": expected a nonempty array of numbers");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number())
      throw ConfigParseError(what + ": entry " + std::to_string(i) +
                             " is not a number");
    v[static_cast<int>(i)] = j[i].get<double>();
  }
  return v;
}

Matrix matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty())
    throw ConfigParseError(what + ": expected a nonempty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw ConfigParseError(what + ": rows must be nonempty arrays");
  Matrix m(j.size(), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols)
      throw ConfigParseError(what + ": ragged rows");
    for (std::size_t k = 0; k < cols; ++k) {
      if (!j[i][k].is_number())
        throw ConfigParseError(what + ": non-numeric entry");
      m(static_cast<int>(i), static_cast<int>(k)) = j[i][k].get<double>();
    }
  }
  return m;
}

// ---- regions ----------------------------------------------------------------

json json_of(const Region& r) {
  json j;
  if (const auto* box = std::get_if<BoxRegion>(&r)) {
    j["variant"] = "box";
    j["lower"] = json_of(box->lower);
    j["upper"] = json_of(box->upper);
  } else if (const auto* ball = std::get_if<BallRegion>(&r)) {
    j["variant"] = "ball";
    j["center"] = json_of(ball->center);
    j["radius"] = ball->radius;
  } else {
    const auto& sub = std::get<SublevelRegion>(r);
    j["variant"] = "sublevel";
    j["threshold"] = sub.threshold;
    j["bounding_box"] = {{"lower", json_of(sub.bounding_box.lower)},
                         {"upper", json_of(sub.bounding_box.upper)}};
  }
  return j;
}

Region region_from_json(const json& j) {
  if (!j.is_object() || !j.contains("variant"))
    throw ConfigParseError("region: expected an object with 'variant'");
  const std::string variant = j["variant"].get<std::string>();
  try {
    if (variant == "box")
      return BoxRegion(vector_from_json(j.at("lower"), "region.lower"),
                       vector_from_json(j.at("upper"), "region.upper"));
    if (variant == "ball")
      return BallRegion(vector_from_json(j.at("center"), "region.center"),
                        j.at("radius").get<double>());
    if (variant == "sublevel") {
      const json& bb = j.at("bounding_box");
      return SublevelRegion(
          j.at("threshold").get<double>(),
          BoxRegion(vector_from_json(bb.at("lower"), "region.bounding_box.lower"),
                    vector_from_json(bb.at("upper"), "region.bounding_box.upper")));
    }
  } catch (const json::exception& e) {
    throw ConfigParseError(std::string("region: ") + e.what());
  }
  throw ConfigParseError("region: unknown variant '" + variant + "'");
}

// ---- closed sets --------------------------------------------------------------

json json_of(const ClosedSetRep& s) {
  json j;
  j["variant"] = s.variant_name();
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PointCloudSet>) {
          json pts = json::array();
          for (const auto& p : v.points) pts.push_back(json_of(p));
          j["points"] = std::move(pts);
        } else if constexpr (std::is_same_v<T, BoxSet>) {
          j["lower"] = json_of(v.lower);
          j["upper"] = json_of(v.upper);
        } else if constexpr (std::is_same_v<T, SphereSet>) {
          j["center"] = json_of(v.center);
          j["radius"] = v.radius;
        } else if constexpr (std::is_same_v<T, AffineSet>) {
          j["basepoint"] = json_of(v.basepoint);
          json basis = json::array();  // one array per basis vector
          for (int c = 0; c < v.basis.cols(); ++c)
            basis.push_back(json_of(Vector(v.basis.col(c))));
          j["basis"] = std::move(basis);
        } else if constexpr (std::is_same_v<T, PolytopeSet>) {
          j["a"] = json_of(v.a);
          j["b"] = json_of(v.b);
          j["feasible_point"] = json_of(v.feasible_point);
        } else {
          json members = json::array();
          for (const auto& m : v.members) members.push_back(json_of(m));
          j["members"] = std::move(members);
        }
      },
      s.rep());
  return j;
}

ClosedSetRep set_from_json(const json& j) {
  if (!j.is_object() || !j.contains("variant"))
    throw ConfigParseError("set: expected an object with 'variant'");
  const std::string variant = j["variant"].get<std::string>();
  try {
    if (variant == "finite_point_cloud") {
      PointCloudSet s;
      for (const auto& p : j.at("points"))
        s.points.push_back(vector_from_json(p, "set.points[]"));
      return s;
    }
    if (variant == "box")
      return BoxSet{vector_from_json(j.at("lower"), "set.lower"),
                    vector_from_json(j.at("upper"), "set.upper")};
    if (variant == "sphere")
      return SphereSet{vector_from_json(j.at("center"), "set.center"),
                       j.at("radius").get<double>()};
    if (variant == "affine") {
      const Vector base = vector_from_json(j.at("basepoint"), "set.basepoint");
      const json& basis = j.at("basis");
      Matrix v(base.size(), basis.size());
      for (std::size_t c = 0; c < basis.size(); ++c) {
        const Vector col = vector_from_json(basis[c], "set.basis[]");
        if (col.size() != base.size())
          throw ConfigParseError("set.basis: vector dim != basepoint dim");
        v.col(static_cast<int>(c)) = col;
      }
      return AffineSet{base, v};
    }
    if (variant == "polytope")
      return PolytopeSet{matrix_from_json(j.at("a"), "set.a"),
                         vector_from_json(j.at("b"), "set.b"),
                         vector_from_json(j.at("feasible_point"),
                                          "set.feasible_point")};
    if (variant == "union") {
      UnionSet s;
      for (const auto& m : j.at("members")) s.members.push_back(set_from_json(m));
      return s;
    }
  } catch (const json::exception& e) {
    throw ConfigParseError(std::string("set: ") + e.what());
  }
  throw ConfigParseError("set: unknown variant '" + variant + "'");
}

// ---- field specs ---------------------------------------------------------------

ScalarField field_from_spec(const json& spec) {
  if (!spec.is_object())
    throw ConfigParseError("field: expected an object");
  const bool has_cat = spec.contains("catalogue");
  const bool has_expr = spec.contains("expr");
  if (has_cat == has_expr)
    throw ConfigParseError(
        "field: exactly one of 'catalogue' or 'expr' is required");

  if (has_expr) {
    if (!spec.contains("dim"))
      throw ConfigParseError("field: 'expr' needs a 'dim'");
    return compile(spec["expr"].get<std::string>(), spec["dim"].get<int>());
  }

  const std::string name = spec["catalogue"].get<std::string>();
  const json params = spec.value("params", json::object());
  try {
    if (name == "quadratic_psd")
      return catalogue_quadratic_psd(
          matrix_from_json(params.at("q"), "params.q"));
    if (name == "half_sq_dist_interval")
      return catalogue_half_sq_dist_interval(params.at("a").get<double>(),
                                             params.at("b").get<double>());
    if (name == "half_sq_dist_set")
      return catalogue_half_sq_dist_set(set_from_json(params.at("set")));
    if (name == "graph_residual") {
      const json& g = params.at("g");
      if (g.is_object() && g.contains("builtin")) {
        const std::string builtin = g["builtin"].get<std::string>();
        if (builtin == "sin") return catalogue_graph_residual(sin_field());
        throw ConfigParseError("graph_residual: unknown builtin '" + builtin +
                               "'");
      }
      return catalogue_graph_residual(field_from_spec(g));
    }
    if (name == "cylinder_lift")
      return catalogue_cylinder_lift(field_from_spec(params.at("inner")),
                                     params.at("k").get<int>());
    if (name == "sq_dist_sphere")
      return catalogue_sq_dist_sphere(
          vector_from_json(params.at("center"), "params.center"),
          params.at("radius").get<double>());
  } catch (const json::exception& e) {
    throw ConfigParseError(std::string("field params: ") + e.what());
  }
  throw UnknownCatalogueName("unknown catalogue field '" + name + "'");
}

json json_of(const ScalarField& f) {
  json j;
  j["name"] = f.name;
  j["dim"] = f.dim;
  j["smoothness"] = to_string(f.smoothness);
  j["known_inf"] = f.known_inf ? json(clamp_finite(*f.known_inf)) : json();
  j["known_pl_constant"] =
      f.known_pl_constant ? json(clamp_finite(*f.known_pl_constant)) : json();
  j["known_argmin"] = f.known_argmin;
  return j;
}

// ---- reports ---------------------------------------------------------------------

json json_of(const Trajectory& t) {
  json j;
  j["x0"] = json_of(t.x0);
  j["terminal"] = json_of(t.terminal);
  j["n_steps"] = t.times.size();
  j["t_final"] = t.times.empty() ? 0.0 : clamp_finite(t.times.back());
  j["f_final"] = t.f_values.empty() ? 0.0 : clamp_finite(t.f_values.back());
  j["grad_norm_final"] =
      t.grad_norms.empty() ? 0.0 : clamp_finite(t.grad_norms.back());
  j["arclength"] = clamp_finite(t.arclength());
  j["chord_length"] = clamp_finite(t.chord_length());
  j["converged"] = t.converged;
  j["stop_reason"] = to_string(t.stop_reason);
  return j;
}

json json_of(const DecayReport& r) {
  json j;
  j["pass"] = r.pass;
  j["c_used"] = r.c_used;
  j["inf_f"] = r.inf_f;
  j["epsilon"] = r.epsilon;
  j["max_scaled_ratio"] = clamp_finite(r.max_scaled_ratio);
  j["min_scaled_ratio"] = clamp_finite(r.min_scaled_ratio);
  j["first_violation_time"] =
      r.first_violation_time ? json(*r.first_violation_time) : json();
  return j;
}

json json_of(const LengthReport& r) {
  json j;
  j["pass"] = r.pass;
  j["arclength"] = clamp_finite(r.arclength);
  j["chord_length"] = clamp_finite(r.chord_length);
  j["bound"] = clamp_finite(r.bound);
  j["ratio"] = clamp_finite(r.ratio);
  j["c_used"] = r.c_used;
  j["epsilon"] = r.epsilon;
  j["method"] = r.method;
  j["normalization"] = r.normalization;
  return j;
}

json json_of(const RetractionReport& r) {
  json j;
  j["pass"] = r.pass;
  j["c_used"] = r.c_used;
  j["max_ratio"] = clamp_finite(r.max_ratio);
  j["min_ratio"] = clamp_finite(r.min_ratio);
  j["normalization"] = r.normalization;
  j["epsilon"] = r.epsilon;
  json pts = json::array();
  for (const auto& p : r.points) {
    json e;
    e["y"] = json_of(p.y);
    e["f_gap"] = clamp_finite(p.f_gap);
    e["displacement"] = clamp_finite(p.displacement);
    e["bound"] = clamp_finite(p.bound);
    e["ratio"] = clamp_finite(p.ratio);
    e["minimizer_case"] = p.minimizer_case;
    e["ok"] = p.ok;
    pts.push_back(std::move(e));
  }
  j["points"] = std::move(pts);
  return j;
}

json json_of(const PLReport& r) {
  json j;
  j["region"] = json_of(r.region);
  j["inf_f_used"] = r.inf_f_used;
  j["c_hat"] = clamp_finite(r.c_hat);
  j["c_hat_meaning"] = "empirical upper bound on the best C";
  j["n_samples"] = r.n_samples;
  j["n_skipped"] = r.n_skipped;
  j["c_claimed"] = r.c_claimed ? json(*r.c_claimed) : json();
  if (r.violation) {
    j["violation"] = {{"point", json_of(r.violation->point)},
                      {"ratio", clamp_finite(r.violation->ratio)}};
  } else {
    j["violation"] = json();
  }
  j["pass"] = r.pass;
  j["epsilon"] = r.epsilon;
  j["sampler_seed"] = r.sampler_seed;
  return j;
}

json json_of(const GrowthReport& r) {
  json j;
  j["c_used"] = r.c_used;
  j["factor"] = r.factor;
  j["inf_f_used"] = r.inf_f_used;
  j["n_samples"] = r.n_samples;
  j["n_skipped"] = r.n_skipped;
  j["n_argmin_points"] = r.n_argmin_points;
  j["argmin_sample_spacing"] = clamp_finite(r.argmin_sample_spacing);
  j["min_ratio"] = clamp_finite(r.min_ratio);
  j["max_ratio"] = clamp_finite(r.max_ratio);
  j["epsilon"] = r.epsilon;
  if (r.violation) {
    j["violation"] = {{"point", json_of(r.violation->point)},
                      {"ratio", clamp_finite(r.violation->ratio)}};
  } else {
    j["violation"] = json();
  }
  j["pass"] = r.pass;
  j["sampler_seed"] = r.sampler_seed;
  return j;
}

json json_of(const HessianGapReport& r) {
  json j;
  j["c_used"] = r.c_used;
  j["tol_psd"] = r.tol_psd;
  j["tol_zero"] = r.tol_zero;
  j["epsilon"] = r.epsilon;
  json spectra = json::array();
  for (const auto& s : r.spectra) {
    json eigs = json::array();
    for (int i = 0; i < s.size(); ++i) eigs.push_back(round_sig12(s[i]));
    spectra.push_back(std::move(eigs));
  }
  j["spectra"] = std::move(spectra);
  j["gap_ok"] = r.gap_ok;
  if (r.violation) {
    j["violation"] = {{"point", json_of(r.violation->point)},
                      {"eigenvalue", round_sig12(r.violation->eigenvalue)}};
  } else {
    j["violation"] = json();
  }
  return j;
}

json json_of(const ConstantRankReport& r) {
  json j;
  j["threshold"] = r.threshold;
  j["ranks"] = r.ranks;
  j["constant_rank"] = r.constant_rank;
  j["common_rank"] = r.common_rank ? json(*r.common_rank) : json();
  return j;
}

json json_of(const KernelChartReport& r) {
  json j;
  j["x"] = json_of(r.x);
  j["r_requested"] = r.r_requested;
  j["r_used"] = r.r_used;
  j["kernel_dim"] = r.kernel_dim;
  j["injective_at_r_used"] = r.injective_at_r_used;
  j["injective_at_r_requested"] = r.injective_at_r_requested;
  j["min_projected_separation"] = clamp_finite(r.min_projected_separation);
  json probes = json::array();
  for (const auto& p : r.tangency) {
    json e;
    e["direction"] = json_of(p.direction);
    e["ts"] = p.ts;
    json gaps = json::array();
    for (double g : p.gaps) gaps.push_back(clamp_finite(g));
    e["gaps"] = std::move(gaps);
    e["n_fit"] = p.n_fit;
    e["slope"] = clamp_finite(p.slope);
    e["pass"] = p.pass;
    probes.push_back(std::move(e));
  }
  j["tangency"] = std::move(probes);
  j["tangency_ok"] = r.tangency_ok;
  j["slope_threshold"] = r.slope_threshold;
  j["pass"] = r.pass;
  return j;
}

json json_of(const CriticalSetModel& m) {
  json j;
  json pts = json::array();
  for (const auto& p : m.points) pts.push_back(json_of(p));
  j["points"] = std::move(pts);
  json spectra = json::array();
  for (const auto& s : m.eigenvalues) {
    json eigs = json::array();
    for (int i = 0; i < s.size(); ++i) eigs.push_back(round_sig12(s[i]));
    spectra.push_back(std::move(eigs));
  }
  j["eigenvalues"] = std::move(spectra);
  j["ranks"] = m.ranks;
  j["components"] = m.components;
  j["manifold_dim"] = m.manifold_dim ? json(*m.manifold_dim) : json();
  j["constant_rank"] = m.constant_rank;
  j["singleton"] = m.singleton;
  j["gap_ok"] = m.gap_ok;
  j["c_used"] = m.c_used;
  j["inf_f_used"] = m.inf_f_used;
  j["dedup_radius_used"] = m.dedup_radius_used;
  j["r_link_used"] = m.r_link_used;
  j["pl_claim_ok"] = m.pl_claim_ok;
  j["bounded_in_region"] = m.bounded_in_region;
  j["tension"] = m.tension;
  j["caveats"] = m.caveats;
  return j;
}

json json_of(const FlowFormulaReport& r) {
  json j;
  j["pass"] = r.pass;
  j["max_deviation"] = clamp_finite(r.max_deviation);
  j["reprojection_ok"] = r.reprojection_ok;
  j["max_reprojection_drift"] = clamp_finite(r.max_reprojection_drift);
  j["t_final"] = clamp_finite(r.t_final);
  j["n_steps"] = r.n_steps;
  j["tolerance"] = r.tolerance;
  return j;
}

json json_of(const RayInvarianceReport& r) {
  json j;
  j["pass"] = r.pass;
  json entries = json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"s", e.s},
                       {"ok", e.ok},
                       {"unique", e.unique},
                       {"drift", clamp_finite(e.drift)}});
  j["entries"] = std::move(entries);
  j["first_failing_s"] = r.first_failing_s ? json(*r.first_failing_s) : json();
  return j;
}

json json_of(const SeparationReport& r) {
  json j;
  j["consistent_with_convex"] = r.consistent_with_convex;
  j["n_pairs"] = r.n_pairs;
  j["n_skipped_x"] = r.n_skipped_x;
  j["max_inner"] = clamp_finite(r.max_inner);
  if (r.witness) {
    j["witness"] = {{"x", json_of(r.witness->x)},
                    {"y", json_of(r.witness->y)},
                    {"x_inf", json_of(r.witness->x_inf)},
                    {"inner", clamp_finite(r.witness->inner)}};
  } else {
    j["witness"] = json();
  }
  j["verdict"] = r.verdict;
  return j;
}

json json_of(const RegularityReport& r) {
  json j;
  json probes = json::array();
  for (const auto& p : r.probes) {
    json e;
    e["x"] = json_of(p.x);
    e["skipped"] = p.skipped;
    e["unique_projection"] = p.unique_projection;
    e["h_grid"] = p.h_grid;
    json hs = json::array();
    for (const auto& h : p.fd_hessians) hs.push_back(json_of(h));
    e["fd_hessians"] = std::move(hs);
    e["stabilized"] = p.stabilized;
    e["gradient_jump"] = p.gradient_jump;
    e["unbounded_tail"] = p.unbounded_tail;
    e["label"] = to_string(p.label);
    probes.push_back(std::move(e));
  }
  j["probes"] = std::move(probes);
  j["observed"] = to_string(r.observed);
  j["expected"] = to_string(r.expected);
  j["matches_expectation"] = r.matches_expectation;
  return j;
}

}  // namespace pllab
