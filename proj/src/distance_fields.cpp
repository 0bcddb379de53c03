#include "pllab/distance_fields.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "pllab/errors.hpp"
#include "pllab/sampling.hpp"

namespace pllab {

std::string to_string(RegularityLabel label) {
  switch (label) {
    case RegularityLabel::C2_candidate: return "C2_candidate";
    case RegularityLabel::C11_candidate: return "C11_candidate";
    case RegularityLabel::nonsmooth: return "nonsmooth";
  }
  return "?";
}

// ---- construction -----------------------------------------------------------

ClosedSetRep::ClosedSetRep(PointCloudSet s) : v_(std::move(s)) {
  const auto& c = std::get<PointCloudSet>(v_);
  if (c.points.empty()) throw InvalidParams("point cloud: empty");
  dim_ = static_cast<int>(c.points.front().size());
  if (dim_ == 0) throw InvalidParams("point cloud: zero-dim point");
  for (const auto& p : c.points)
    if (p.size() != dim_) throw DimensionMismatch("point cloud: mixed dims");
}

ClosedSetRep::ClosedSetRep(BoxSet s) : v_(std::move(s)) {
  const auto& b = std::get<BoxSet>(v_);
  if (b.lower.size() != b.upper.size() || b.lower.size() == 0)
    throw InvalidParams("box set: bad bounds");
  for (int i = 0; i < b.lower.size(); ++i)
    if (!(b.lower[i] <= b.upper[i]))
      throw InvalidParams("box set: lower must be <= upper");
  dim_ = static_cast<int>(b.lower.size());
}

ClosedSetRep::ClosedSetRep(SphereSet s) : v_(std::move(s)) {
  const auto& sp = std::get<SphereSet>(v_);
  if (sp.center.size() == 0) throw InvalidParams("sphere set: empty center");
  if (!(sp.radius > 0)) throw InvalidParams("sphere set: radius must be > 0");
  dim_ = static_cast<int>(sp.center.size());
}

ClosedSetRep::ClosedSetRep(AffineSet s) : v_(std::move(s)) {
  const auto& a = std::get<AffineSet>(v_);
  dim_ = static_cast<int>(a.basepoint.size());
  if (dim_ == 0) throw InvalidParams("affine set: empty basepoint");
  if (a.basis.size() > 0) {
    if (a.basis.rows() != dim_)
      throw DimensionMismatch("affine set: basis rows != ambient dim");
    const Matrix gram = a.basis.transpose() * a.basis;
    const Matrix eye = Matrix::Identity(gram.rows(), gram.cols());
    if ((gram - eye).cwiseAbs().maxCoeff() > 1e-12)
      throw InvalidParams("affine set: basis not orthonormal within 1e-12");
  }
}

ClosedSetRep::ClosedSetRep(PolytopeSet s) : v_(std::move(s)) {
  const auto& p = std::get<PolytopeSet>(v_);
  const int m = static_cast<int>(p.a.rows());
  dim_ = static_cast<int>(p.a.cols());
  if (m < 1 || dim_ < 1) throw InvalidParams("polytope: empty system");
  if (m > 16)
    throw InvalidParams("polytope: more than 16 halfspaces not supported");
  if (p.b.size() != m) throw DimensionMismatch("polytope: b size != rows");
  if (p.feasible_point.size() != dim_)
    throw DimensionMismatch("polytope: feasible point dim");
  for (int i = 0; i < m; ++i)
    if (p.a.row(i).norm() < 1e-14)
      throw InvalidParams("polytope: zero halfspace normal");
  const double tol = 1e-12 * (1.0 + p.b.cwiseAbs().maxCoeff());
  if (((p.a * p.feasible_point - p.b).maxCoeff()) > tol)
    throw InvalidParams("polytope: feasible point violates the system");
}

ClosedSetRep::ClosedSetRep(UnionSet s) : v_(std::move(s)) {
  const auto& u = std::get<UnionSet>(v_);
  if (u.members.empty()) throw InvalidParams("union set: empty");
  dim_ = u.members.front().dim();
  for (const auto& mset : u.members)
    if (mset.dim() != dim_) throw DimensionMismatch("union set: mixed dims");
}

std::string ClosedSetRep::variant_name() const {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PointCloudSet>) return "finite_point_cloud";
        else if constexpr (std::is_same_v<T, BoxSet>) return "box";
        else if constexpr (std::is_same_v<T, SphereSet>) return "sphere";
        else if constexpr (std::is_same_v<T, AffineSet>) return "affine";
        else if constexpr (std::is_same_v<T, PolytopeSet>) return "polytope";
        else return "union";
      },
      v_);
}

bool ClosedSetRep::convex_certified() const {
  return std::visit(
      [](const auto& v) -> bool {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PointCloudSet>)
          return v.points.size() == 1;
        else if constexpr (std::is_same_v<T, BoxSet>) return true;
        else if constexpr (std::is_same_v<T, SphereSet>) return false;
        else if constexpr (std::is_same_v<T, AffineSet>) return true;
        else if constexpr (std::is_same_v<T, PolytopeSet>) return true;
        else if constexpr (std::is_same_v<T, UnionSet>)
          return v.members.size() == 1 && v.members.front().convex_certified();
        else return false;
      },
      v_);
}

// ---- projection -------------------------------------------------------------

namespace {

constexpr double kTieRel = 1e-10;   // same-distance window
constexpr double kMergeRadius = 1e-8;

std::vector<Vector> merge_representatives(std::vector<Vector> reps) {
  std::vector<Vector> out;
  for (auto& r : reps) {
    bool dup = false;
    for (const auto& kept : out)
      if ((r - kept).norm() <= kMergeRadius) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(std::move(r));
  }
  return out;
}

ProjectionResult finish(std::vector<Vector> reps, double distance) {
  ProjectionResult pr;
  pr.nearest = merge_representatives(std::move(reps));
  pr.distance = distance;
  pr.unique = pr.nearest.size() == 1;
  return pr;
}

ProjectionResult project_cloud(const PointCloudSet& s, const Vector& x) {
  double dmin = std::numeric_limits<double>::infinity();
  for (const auto& p : s.points) dmin = std::min(dmin, (x - p).norm());
  std::vector<Vector> reps;
  for (const auto& p : s.points)
    if ((x - p).norm() <= dmin + kTieRel * (1.0 + dmin)) reps.push_back(p);
  return finish(std::move(reps), dmin);
}

ProjectionResult project_box(const BoxSet& s, const Vector& x) {
  Vector z = x.cwiseMax(s.lower).cwiseMin(s.upper);
  const double d = (x - z).norm();
  return {{std::move(z)}, d, true};
}

ProjectionResult project_sphere(const SphereSet& s, const Vector& x) {
  const Vector r = x - s.center;
  const double rho = r.norm();
  if (rho <= 1e-13 * (1.0 + s.center.norm())) {
    // Center of the sphere: every direction is nearest.
    std::vector<Vector> reps;
    const int n = static_cast<int>(s.center.size());
    if (n == 1) {
      reps.push_back(s.center + Vector::Constant(1, s.radius));
      reps.push_back(s.center - Vector::Constant(1, s.radius));
    } else {
      for (int j = 0; j < 8; ++j) {
        const double th = 2.0 * M_PI * j / 8.0;
        Vector rep = s.center;
        rep[0] += s.radius * std::cos(th);
        rep[1] += s.radius * std::sin(th);
        reps.push_back(std::move(rep));
      }
    }
    ProjectionResult pr;
    pr.nearest = std::move(reps);
    pr.distance = s.radius;
    pr.unique = false;
    return pr;
  }
  Vector z = s.center + (s.radius / rho) * r;
  return {{std::move(z)}, std::abs(rho - s.radius), true};
}

ProjectionResult project_affine(const AffineSet& s, const Vector& x) {
  Vector z = s.basepoint;
  if (s.basis.size() > 0) z += s.basis * (s.basis.transpose() * (x - s.basepoint));
  const double d = (x - z).norm();
  return {{std::move(z)}, d, true};
}

// Exhaustive active-set search over KKT systems: the projection onto
// {a_i . z <= b_i} equals x - A_S^T lambda for some subset S of active rows
// with lambda >= 0 (Caratheodory: |S| <= n suffices).
ProjectionResult project_polytope(const PolytopeSet& s, const Vector& x) {
  const int m = static_cast<int>(s.a.rows());
  const int n = static_cast<int>(s.a.cols());
  const double bscale = 1.0 + s.b.cwiseAbs().maxCoeff() + x.norm();
  const double feas_tol = 1e-12 * bscale;

  if ((s.a * x - s.b).maxCoeff() <= feas_tol) return {{x}, 0.0, true};

  Vector best;
  double bestd = std::numeric_limits<double>::infinity();

  std::vector<int> comb;
  auto try_subset = [&](const std::vector<int>& idx) {
    const int k = static_cast<int>(idx.size());
    Matrix as(k, n);
    Vector bs(k);
    for (int i = 0; i < k; ++i) {
      as.row(i) = s.a.row(idx[i]);
      bs[i] = s.b[idx[i]];
    }
    const Matrix gram = as * as.transpose();
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(gram);
    const Vector lambda = cod.solve(as * x - bs);
    const Vector z = x - as.transpose() * lambda;
    if ((as * z - bs).cwiseAbs().maxCoeff() > 1e-9 * bscale) return;  // rank-deficient miss
    if (lambda.minCoeff() < -1e-10 * bscale) return;                  // dual infeasible
    if ((s.a * z - s.b).maxCoeff() > 1e-9 * bscale) return;           // primal infeasible
    const double d = (x - z).norm();
    if (d < bestd) {
      bestd = d;
      best = z;
    }
  };

  const int kmax = std::min(m, n);
  std::function<void(int, int)> rec = [&](int start, int remaining) {
    if (remaining == 0) {
      try_subset(comb);
      return;
    }
    for (int i = start; i <= m - remaining; ++i) {
      comb.push_back(i);
      rec(i + 1, remaining - 1);
      comb.pop_back();
    }
  };
  for (int k = 1; k <= kmax; ++k) rec(0, k);

  if (!best.size())
    throw Error("polytope projection: no KKT candidate found (degenerate system)");
  return {{best}, bestd, true};
}

ProjectionResult project_union(const UnionSet& s, const Vector& x) {
  std::vector<ProjectionResult> results;
  double dmin = std::numeric_limits<double>::infinity();
  for (const auto& mset : s.members) {
    results.push_back(project(mset, x));
    dmin = std::min(dmin, results.back().distance);
  }
  std::vector<Vector> reps;
  for (const auto& pr : results)
    if (pr.distance <= dmin + kTieRel * (1.0 + dmin))
      for (const auto& rep : pr.nearest) reps.push_back(rep);
  return finish(std::move(reps), dmin);
}

}  // namespace

ProjectionResult project(const ClosedSetRep& set, const Vector& x) {
  if (x.size() != set.dim())
    throw DimensionMismatch("project: point dim != set dim");
  return std::visit(
      [&](const auto& v) -> ProjectionResult {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PointCloudSet>) return project_cloud(v, x);
        else if constexpr (std::is_same_v<T, BoxSet>) return project_box(v, x);
        else if constexpr (std::is_same_v<T, SphereSet>) return project_sphere(v, x);
        else if constexpr (std::is_same_v<T, AffineSet>) return project_affine(v, x);
        else if constexpr (std::is_same_v<T, PolytopeSet>) return project_polytope(v, x);
        else return project_union(v, x);
      },
      set.rep());
}

// ---- membership samples -------------------------------------------------------

std::vector<Vector> sample_set(const ClosedSetRep& set, int count,
                               std::uint64_t seed) {
  std::vector<Vector> out;
  if (count <= 0) return out;
  out.reserve(count);
  const int n = set.dim();

  if (const auto* c = std::get_if<PointCloudSet>(&set.rep())) {
    for (int i = 0; i < count; ++i) out.push_back(c->points[i % c->points.size()]);
    return out;
  }
  if (const auto* b = std::get_if<BoxSet>(&set.rep())) {
    if (n <= 4) {
      for (int mask = 0; mask < (1 << n) && static_cast<int>(out.size()) < count;
           ++mask) {
        Vector corner(n);
        for (int i = 0; i < n; ++i)
          corner[i] = (mask >> i & 1) ? b->upper[i] : b->lower[i];
        out.push_back(std::move(corner));
      }
    }
    for (const auto& p :
         sample_box(b->lower, b->upper, count - static_cast<int>(out.size()), seed))
      out.push_back(p);
    return out;
  }
  if (const auto* sp = std::get_if<SphereSet>(&set.rep())) {
    for (const auto& d : sphere_directions(n, count, seed))
      out.push_back(sp->center + sp->radius * d);
    return out;
  }
  if (const auto* a = std::get_if<AffineSet>(&set.rep())) {
    const int k = static_cast<int>(a->basis.cols());
    if (k == 0) return std::vector<Vector>(count, a->basepoint);
    const Vector lo = Vector::Constant(k, -3.0), hi = Vector::Constant(k, 3.0);
    for (const auto& u : sample_box(lo, hi, count, seed))
      out.push_back(a->basepoint + a->basis * u);
    return out;
  }
  if (const auto* p = std::get_if<PolytopeSet>(&set.rep())) {
    const double extent = 4.0 * (1.0 + p->feasible_point.cwiseAbs().maxCoeff());
    const Vector lo = p->feasible_point - Vector::Constant(n, extent);
    const Vector hi = p->feasible_point + Vector::Constant(n, extent);
    out.push_back(p->feasible_point);
    for (const auto& u : sample_box(lo, hi, count - 1, seed))
      out.push_back(project(set, u).nearest.front());
    return out;
  }
  const auto& u = std::get<UnionSet>(set.rep());
  const int nm = static_cast<int>(u.members.size());
  std::vector<std::vector<Vector>> per;
  const int each = (count + nm - 1) / nm;
  for (int i = 0; i < nm; ++i)
    per.push_back(sample_set(u.members[i], each, seed + i));
  for (int j = 0; j < each && static_cast<int>(out.size()) < count; ++j)
    for (int i = 0; i < nm && static_cast<int>(out.size()) < count; ++i)
      out.push_back(per[i][j]);
  return out;
}

// ---- the half squared distance field ----------------------------------------

ScalarField dist_sq_field(const ClosedSetRep& set) {
  ScalarField f;
  f.dim = set.dim();
  f.name = "half_sq_dist(" + set.variant_name() + ")";
  const ClosedSetRep F = set;
  f.value = [F](const Vector& x) {
    const double d = project(F, x).distance;
    return 0.5 * d * d;
  };
  const double grad_step = f.fd.grad_step;
  f.analytic_gradient = [F, grad_step](const Vector& x) -> Vector {
    const ProjectionResult pr = project(F, x);
    if (pr.unique) return x - pr.nearest.front();
    // Non-unique locus: fall back to central differences of the value.
    Vector g(x.size());
    Vector xp = x, xm = x;
    for (int i = 0; i < x.size(); ++i) {
      const double h = grad_step * std::max(1.0, std::abs(x[i]));
      xp[i] = x[i] + h;
      xm[i] = x[i] - h;
      const double vp = 0.5 * std::pow(project(F, xp).distance, 2);
      const double vm = 0.5 * std::pow(project(F, xm).distance, 2);
      g[i] = (vp - vm) / (2.0 * h);
      xp[i] = x[i];
      xm[i] = x[i];
    }
    return g;
  };
  f.smoothness = set.convex_certified() ? Smoothness::C11 : Smoothness::C0;
  if (const auto* sp = std::get_if<SphereSet>(&set.rep()))
    f.nonsmooth_points.push_back(sp->center);
  f.known_inf = 0.0;
  f.known_pl_constant = 2.0;
  f.known_argmin = "the represented set (" + set.variant_name() + ")";
  return f;
}

// ---- checks -------------------------------------------------------------------

FlowFormulaReport flow_formula_check(const ClosedSetRep& set, const Vector& x,
                                     const FlowConfig& cfg, double tolerance) {
  const ProjectionResult pr = project(set, x);
  if (!pr.unique)
    throw NonUniqueProjection("flow_formula_check: base point has ties");
  const Vector p = pr.nearest.front();

  const ScalarField f = dist_sq_field(set);
  const Trajectory traj = integrate_flow(f, x, cfg);

  FlowFormulaReport rep;
  rep.tolerance = tolerance;
  rep.n_steps = traj.times.size();
  rep.t_final = traj.times.back();
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const Vector closed = p + std::exp(-traj.times[k]) * (x - p);
    rep.max_deviation =
        std::max(rep.max_deviation, (traj.states[k] - closed).norm());
  }
  const std::size_t last = traj.times.size() - 1;
  for (int i = 0; i < 10; ++i) {
    const std::size_t idx = (last * i) / 9;
    const ProjectionResult prk = project(set, traj.states[idx]);
    const double drift = (prk.nearest.front() - p).norm();
    rep.max_reprojection_drift = std::max(rep.max_reprojection_drift, drift);
    if (!prk.unique || drift > 1e-8) rep.reprojection_ok = false;
  }
  rep.pass = rep.reprojection_ok && rep.max_deviation <= tolerance;
  return rep;
}

RayInvarianceReport ray_invariance_check(const ClosedSetRep& set,
                                         const Vector& x,
                                         const std::vector<double>& s_grid) {
  const ProjectionResult pr = project(set, x);
  if (!pr.unique)
    throw NonUniqueProjection("ray_invariance_check: base point has ties");
  const Vector p = pr.nearest.front();

  RayInvarianceReport rep;
  for (double s : s_grid) {
    if (s < 0) throw InvalidParams("ray_invariance_check: s must be >= 0");
    RayCheckEntry e;
    e.s = s;
    const Vector z = p + s * (x - p);
    const ProjectionResult przs = project(set, z);
    e.unique = przs.unique;
    double drift = std::numeric_limits<double>::infinity();
    for (const auto& rep_pt : przs.nearest)
      drift = std::min(drift, (rep_pt - p).norm());
    e.drift = drift;
    e.ok = przs.unique && drift <= 1e-8;
    if (!e.ok && !rep.first_failing_s) rep.first_failing_s = s;
    rep.pass = rep.pass && e.ok;
    rep.entries.push_back(e);
  }
  return rep;
}

SeparationReport separation_convexity_test(const ClosedSetRep& set,
                                           const std::vector<Vector>& x_samples,
                                           int y_samples_per_x,
                                           std::uint64_t seed) {
  SeparationReport rep;
  std::size_t ix = 0;
  for (const Vector& x : x_samples) {
    ++ix;
    const ProjectionResult pr = project(set, x);
    if (!pr.unique || pr.distance <= 1e-6) {
      ++rep.n_skipped_x;
      continue;
    }
    const Vector xinf = pr.nearest.front();
    for (const Vector& y : sample_set(set, y_samples_per_x, seed + ix)) {
      ++rep.n_pairs;
      const double inner = (x - xinf).dot(y - xinf);
      rep.max_inner = std::max(rep.max_inner, inner);
      const double scale = (1.0 + (x - xinf).norm()) * (1.0 + (y - xinf).norm());
      if (inner > 1e-8 * scale) {
        rep.consistent_with_convex = false;
        if (!rep.witness || inner > rep.witness->inner)
          rep.witness = SeparationWitness{x, y, xinf, inner};
      }
    }
  }
  rep.verdict =
      rep.consistent_with_convex ? "consistent_with_convex" : "nonconvex_witness";
  return rep;
}

namespace {

Matrix fd_hessian_of_half_dsq(const ClosedSetRep& set, const Vector& x, double h) {
  const int n = static_cast<int>(x.size());
  auto val = [&](const Vector& z) {
    const double d = project(set, z).distance;
    return 0.5 * d * d;
  };
  Matrix H(n, n);
  const double f0 = val(x);
  for (int i = 0; i < n; ++i) {
    Vector xi = x;
    xi[i] += h;
    const double fp = val(xi);
    xi[i] = x[i] - h;
    const double fm = val(xi);
    H(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
    for (int j = i + 1; j < n; ++j) {
      Vector z = x;
      z[i] += h; z[j] += h;
      const double fpp = val(z);
      z[j] = x[j] - h;
      const double fpm = val(z);
      z[i] = x[i] - h; z[j] = x[j] + h;
      const double fmp = val(z);
      z[j] = x[j] - h;
      const double fmm = val(z);
      H(i, j) = H(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
    }
  }
  return H;
}

}  // namespace

RegularityReport regularity_probe(const ClosedSetRep& set,
                                  const std::vector<Vector>& probe_points,
                                  const std::vector<double>& h_grid) {
  if (h_grid.size() < 2)
    throw InvalidParams("regularity_probe: need at least two step sizes");
  std::vector<double> hs = h_grid;
  std::sort(hs.begin(), hs.end(), std::greater<>());  // coarse -> fine

  RegularityReport rep;
  bool any_c11 = false, any_nonsmooth = false;
  for (const Vector& x : probe_points) {
    RegularityProbePoint p;
    p.x = x;
    p.h_grid = hs;
    const ProjectionResult pr = project(set, x);
    p.unique_projection = pr.unique;
    if (pr.distance <= 1e-6) {
      p.skipped = true;
      rep.probes.push_back(std::move(p));
      continue;
    }
    for (double h : hs) p.fd_hessians.push_back(fd_hessian_of_half_dsq(set, x, h));
    p.hessian_at_finest = p.fd_hessians.back();

    const Matrix& coarse = p.fd_hessians.front();
    const Matrix& mid = p.fd_hessians[hs.size() - 2];
    const Matrix& fine = p.fd_hessians.back();
    const double m_coarse = coarse.cwiseAbs().maxCoeff();
    const double m_fine = fine.cwiseAbs().maxCoeff();

    p.stabilized =
        (mid - fine).cwiseAbs().maxCoeff() / (1.0 + fine.cwiseAbs().maxCoeff()) <
        1e-2;
    // A gradient discontinuity shows up as a second difference ~ jump/h at
    // the steps wide enough to straddle it.
    for (std::size_t hi = 0; hi + 1 < hs.size(); ++hi)
      for (int i = 0; i < fine.rows(); ++i)
        for (int j = 0; j < fine.cols(); ++j) {
          const double spike = (std::abs(p.fd_hessians[hi](i, j)) -
                                std::abs(fine(i, j))) * hs[hi];
          if (spike > 0.1) p.gradient_jump = true;
        }
    p.unbounded_tail = m_fine >= 5.0 * std::max(m_coarse, 1e-12) && m_fine >= 10.0;

    if (!p.unique_projection || p.gradient_jump || p.unbounded_tail)
      p.label = RegularityLabel::nonsmooth;
    else if (p.stabilized)
      p.label = RegularityLabel::C2_candidate;
    else
      p.label = RegularityLabel::C11_candidate;

    any_c11 |= p.label == RegularityLabel::C11_candidate;
    any_nonsmooth |= p.label == RegularityLabel::nonsmooth;
    rep.probes.push_back(std::move(p));
  }

  rep.observed = any_nonsmooth ? RegularityLabel::nonsmooth
                 : any_c11     ? RegularityLabel::C11_candidate
                               : RegularityLabel::C2_candidate;

  const bool point_like =
      std::holds_alternative<AffineSet>(set.rep()) ||
      (std::holds_alternative<PointCloudSet>(set.rep()) &&
       std::get<PointCloudSet>(set.rep()).points.size() == 1);
  rep.expected = point_like ? RegularityLabel::C2_candidate
                 : set.convex_certified() ? RegularityLabel::C11_candidate
                                          : RegularityLabel::nonsmooth;
  rep.matches_expectation = rep.observed == rep.expected;
  return rep;
}

}  // namespace pllab
