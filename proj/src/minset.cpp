#include "pllab/minset.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "pllab/errors.hpp"
#include "pllab/pl_certify.hpp"

namespace pllab {

std::vector<Vector> locate_minimizers(const ScalarField& f, const Region& region,
                                      int n_starts, const FlowConfig& cfg,
                                      double dedup_radius, std::uint64_t seed) {
  if (n_starts < 1) throw InvalidParams("locate_minimizers: n_starts >= 1");
  if (!(dedup_radius > 0))
    throw InvalidParams("locate_minimizers: dedup_radius must be positive");

  std::vector<Vector> terminals;
  std::vector<double> values;
  for (const Vector& x0 : sample_region(region, n_starts, seed, &f)) {
    try {
      Vector lim = flow_limit(f, x0, cfg);
      values.push_back(eval(f, lim));
      terminals.push_back(std::move(lim));
    } catch (const NotConverged&) {
    } catch (const StepSizeUnderflow&) {
    }
  }
  if (terminals.empty())
    throw NoMinimizerFound("locate_minimizers: no start converged");

  double inf_ref = f.known_inf
                       ? *f.known_inf
                       : *std::min_element(values.begin(), values.end());
  const double tol_min = 1e-12 * (1.0 + std::abs(inf_ref));

  std::vector<Vector> kept;
  for (std::size_t i = 0; i < terminals.size(); ++i) {
    if (values[i] - inf_ref >= tol_min) continue;
    bool dup = false;
    for (const Vector& p : kept)
      if ((terminals[i] - p).norm() < dedup_radius) {
        dup = true;
        break;
      }
    if (!dup) kept.push_back(terminals[i]);
  }
  if (kept.empty())
    throw NoMinimizerFound("locate_minimizers: no terminal reached the infimum");
  return kept;
}

namespace {

Vector spectrum(const ScalarField& f, const Vector& p) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hessian(f, p));
  if (es.info() != Eigen::Success)
    throw Error("minset: Hessian eigendecomposition failed");
  return es.eigenvalues();  // ascending
}

}  // namespace

HessianGapReport hessian_gap_check(const ScalarField& f,
                                   const std::vector<Vector>& k_points,
                                   double c) {
  if (!(c > 0)) throw InvalidParams("hessian_gap_check: c must be positive");
  HessianGapReport rep;
  rep.c_used = c;
  rep.tol_psd = 1e-6 * c;
  rep.tol_zero = c / 4.0;
  const double gap_low = rep.tol_zero;
  const double gap_high = 0.5 * c * (1.0 - rep.epsilon);
  for (const Vector& p : k_points) {
    const Vector eigs = spectrum(f, p);
    rep.spectra.push_back(eigs);
    for (int i = 0; i < eigs.size(); ++i) {
      const double lam = eigs[i];
      const bool bad = lam <= -rep.tol_psd || (lam > gap_low && lam < gap_high);
      if (bad && rep.gap_ok) rep.violation = GapViolation{p, lam};
      if (bad) rep.gap_ok = false;
    }
  }
  return rep;
}

ConstantRankReport constant_rank_check(const ScalarField& f,
                                       const std::vector<Vector>& k_points,
                                       double c, double threshold) {
  if (k_points.empty())
    throw InvalidParams("constant_rank_check: need at least one point");
  ConstantRankReport rep;
  rep.threshold = threshold > 0 ? threshold : c / 4.0;
  for (const Vector& p : k_points) {
    const Vector eigs = spectrum(f, p);
    int rank = 0;
    for (int i = 0; i < eigs.size(); ++i)
      if (eigs[i] >= rep.threshold) ++rank;
    rep.ranks.push_back(rank);
  }
  rep.constant_rank = std::all_of(rep.ranks.begin(), rep.ranks.end(),
                                  [&](int r) { return r == rep.ranks[0]; });
  if (rep.constant_rank) rep.common_rank = rep.ranks[0];
  return rep;
}

KernelChartReport kernel_chart_probe(const ScalarField& f, const Vector& x,
                                     const std::vector<Vector>& k_points,
                                     double r, double c, double dedup_radius) {
  if (!(r > 0)) throw InvalidParams("kernel_chart_probe: r must be positive");
  if (!(c > 0)) throw InvalidParams("kernel_chart_probe: c must be positive");

  KernelChartReport rep;
  rep.x = x;
  rep.r_requested = r;

  const Matrix h0 = hessian(f, x);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h0);
  if (es.info() != Eigen::Success)
    throw Error("kernel_chart_probe: eigendecomposition failed");
  const Vector eigs = es.eigenvalues();
  int kdim = 0;
  for (int i = 0; i < eigs.size(); ++i)
    if (eigs[i] < c / 4.0) ++kdim;
  if (kdim == 0)
    throw KernelEmpty("kernel_chart_probe: Hessian has full rank; the chart "
                      "is the point itself");
  rep.kernel_dim = kdim;
  const Matrix u = es.eigenvectors().leftCols(kdim);  // ascending order

  // Shrink r until the sampled Hessian variation over B(x,r) stays below c/4.
  double r_used = r;
  while (true) {
    double worst = 0.0;
    const BallRegion ball(x, r_used);
    for (const Vector& y : sample_region(Region(ball), 32, /*seed=*/0, &f)) {
      Eigen::SelfAdjointEigenSolver<Matrix> ds(hessian(f, y) - h0);
      worst = std::max(worst, ds.eigenvalues().cwiseAbs().maxCoeff());
    }
    for (const Vector& p : k_points)
      if ((p - x).norm() <= r_used) {
        Eigen::SelfAdjointEigenSolver<Matrix> ds(hessian(f, p) - h0);
        worst = std::max(worst, ds.eigenvalues().cwiseAbs().maxCoeff());
      }
    if (worst <= c / 4.0) break;
    r_used /= 2.0;
    if (r_used < 1e-6 * (1.0 + x.norm()))
      throw RadiusNotFound("kernel_chart_probe: Hessian varies too fast near x");
  }
  rep.r_used = r_used;

  auto injective_within = [&](double radius) {
    double min_sep = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (std::size_t i = 0; i < k_points.size(); ++i) {
      if ((k_points[i] - x).norm() > radius) continue;
      for (std::size_t j = i + 1; j < k_points.size(); ++j) {
        if ((k_points[j] - x).norm() > radius) continue;
        const double sep = (u.transpose() * (k_points[i] - k_points[j])).norm();
        min_sep = std::min(min_sep, sep);
        if (sep < dedup_radius) ok = false;
      }
    }
    return std::pair<bool, double>(ok, min_sep);
  };
  rep.injective_at_r_used = injective_within(r_used).first;
  const auto [ok_req, sep_req] = injective_within(r);
  rep.injective_at_r_requested = ok_req;
  rep.min_projected_separation = sep_req;

  const double inf_used = f.known_inf ? *f.known_inf : eval(f, x);
  const double gap0 = eval(f, x) - inf_used;
  for (int kcol = 0; kcol < kdim; ++kcol) {
    TangencyProbe probe;
    probe.direction = u.col(kcol);
    const double floor = std::max(100.0 * gap0, 1e-300);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int j = 0; j <= 7; ++j) {
      const double t = 1e-2 / std::pow(2.0, j);
      const double gap = eval(f, x + t * probe.direction) - inf_used;
      probe.ts.push_back(t);
      probe.gaps.push_back(gap);
      if (gap > floor) {
        const double lx = std::log(t), ly = std::log(gap);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        ++probe.n_fit;
      }
    }
    if (probe.n_fit >= 3) {
      const double n = probe.n_fit;
      probe.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
      probe.pass = probe.slope > rep.slope_threshold;
    }
    rep.tangency_ok = rep.tangency_ok && probe.pass;
    rep.tangency.push_back(std::move(probe));
  }
  rep.pass = rep.injective_at_r_used && rep.tangency_ok;
  return rep;
}

CriticalSetModel build_model(const ScalarField& f, const Region& region,
                             double c, int n_starts, const FlowConfig& cfg,
                             double r_link) {
  if (!(c > 0)) throw InvalidParams("build_model: c must be positive");
  CriticalSetModel model;
  model.c_used = c;
  model.dedup_radius_used = 1e-5;
  model.points =
      locate_minimizers(f, region, n_starts, cfg, model.dedup_radius_used);
  const std::size_t k = model.points.size();

  double inf_used = f.known_inf ? *f.known_inf
                                : std::numeric_limits<double>::infinity();
  if (!f.known_inf)
    for (const Vector& p : model.points)
      inf_used = std::min(inf_used, eval(f, p));
  model.inf_f_used = inf_used;

  const HessianGapReport gap = hessian_gap_check(f, model.points, c);
  model.eigenvalues = gap.spectra;
  model.gap_ok = gap.gap_ok;

  const ConstantRankReport rank = constant_rank_check(f, model.points, c);
  model.ranks = rank.ranks;
  model.constant_rank = rank.constant_rank;
  if (rank.constant_rank) model.manifold_dim = f.dim - *rank.common_rank;

  if (r_link <= 0) {
    r_link = 1e-4;
    if (k >= 2) {
      std::vector<double> nn;
      for (std::size_t i = 0; i < k; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < k; ++j)
          if (j != i)
            best = std::min(best, (model.points[i] - model.points[j]).norm());
        nn.push_back(best);
      }
      std::sort(nn.begin(), nn.end());
      r_link = std::max(3.0 * nn[nn.size() / 2], 1e-4);
    }
  }
  model.r_link_used = r_link;

  // Single-linkage components at radius r_link (union-find).
  std::vector<std::size_t> parent(k);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j)
      if ((model.points[i] - model.points[j]).norm() <= r_link)
        parent[find(i)] = find(j);
  std::vector<std::vector<int>> comps;
  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t root = find(i);
    auto it = std::find(roots.begin(), roots.end(), root);
    if (it == roots.end()) {
      roots.push_back(root);
      comps.push_back({static_cast<int>(i)});
    } else {
      comps[static_cast<std::size_t>(it - roots.begin())].push_back(
          static_cast<int>(i));
    }
  }
  model.components = std::move(comps);

  double diameter = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j)
      diameter = std::max(diameter, (model.points[i] - model.points[j]).norm());
  model.singleton = model.components.size() == 1 &&
                    diameter < 10.0 * model.dedup_radius_used;

  try {
    model.pl_claim_ok =
        check_pl_claim(f, region, c, 200, inf_used, /*seed=*/0).pass;
  } catch (const Error& e) {
    model.pl_claim_ok = false;
    model.caveats.push_back(std::string("sampled claim check unavailable: ") +
                            e.what());
  }

  double min_boundary = std::numeric_limits<double>::infinity();
  for (const Vector& p : model.points)
    min_boundary = std::min(min_boundary, boundary_distance(region, p, &f));
  model.bounded_in_region = min_boundary > r_link;
  model.caveats.push_back(
      model.bounded_in_region
          ? "boundedness of the minimizing set inferred from located points "
            "staying clear of the region boundary"
          : "located minimizers approach the region boundary; boundedness "
            "not certified");

  const bool smooth_enough = f.smoothness == Smoothness::C_inf ||
                             f.smoothness == Smoothness::C2;
  if (smooth_enough && model.pl_claim_ok && model.bounded_in_region &&
      !model.singleton)
    model.tension = "theorem tension: check smoothness/region/convergence";
  return model;
}

}  // namespace pllab
