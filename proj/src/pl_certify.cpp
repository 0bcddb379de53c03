#include "pllab/pl_certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pllab/errors.hpp"
#include "pllab/sampling.hpp"

namespace pllab {

namespace {

PLReport ratio_sweep(const ScalarField& f, const Region& region, int n_samples,
                     double inf_f, std::uint64_t seed) {
  if (n_samples < 1) throw InvalidParams("pl sweep: n_samples must be >= 1");
  PLReport rep{region};
  rep.inf_f_used = inf_f;
  rep.n_samples = n_samples;
  rep.sampler_seed = seed;

  const double eps_gap = 1e-12 * (1.0 + std::abs(inf_f));
  double c_hat = std::numeric_limits<double>::infinity();
  std::optional<PLViolation> worst;

  for (const Vector& x : sample_region(region, n_samples, seed, &f)) {
    const double gap = eval(f, x) - inf_f;
    if (gap < -eps_gap)
      throw InfBelowSamples("pl sweep: sampled f below the supplied infimum");
    if (gap < eps_gap) {
      ++rep.n_skipped;
      continue;
    }
    const double ratio = grad(f, x).squaredNorm() / gap;
    if (ratio < c_hat) {
      c_hat = ratio;
      worst = PLViolation{x, ratio};
    }
  }
  if (rep.n_skipped == rep.n_samples)
    throw AllPointsSkipped("pl sweep: every sample lies in the argmin");
  rep.c_hat = c_hat;
  rep.violation = worst;  // callers decide whether the minimum is a violation
  return rep;
}

}  // namespace

PLReport estimate_pl_constant(const ScalarField& f, const Region& region,
                              int n_samples, double inf_f, std::uint64_t seed) {
  PLReport rep = ratio_sweep(f, region, n_samples, inf_f, seed);
  rep.violation.reset();
  return rep;
}

PLReport check_pl_claim(const ScalarField& f, const Region& region,
                        double c_claimed, int n_samples, double inf_f,
                        std::uint64_t seed, double epsilon) {
  if (!(c_claimed > 0))
    throw InvalidParams("check_pl_claim: claimed constant must be positive");
  PLReport rep = ratio_sweep(f, region, n_samples, inf_f, seed);
  rep.c_claimed = c_claimed;
  rep.epsilon = epsilon;
  rep.pass = rep.c_hat >= c_claimed * (1.0 - epsilon);
  if (rep.pass) rep.violation.reset();
  return rep;
}

GrowthReport quadratic_growth_check(const ScalarField& f, const Region& region,
                                    double c,
                                    const std::vector<Vector>& argmin_points,
                                    int n_samples, std::uint64_t seed,
                                    double epsilon) {
  if (!(c > 0)) throw InvalidParams("growth check: c must be positive");
  if (n_samples < 1) throw InvalidParams("growth check: n_samples must be >= 1");
  if (argmin_points.empty())
    throw EmptyArgminModel("growth check: no argmin points supplied");

  GrowthReport rep;
  rep.c_used = c;
  rep.factor = c / 4.0;
  rep.epsilon = epsilon;
  rep.n_argmin_points = static_cast<int>(argmin_points.size());
  rep.n_samples = n_samples;
  rep.sampler_seed = seed;

  double inf_f = std::numeric_limits<double>::infinity();
  for (const Vector& p : argmin_points) inf_f = std::min(inf_f, eval(f, p));
  rep.inf_f_used = inf_f;
  for (const Vector& p : argmin_points)
    if (eval(f, p) - inf_f > 1e-10)
      throw InvalidParams("growth check: argmin point with f-gap above 1e-10");

  if (argmin_points.size() >= 2) {
    // Median nearest-neighbor distance; for large models the median is taken
    // over an evenly strided subset of query points (each still matched
    // against every model point) to keep this O(k*m).
    const std::size_t m = argmin_points.size();
    const std::size_t queries = std::min<std::size_t>(m, 2048);
    const std::size_t stride = m / queries;
    std::vector<double> nn;
    for (std::size_t qi = 0; qi < queries; ++qi) {
      const std::size_t i = qi * stride;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < m; ++j)
        if (j != i)
          best = std::min(best, (argmin_points[i] - argmin_points[j]).norm());
      nn.push_back(best);
    }
    std::sort(nn.begin(), nn.end());
    rep.argmin_sample_spacing = nn[nn.size() / 2];
  }

  double min_ratio = std::numeric_limits<double>::infinity();
  double max_ratio = 0.0;
  for (const Vector& x : sample_region(region, n_samples, seed, &f)) {
    double dist = std::numeric_limits<double>::infinity();
    for (const Vector& p : argmin_points) dist = std::min(dist, (x - p).norm());
    if (dist <= 1e-150) {
      ++rep.n_skipped;
      continue;
    }
    const double gap = eval(f, x) - inf_f;
    const double ratio = gap / (rep.factor * dist * dist);
    if (ratio < min_ratio) {
      min_ratio = ratio;
      if (ratio < 1.0 - epsilon) rep.violation = GrowthViolation{x, ratio};
    }
    max_ratio = std::max(max_ratio, ratio);
  }
  if (rep.n_skipped == rep.n_samples)
    throw AllPointsSkipped("growth check: every sample lies on the argmin model");
  rep.min_ratio = min_ratio;
  rep.max_ratio = max_ratio;
  rep.pass = min_ratio >= 1.0 - epsilon;
  return rep;
}

ScalarField normalize(const ScalarField& f, double c, double inf_f) {
  if (!(c > 0)) throw InvalidParams("normalize: c must be positive");
  ScalarField g = f;
  g.name = "normalized(" + (f.name.empty() ? "f" : f.name) + ")";
  const ScalarField base = f;
  g.value = [base, c, inf_f](const Vector& x) {
    return (base.value(x) - inf_f) / c;
  };
  if (f.analytic_gradient) {
    g.analytic_gradient = [base, c](const Vector& x) -> Vector {
      return base.analytic_gradient(x) / c;
    };
  }
  if (f.analytic_hessian) {
    g.analytic_hessian = [base, c](const Vector& x) -> Matrix {
      return base.analytic_hessian(x) / c;
    };
  }
  g.known_pl_constant = 1.0;
  g.known_inf = 0.0;
  return g;
}

}  // namespace pllab
