#pragma once

// Analysis of the minimizing set: multistart location of minimizers through
// the gradient flow, Hessian spectral gap and constant-rank checks, kernel
// chart probes (injectivity of the kernel projection and the o(t^2) tangency
// of f along kernel directions), and the assembled CriticalSetModel with the
// singleton verdict.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pllab/flow.hpp"
#include "pllab/region.hpp"
#include "pllab/scalar_field.hpp"
#include "pllab/types.hpp"

namespace pllab {

// Runs flow_limit from n_starts low-discrepancy starts in the region, keeps
// converged terminals whose f-gap against the best found (or known) infimum
// is below 1e-12*(1+|inf|), and deduplicates at dedup_radius (first wins).
// Throws NoMinimizerFound when no start converges to a minimizer.
std::vector<Vector> locate_minimizers(const ScalarField& f, const Region& region,
                                      int n_starts, const FlowConfig& cfg,
                                      double dedup_radius = 1e-5,
                                      std::uint64_t seed = 0);

struct GapViolation {
  Vector point;
  double eigenvalue = 0.0;
};

struct HessianGapReport {
  double c_used = 0.0;
  double tol_psd = 0.0;   // eigenvalues must exceed -tol_psd
  double tol_zero = 0.0;  // "zero" band upper edge (c/4)
  double epsilon = 1e-6;  // forbidden interval is (tol_zero, c/2*(1-epsilon))
  std::vector<Vector> spectra;  // per point, ascending
  bool gap_ok = true;
  std::optional<GapViolation> violation;
};

// At every supplied minimizer: eigenvalues must be > -tol_psd and must avoid
// the interval (c/4, c/2*(1-epsilon)).
HessianGapReport hessian_gap_check(const ScalarField& f,
                                   const std::vector<Vector>& k_points,
                                   double c);

struct ConstantRankReport {
  double threshold = 0.0;  // eigenvalue cutoff, c/4 unless overridden
  std::vector<int> ranks;
  bool constant_rank = false;
  std::optional<int> common_rank;
};

// Rank = number of eigenvalues >= threshold (default c/4) at each point;
// constant_rank iff all ranks agree.
ConstantRankReport constant_rank_check(const ScalarField& f,
                                       const std::vector<Vector>& k_points,
                                       double c, double threshold = -1.0);

struct TangencyProbe {
  Vector direction;         // kernel basis vector u
  std::vector<double> ts;   // probe offsets t0, t0/2, ..., t0/2^7
  std::vector<double> gaps; // f(x + t u) - inf
  int n_fit = 0;            // points entering the log-log fit
  double slope = 0.0;       // fitted d log gap / d log t
  bool pass = false;        // slope > slope_threshold
};

struct KernelChartReport {
  Vector x;
  double r_requested = 0.0;
  double r_used = 0.0;  // shrunk until the Hessian moves by < c/4 in B(x,r)
  int kernel_dim = 0;
  // Injectivity of the kernel projection over minimizer pairs inside each ball.
  bool injective_at_r_used = true;
  bool injective_at_r_requested = true;
  double min_projected_separation = 0.0;  // over pairs within r_requested
  std::vector<TangencyProbe> tangency;
  bool tangency_ok = true;
  double slope_threshold = 2.3;
  bool pass = false;  // injective at r_used and all tangency probes pass
};

// Probes the chart structure at x (a located minimizer): finds r <= r_request
// with sampled Hessian variation below c/4, projects nearby minimizers onto
// the kernel of H(x) and checks injectivity (separation >= dedup_radius), and
// fits the log-log slope of f along each kernel direction (o(t^2) test,
// t0 = 1e-2 halved seven times).  Throws RadiusNotFound when no admissible
// radius above 1e-6 exists and KernelEmpty when H(x) has full rank.
KernelChartReport kernel_chart_probe(const ScalarField& f, const Vector& x,
                                     const std::vector<Vector>& k_points,
                                     double r, double c,
                                     double dedup_radius = 1e-5);

struct CriticalSetModel {
  std::vector<Vector> points;
  std::vector<Vector> eigenvalues;  // per point, ascending
  std::vector<int> ranks;
  std::vector<std::vector<int>> components;  // partition of point indices
  std::optional<int> manifold_dim;  // n - common rank, when constant_rank
  bool constant_rank = false;
  bool singleton = false;
  bool gap_ok = false;

  double c_used = 0.0;
  double inf_f_used = 0.0;
  double dedup_radius_used = 0.0;
  double r_link_used = 0.0;
  bool pl_claim_ok = false;        // sampled PL claim on the region
  bool bounded_in_region = false;  // all points far from the region boundary
  // Nonempty when a C2 field with a certified claim and bounded located set
  // still fails the singleton verdict.
  std::string tension;
  std::vector<std::string> caveats;
};

// Composes locate + spectra + gap + rank + single-linkage components.
// r_link <= 0 selects the default 3x median nearest-neighbor distance
// (floor 1e-4).  singleton = one component of diameter < 10*dedup_radius.
CriticalSetModel build_model(const ScalarField& f, const Region& region,
                             double c, int n_starts, const FlowConfig& cfg,
                             double r_link = -1.0);

}  // namespace pllab
