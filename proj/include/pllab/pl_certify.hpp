#pragma once

// Sampled certification of the inequality |grad f|^2 >= C (f - inf f) over a
// region, the quadratic-growth consequence with the corrected factor C/4, and
// the normalization (f - inf f)/C.  All estimates use the deterministic
// low-discrepancy sampler, so reports are reproducible given the seed.

#include <cstdint>
#include <optional>

#include "pllab/region.hpp"
#include "pllab/scalar_field.hpp"
#include "pllab/types.hpp"

namespace pllab {

struct PLViolation {
  Vector point;
  double ratio = 0.0;  // |grad f|^2 / (f - inf_f) at the point
};

struct PLReport {
  Region region;
  double inf_f_used = 0.0;
  // Empirical upper bound on the best constant for the region: the minimum
  // sampled ratio.  Finite sampling can only overestimate the true C.
  double c_hat = 0.0;
  int n_samples = 0;
  int n_skipped = 0;  // points with f-gap below eps_gap (inside argmin)
  std::optional<double> c_claimed{};
  std::optional<PLViolation> violation{};  // worst sample when a claim fails
  bool pass = true;
  double epsilon = 1e-6;  // claim slack: require ratio >= C*(1-epsilon)
  std::uint64_t sampler_seed = 0;
};

// Minimum of |grad f|^2/(f-inf_f) over n_samples low-discrepancy points of
// the region, skipping near-argmin points (gap < 1e-12*(1+|inf_f|)).
// Throws AllPointsSkipped when every sample is skipped and InfBelowSamples
// when some f(x) < inf_f - 1e-12*(1+|inf_f|).
PLReport estimate_pl_constant(const ScalarField& f, const Region& region,
                              int n_samples, double inf_f, std::uint64_t seed);

// Same sweep; pass iff every sampled ratio >= c_claimed*(1-epsilon).
PLReport check_pl_claim(const ScalarField& f, const Region& region,
                        double c_claimed, int n_samples, double inf_f,
                        std::uint64_t seed, double epsilon = 1e-6);

struct GrowthViolation {
  Vector point;
  double ratio = 0.0;  // (f-inf)/((c/4) dist^2)
};

struct GrowthReport {
  double c_used = 0.0;
  double factor = 0.0;  // c/4, the certified growth constant
  double inf_f_used = 0.0;
  int n_samples = 0;
  int n_skipped = 0;  // samples on the argmin model itself
  int n_argmin_points = 0;
  // Spacing of the argmin model (median nearest-neighbor distance, 0 for a
  // single point): distances to a sparse model overestimate the true
  // distance, so the check is meaningful only when this is small.
  double argmin_sample_spacing = 0.0;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double epsilon = 1e-3;  // pass iff min_ratio >= 1 - epsilon
  std::optional<GrowthViolation> violation;
  bool pass = true;
  std::uint64_t sampler_seed = 0;
};

// Verifies f(x) - inf >= (c/4) * dist(x, argmin_points)^2 * (1 - epsilon) at
// sampled points, where inf is the minimum of f over argmin_points.  Each
// argmin point must sit within 1e-10 of that minimum.  Throws
// EmptyArgminModel when argmin_points is empty.
GrowthReport quadratic_growth_check(const ScalarField& f, const Region& region,
                                    double c,
                                    const std::vector<Vector>& argmin_points,
                                    int n_samples, std::uint64_t seed,
                                    double epsilon = 1e-3);

// g = (f - inf_f)/c: if f satisfies the inequality with constant c, g
// satisfies it with constant 1 (|grad g|^2 = |grad f|^2/c^2 >= g).  Metadata
// is updated to known_pl_constant = 1, known_inf = 0.
ScalarField normalize(const ScalarField& f, double c, double inf_f);

}  // namespace pllab
