#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pllab/flow.hpp"
#include "pllab/scalar_field.hpp"
#include "pllab/types.hpp"

namespace pllab {

class ClosedSetRep;

// ---- closed-set representations with exact metric projection ---------------

struct PointCloudSet {
  std::vector<Vector> points;  // nonempty, equal dims
};

struct BoxSet {
  Vector lower, upper;  // lower <= upper componentwise
};

struct SphereSet {
  Vector center;
  double radius;  // > 0; the set is the shell, not the ball
};

struct AffineSet {
  Vector basepoint;
  Matrix basis;  // n x k, orthonormal columns (k = 0 degenerates to a point)
};

struct PolytopeSet {
  Matrix a;  // m x n rows of halfspaces a_i . x <= b_i
  Vector b;
  Vector feasible_point;  // certificate of nonemptiness
};

struct UnionSet {
  std::vector<ClosedSetRep> members;  // nonempty
};

class ClosedSetRep {
 public:
  using Variant =
      std::variant<PointCloudSet, BoxSet, SphereSet, AffineSet, PolytopeSet, UnionSet>;

  // Validating constructors; throw InvalidParams / DimensionMismatch.
  ClosedSetRep(PointCloudSet s);   // NOLINT(google-explicit-constructor)
  ClosedSetRep(BoxSet s);          // NOLINT
  ClosedSetRep(SphereSet s);       // NOLINT
  ClosedSetRep(AffineSet s);       // NOLINT
  ClosedSetRep(PolytopeSet s);     // NOLINT
  ClosedSetRep(UnionSet s);        // NOLINT

  const Variant& rep() const { return v_; }
  int dim() const { return dim_; }
  std::string variant_name() const;
  // True only when the variant guarantees convexity (box, affine, polytope,
  // one-point cloud, one-member unions of those).
  bool convex_certified() const;

 private:
  Variant v_;
  int dim_ = 0;
};

struct ProjectionResult {
  std::vector<Vector> nearest;  // >= 1 representatives, tie-merged at 1e-8
  double distance = 0.0;
  bool unique = true;
};

// Exact metric projection per variant (clamp / radial / affine / active-set
// search / min over members).  Ties within 1e-10*(1+distance) are collected;
// a sphere projected from its center returns 8 equispaced representatives.
ProjectionResult project(const ClosedSetRep& set, const Vector& x);

// Deterministic membership-exact samples of the set (used by the separation
// test): cloud points, box corners + interior, equispaced sphere directions,
// affine patches, projected polytope samples, round-robin unions.
std::vector<Vector> sample_set(const ClosedSetRep& set, int count,
                               std::uint64_t seed);

// d_F = (1/2) dist(., F)^2 as a ScalarField: gradient x - proj(x) on the
// unique-projection locus with FD fallback elsewhere; pl constant 2;
// smoothness C11 when convexity is certified, C0 otherwise.
ScalarField dist_sq_field(const ClosedSetRep& set);

// ---- checks -----------------------------------------------------------------

struct FlowFormulaReport {
  bool pass = true;
  double max_deviation = 0.0;  // vs proj(x) + e^{-t}(x - proj(x))
  bool reprojection_ok = true; // 10 checkpoints re-project onto proj(x)
  double max_reprojection_drift = 0.0;
  double t_final = 0.0;
  std::size_t n_steps = 0;
  double tolerance = 1e-6;
};

// Integrates the gradient flow of d_F from x and compares every accepted
// state with the closed-form solution.  Throws NonUniqueProjection when x
// has no unique nearest point.
FlowFormulaReport flow_formula_check(const ClosedSetRep& set, const Vector& x,
                                     const FlowConfig& cfg = {},
                                     double tolerance = 1e-6);

struct RayCheckEntry {
  double s = 0.0;
  bool ok = true;
  bool unique = true;
  double drift = 0.0;  // ||proj(z_s) - proj(x)||, min over representatives
};

struct RayInvarianceReport {
  bool pass = true;
  std::vector<RayCheckEntry> entries;
  std::optional<double> first_failing_s;
};

// proj(proj(x) + s (x - proj(x))) must stay proj(x) for every s >= 0 when F
// is convex; failures localize nonconvexity.
RayInvarianceReport ray_invariance_check(
    const ClosedSetRep& set, const Vector& x,
    const std::vector<double>& s_grid = {0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0});

struct SeparationWitness {
  Vector x, y, x_inf;
  double inner = 0.0;
};

struct SeparationReport {
  bool consistent_with_convex = true;
  int n_pairs = 0;
  int n_skipped_x = 0;  // non-unique projection or x too close to F
  double max_inner = 0.0;
  std::optional<SeparationWitness> witness;  // max-inner violating pair
  std::string verdict;  // "consistent_with_convex" | "nonconvex_witness"
};

// Tests <x - x_inf, y - x_inf> <= tol for y in F; any violation certifies
// nonconvexity of F.
SeparationReport separation_convexity_test(const ClosedSetRep& set,
                                           const std::vector<Vector>& x_samples,
                                           int y_samples_per_x,
                                           std::uint64_t seed = 0);

enum class RegularityLabel { C2_candidate, C11_candidate, nonsmooth };

std::string to_string(RegularityLabel label);

struct RegularityProbePoint {
  Vector x;
  bool skipped = false;        // inside / too close to F
  bool unique_projection = true;
  std::vector<double> h_grid;
  std::vector<Matrix> fd_hessians;  // one per h
  Matrix hessian_at_finest;         // convenience copy of the last entry
  bool stabilized = false;          // agreement of the two finest h
  bool gradient_jump = false;       // second difference spike ~ jump/h
  bool unbounded_tail = false;      // |H| grows as h shrinks
  RegularityLabel label = RegularityLabel::C2_candidate;
};

struct RegularityReport {
  std::vector<RegularityProbePoint> probes;
  RegularityLabel observed = RegularityLabel::C2_candidate;
  RegularityLabel expected = RegularityLabel::nonsmooth;  // from the variant
  bool matches_expectation = true;
};

// FD-Hessian stabilization probe of d_F over a shrinking step grid.
// Expected labels: affine (or single point) -> C2, certified convex -> C11,
// otherwise nonsmooth somewhere.
RegularityReport regularity_probe(
    const ClosedSetRep& set, const std::vector<Vector>& probe_points,
    const std::vector<double>& h_grid = {1e-2, 1e-3, 1e-4});

}  // namespace pllab
