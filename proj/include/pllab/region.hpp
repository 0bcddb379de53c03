#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "pllab/scalar_field.hpp"
#include "pllab/types.hpp"

namespace pllab {

// Axis-aligned box, lower < upper componentwise.
struct BoxRegion {
  Vector lower, upper;
  BoxRegion(Vector lo, Vector up);
};

struct BallRegion {
  Vector center;
  double radius;
  BallRegion(Vector c, double r);
};

// {x in bounding_box : f(x) <= threshold}.  Always carries a bounding box so
// sampling and interior checks stay well defined.
struct SublevelRegion {
  double threshold;
  BoxRegion bounding_box;
  SublevelRegion(double t, BoxRegion box);
};

using Region = std::variant<BoxRegion, BallRegion, SublevelRegion>;

int region_dim(const Region& r);

// Membership; sublevel regions need the field.
bool contains(const Region& r, const Vector& x, const ScalarField* f = nullptr);

// Enclosing axis-aligned box (the box itself / circumscribed / the carried box).
BoxRegion bounding_box(const Region& r);

// Conservative distance from an interior point to the region boundary.
// For sublevel regions: min of the box term and a first-order estimate
// (threshold - f(x)) / max(||grad f(x)||, 1e-8).
double boundary_distance(const Region& r, const Vector& x,
                         const ScalarField* f = nullptr);

// n deterministic low-discrepancy samples inside the region (rejection from
// the bounding box for ball/sublevel).  Throws Error when acceptance is so
// poor the region is effectively empty.
std::vector<Vector> sample_region(const Region& r, int n, std::uint64_t seed,
                                  const ScalarField* f = nullptr);

}  // namespace pllab
