#pragma once

#include <cstdint>
#include <vector>

#include "pllab/types.hpp"

namespace pllab {

// Deterministic low-discrepancy sequence on [0,1)^dim: additive recurrence
// with the generalized golden ratio per coordinate, shifted by a seeded
// offset.  Same (dim, seed) always reproduces the same stream.
class LowDiscrepancySequence {
 public:
  LowDiscrepancySequence(int dim, std::uint64_t seed);

  // Next point of the stream, in [0,1)^dim.
  Vector next();

  int dim() const { return dim_; }

 private:
  int dim_;
  Vector alpha_;  // irrational increments
  Vector state_;  // current fractional position
};

// First n points on a unit-cube stream, mapped affinely into [lower, upper].
std::vector<Vector> sample_box(const Vector& lower, const Vector& upper, int n,
                               std::uint64_t seed);

// Deterministic near-uniform directions on the unit sphere S^{dim-1}.
// For dim == 2: equispaced angles starting at +e1 (axes included whenever
// count is a multiple of 4).  Higher dimensions: signed axes first, then
// normalized low-discrepancy cube points.
std::vector<Vector> sphere_directions(int dim, int count, std::uint64_t seed);

}  // namespace pllab
