#include "pllab/sampling.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "pllab/errors.hpp"

namespace pllab {
namespace {

// Unique positive root of x^(d+1) = x + 1 (d=1 gives the golden ratio).
double generalized_golden(int d) {
  double x = 1.5;
  for (int i = 0; i < 64; ++i) x = std::pow(1.0 + x, 1.0 / (d + 1));
  return x;
}

double frac(double v) { return v - std::floor(v); }

}  // namespace

LowDiscrepancySequence::LowDiscrepancySequence(int dim, std::uint64_t seed)
    : dim_(dim), alpha_(dim), state_(dim) {
  if (dim < 1) throw InvalidParams("sampler dimension must be >= 1");
  const double g = generalized_golden(dim);
  double p = 1.0;
  for (int i = 0; i < dim; ++i) {
    p /= g;
    alpha_[i] = p;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int i = 0; i < dim; ++i) state_[i] = uni(rng);
}

Vector LowDiscrepancySequence::next() {
  Vector out = state_;
  for (int i = 0; i < dim_; ++i) state_[i] = frac(state_[i] + alpha_[i]);
  return out;
}

std::vector<Vector> sample_box(const Vector& lower, const Vector& upper, int n,
                               std::uint64_t seed) {
  if (lower.size() != upper.size())
    throw DimensionMismatch("sample_box: lower/upper dimension mismatch");
  LowDiscrepancySequence seq(static_cast<int>(lower.size()), seed);
  std::vector<Vector> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) {
    Vector u = seq.next();
    out.push_back(lower + u.cwiseProduct(upper - lower));
  }
  return out;
}

std::vector<Vector> sphere_directions(int dim, int count, std::uint64_t seed) {
  std::vector<Vector> dirs;
  dirs.reserve(count);
  if (dim == 1) {
    for (int k = 0; k < count; ++k) {
      Vector d(1);
      d[0] = (k % 2 == 0) ? 1.0 : -1.0;
      dirs.push_back(d);
    }
    return dirs;
  }
  if (dim == 2) {
    // Axis directions first, then an equispaced fan covering the circle.
    for (int k = 0; k < count; ++k) {
      const double theta = 2.0 * std::numbers::pi * k / count;
      Vector d(2);
      d << std::cos(theta), std::sin(theta);
      dirs.push_back(d);
    }
    return dirs;
  }
  LowDiscrepancySequence seq(dim, seed);
  int axis = 0;
  while (static_cast<int>(dirs.size()) < count) {
    if (axis < 2 * dim) {
      Vector d = Vector::Zero(dim);
      d[axis / 2] = (axis % 2 == 0) ? 1.0 : -1.0;
      dirs.push_back(d);
      ++axis;
      continue;
    }
    Vector u = 2.0 * seq.next() - Vector::Ones(dim);
    const double nrm = u.norm();
    if (nrm < 1e-8) continue;
    dirs.push_back(u / nrm);
  }
  return dirs;
}

}  // namespace pllab
