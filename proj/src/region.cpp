#include "pllab/region.hpp"

#include <algorithm>
#include <limits>

#include "pllab/errors.hpp"
#include "pllab/sampling.hpp"

namespace pllab {

BoxRegion::BoxRegion(Vector lo, Vector up) : lower(std::move(lo)), upper(std::move(up)) {
  if (lower.size() != upper.size() || lower.size() == 0)
    throw InvalidParams("box region: bad bounds");
  for (int i = 0; i < lower.size(); ++i)
    if (!(lower[i] < upper[i]))
      throw InvalidParams("box region: lower must be < upper componentwise");
}

BallRegion::BallRegion(Vector c, double r) : center(std::move(c)), radius(r) {
  if (center.size() == 0) throw InvalidParams("ball region: empty center");
  if (!(radius > 0)) throw InvalidParams("ball region: radius must be > 0");
}

SublevelRegion::SublevelRegion(double t, BoxRegion box)
    : threshold(t), bounding_box(std::move(box)) {}

int region_dim(const Region& r) {
  return std::visit(
      [](const auto& v) -> int {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, BoxRegion>)
          return static_cast<int>(v.lower.size());
        else if constexpr (std::is_same_v<T, BallRegion>)
          return static_cast<int>(v.center.size());
        else
          return static_cast<int>(v.bounding_box.lower.size());
      },
      r);
}

bool contains(const Region& r, const Vector& x, const ScalarField* f) {
  if (x.size() != region_dim(r)) return false;
  if (const auto* b = std::get_if<BoxRegion>(&r)) {
    for (int i = 0; i < x.size(); ++i)
      if (x[i] < b->lower[i] || x[i] > b->upper[i]) return false;
    return true;
  }
  if (const auto* b = std::get_if<BallRegion>(&r))
    return (x - b->center).norm() <= b->radius;
  const auto& s = std::get<SublevelRegion>(r);
  Region box = s.bounding_box;
  if (!contains(box, x)) return false;
  if (!f) throw InvalidParams("sublevel region membership needs the field");
  return eval(*f, x) <= s.threshold;
}

BoxRegion bounding_box(const Region& r) {
  if (const auto* b = std::get_if<BoxRegion>(&r)) return *b;
  if (const auto* b = std::get_if<BallRegion>(&r)) {
    Vector rad = Vector::Constant(b->center.size(), b->radius);
    return BoxRegion(b->center - rad, b->center + rad);
  }
  return std::get<SublevelRegion>(r).bounding_box;
}

double boundary_distance(const Region& r, const Vector& x, const ScalarField* f) {
  if (const auto* b = std::get_if<BoxRegion>(&r)) {
    double d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < x.size(); ++i)
      d = std::min({d, x[i] - b->lower[i], b->upper[i] - x[i]});
    return d;
  }
  if (const auto* b = std::get_if<BallRegion>(&r))
    return b->radius - (x - b->center).norm();
  const auto& s = std::get<SublevelRegion>(r);
  Region box = s.bounding_box;
  double d = boundary_distance(box, x);
  if (f) {
    const double gap = s.threshold - eval(*f, x);
    const double gn = std::max(grad(*f, x).norm(), 1e-8);
    d = std::min(d, gap / gn);
  }
  return d;
}

std::vector<Vector> sample_region(const Region& r, int n, std::uint64_t seed,
                                  const ScalarField* f) {
  if (n <= 0) return {};
  const BoxRegion box = bounding_box(r);
  if (std::holds_alternative<BoxRegion>(r))
    return sample_box(box.lower, box.upper, n, seed);

  LowDiscrepancySequence seq(static_cast<int>(box.lower.size()), seed);
  std::vector<Vector> out;
  out.reserve(n);
  const long max_attempts = 10000L * std::max(n, 1);
  for (long attempt = 0; attempt < max_attempts && static_cast<int>(out.size()) < n;
       ++attempt) {
    Vector u = seq.next();
    Vector x = box.lower + u.cwiseProduct(box.upper - box.lower);
    if (contains(r, x, f)) out.push_back(std::move(x));
  }
  if (static_cast<int>(out.size()) < n)
    throw Error("sample_region: acceptance rate too low, region nearly empty");
  return out;
}

}  // namespace pllab
