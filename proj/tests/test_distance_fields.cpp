#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "pllab/catalogue.hpp"
#include "pllab/distance_fields.hpp"
#include "pllab/errors.hpp"
#include "pllab/pl_certify.hpp"
#include "pllab/region.hpp"
#include "pllab/sampling.hpp"

using namespace pllab;

namespace {

Vector vec1(double a) { return Vector::Constant(1, a); }

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

ClosedSetRep unit_box2() { return BoxSet{vec2(0, 0), vec2(1, 1)}; }

ClosedSetRep unit_sphere2() { return SphereSet{vec2(0, 0), 1.0}; }

ClosedSetRep x_axis_line() {
  Matrix basis(2, 1);
  basis << 1, 0;
  return AffineSet{vec2(0, 0), basis};
}

ClosedSetRep triangle() {
  Matrix a(3, 2);
  a << -1, 0, 0, -1, 1, 1;
  Vector b(3);
  b << 0, 0, 1;
  return PolytopeSet{a, b, vec2(0.25, 0.25)};
}

std::vector<ClosedSetRep> all_variants() {
  return {ClosedSetRep(PointCloudSet{{vec2(0, 0), vec2(2, 0)}}),
          unit_box2(),
          unit_sphere2(),
          x_axis_line(),
          triangle(),
          ClosedSetRep(UnionSet{{unit_box2(), ClosedSetRep(PointCloudSet{{vec2(3, 3)}})}})};
}

}  // namespace

TEST_CASE("projections agree with geometry") {
  SUBCASE("sphere") {
    ProjectionResult p = project(unit_sphere2(), vec2(2, 0));
    CHECK(p.unique);
    CHECK(p.distance == doctest::Approx(1.0).epsilon(1e-14));
    CHECK((p.nearest[0] - vec2(1, 0)).norm() < 1e-14);

    // The center sees the whole shell: 8 representatives at distance 1.
    ProjectionResult c = project(unit_sphere2(), vec2(0, 0));
    CHECK(!c.unique);
    CHECK(c.distance == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(c.nearest.size() == 8);
    for (const Vector& y : c.nearest)
      CHECK(y.norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("box clamps coordinates") {
    ProjectionResult p = project(unit_box2(), vec2(2, 2));
    CHECK((p.nearest[0] - vec2(1, 1)).norm() < 1e-14);
    CHECK(p.distance == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    ProjectionResult inside = project(unit_box2(), vec2(0.3, 0.4));
    CHECK(inside.distance == 0.0);
    CHECK((inside.nearest[0] - vec2(0.3, 0.4)).norm() == 0.0);
  }
  SUBCASE("affine line drops the normal component") {
    ProjectionResult p = project(x_axis_line(), vec2(0.3, 0.7));
    CHECK((p.nearest[0] - vec2(0.3, 0)).norm() < 1e-14);
    CHECK(p.distance == doctest::Approx(0.7).epsilon(1e-14));
  }
  SUBCASE("polytope picks the active facet") {
    ProjectionResult p = project(triangle(), vec2(1, 1));
    CHECK((p.nearest[0] - vec2(0.5, 0.5)).norm() < 1e-12);
    CHECK(p.distance == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(project(triangle(), vec2(0.25, 0.25)).distance == 0.0);
  }
  SUBCASE("point cloud ties are reported") {
    ClosedSetRep cloud = PointCloudSet{{vec2(0, 0), vec2(2, 0)}};
    ProjectionResult near0 = project(cloud, vec2(0.9, 0));
    CHECK(near0.unique);
    CHECK((near0.nearest[0] - vec2(0, 0)).norm() < 1e-14);
    ProjectionResult tie = project(cloud, vec2(1, 0));
    CHECK(!tie.unique);
    CHECK(tie.nearest.size() == 2);
  }
  SUBCASE("union takes the closest member") {
    ClosedSetRep u = UnionSet{{unit_box2(), ClosedSetRep(PointCloudSet{{vec2(5, 0)}})}};
    CHECK((project(u, vec2(4.8, 0)).nearest[0] - vec2(5, 0)).norm() < 1e-12);
    CHECK((project(u, vec2(2, 0.5)).nearest[0] - vec2(1, 0.5)).norm() < 1e-12);
  }
}

TEST_CASE("projection is idempotent on every variant") {
  auto xs = sample_box(vec2(-3, -3), vec2(3, 3), 30, 4);
  for (const ClosedSetRep& set : all_variants()) {
    CAPTURE(set.variant_name());
    for (const Vector& x : xs) {
      ProjectionResult p = project(set, x);
      ProjectionResult pp = project(set, p.nearest[0]);
      CHECK(pp.distance < 1e-12);
      CHECK((pp.nearest[0] - p.nearest[0]).norm() < 1e-12);
    }
  }
}

TEST_CASE("projection onto a convex set is nonexpansive") {
  std::vector<ClosedSetRep> convex = {unit_box2(), x_axis_line(), triangle()};
  auto xs = sample_box(vec2(-3, -3), vec2(3, 3), 30, 6);
  for (const ClosedSetRep& set : convex) {
    CAPTURE(set.variant_name());
    CHECK(set.convex_certified());
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      Vector pa = project(set, xs[i]).nearest[0];
      Vector pb = project(set, xs[i + 1]).nearest[0];
      CHECK((pa - pb).norm() <= (xs[i] - xs[i + 1]).norm() * (1 + 1e-12));
    }
  }
  CHECK(!unit_sphere2().convex_certified());
  CHECK(!ClosedSetRep(PointCloudSet{{vec2(0, 0), vec2(2, 0)}}).convex_certified());
}

TEST_CASE("the half squared distance field matches known forms") {
  SUBCASE("1-d box reproduces the interval catalogue entry") {
    ScalarField via_set = dist_sq_field(BoxSet{vec1(0), vec1(1)});
    ScalarField direct = catalogue_half_sq_dist_interval(0, 1);
    for (const Vector& x : sample_box(vec1(-2), vec1(3), 100, 5))
      CHECK(eval(via_set, x) == doctest::Approx(eval(direct, x)).epsilon(1e-14));
    CHECK(via_set.known_pl_constant == 2.0);
    CHECK(via_set.known_inf == 0.0);
    CHECK(via_set.smoothness == Smoothness::C11);
  }
  SUBCASE("single point gives half the squared norm") {
    ScalarField f = dist_sq_field(PointCloudSet{{vec2(0, 0)}});
    CHECK(eval(f, vec2(3, 4)) == doctest::Approx(12.5).epsilon(1e-14));
    Vector g = grad(f, vec2(3, 4));
    CHECK((g - vec2(3, 4)).norm() < 1e-12);
  }
  SUBCASE("sphere carries the extra 1/2 against the catalogue field") {
    ScalarField half = dist_sq_field(unit_sphere2());
    ScalarField full = catalogue_sq_dist_sphere(vec2(0, 0), 1.0);
    for (const Vector& x : sample_box(vec2(-2, -2), vec2(2, 2), 50, 5)) {
      if (x.norm() < 1e-3) continue;
      CHECK(eval(half, x) == doctest::Approx(0.5 * eval(full, x)).epsilon(1e-13));
    }
    CHECK(half.smoothness == Smoothness::C0);
  }
  SUBCASE("the claimed constant 2 certifies on a unique-projection region") {
    ScalarField f = dist_sq_field(unit_box2());
    PLReport rep = check_pl_claim(f, Region(BoxRegion(vec2(2, 2), vec2(3, 3))),
                                  2.0, 100, 0.0, 1);
    CHECK(rep.pass);
    CHECK(rep.c_hat == doctest::Approx(2.0).epsilon(1e-9));
  }
}

TEST_CASE("gradient flow follows the closed-form projection curve") {
  SUBCASE("single point on the line") {
    FlowFormulaReport rep =
        flow_formula_check(PointCloudSet{{vec1(0)}}, vec1(2.0));
    CHECK(rep.pass);
    CHECK(rep.max_deviation <= 1e-6);
    CHECK(rep.reprojection_ok);
  }
  SUBCASE("affine line in the plane") {
    FlowFormulaReport rep = flow_formula_check(x_axis_line(), vec2(0.3, 0.7));
    CHECK(rep.pass);
    CHECK(rep.max_deviation <= 1e-6);
    CHECK(rep.max_reprojection_drift <= 1e-8);
  }
  SUBCASE("no unique projection, no formula") {
    CHECK_THROWS_AS(flow_formula_check(unit_sphere2(), vec2(0, 0)),
                    NonUniqueProjection);
  }
}

TEST_CASE("ray invariance separates convex from nonconvex") {
  RayInvarianceReport box = ray_invariance_check(unit_box2(), vec2(2, 2));
  CHECK(box.pass);
  CHECK(box.entries.size() == 7);
  for (const RayCheckEntry& e : box.entries) CHECK(e.ok);

  // From (0.5, 0) the ray through the projection (1, 0) crosses the center
  // at s = 2 (non-unique) and lands on the far side of the shell at s = 4.
  RayInvarianceReport sph = ray_invariance_check(unit_sphere2(), vec2(0.5, 0));
  CHECK(!sph.pass);
  REQUIRE(sph.first_failing_s.has_value());
  CHECK(*sph.first_failing_s == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("separation inner products certify nonconvexity") {
  std::vector<Vector> xs = {vec2(2, 2), vec2(-1, 0.5), vec2(0.5, -3)};
  SeparationReport box = separation_convexity_test(unit_box2(), xs, 20, 1);
  CHECK(box.consistent_with_convex);
  CHECK(box.n_pairs == 60);
  CHECK(box.max_inner <= 1e-12);
  CHECK(box.verdict == "consistent_with_convex");

  SeparationReport sph =
      separation_convexity_test(unit_sphere2(), {vec2(0.5, 0)}, 20, 1);
  CHECK(!sph.consistent_with_convex);
  REQUIRE(sph.witness.has_value());
  CHECK(sph.witness->inner >= 0.5);
  CHECK(sph.verdict == "nonconvex_witness");
}

TEST_CASE("regularity probes match the variant expectations") {
  SUBCASE("affine sets look C2") {
    RegularityReport rep =
        regularity_probe(x_axis_line(), {vec2(0.3, 0.7), vec2(-1.2, 0.4)});
    CHECK(rep.observed == RegularityLabel::C2_candidate);
    CHECK(rep.matches_expectation);
  }
  SUBCASE("boxes look C11 near a facet crossing") {
    RegularityReport rep = regularity_probe(
        unit_box2(), {vec2(1e-5, -0.5), vec2(-1e-3, -0.5), vec2(0.5, -0.5)});
    CHECK(rep.expected == RegularityLabel::C11_candidate);
    CHECK(rep.observed == RegularityLabel::C11_candidate);
    CHECK(rep.matches_expectation);
  }
  SUBCASE("the sphere is nonsmooth at the center") {
    RegularityReport rep =
        regularity_probe(unit_sphere2(), {vec2(0, 0), vec2(1.5, 0)});
    CHECK(rep.expected == RegularityLabel::nonsmooth);
    CHECK(rep.observed == RegularityLabel::nonsmooth);
    CHECK(rep.matches_expectation);
    CHECK(!rep.probes[0].unique_projection);
  }
}

TEST_CASE("set samples are members of the set") {
  for (const ClosedSetRep& set : all_variants()) {
    CAPTURE(set.variant_name());
    auto ys = sample_set(set, 24, 2);
    CHECK(ys.size() == 24);
    for (const Vector& y : ys) CHECK(project(set, y).distance < 1e-9);
  }
}

TEST_CASE("constructors validate their geometry") {
  CHECK_THROWS_AS(ClosedSetRep(PointCloudSet{{}}), InvalidParams);
  CHECK_THROWS_AS(ClosedSetRep(PointCloudSet{{vec1(0), vec2(0, 0)}}),
                  DimensionMismatch);
  CHECK_THROWS_AS(ClosedSetRep(BoxSet{vec2(1, 1), vec2(0, 0)}), InvalidParams);
  CHECK_THROWS_AS(ClosedSetRep(SphereSet{vec2(0, 0), -1.0}), InvalidParams);
  Matrix bad_basis(2, 1);
  bad_basis << 2, 0;
  CHECK_THROWS_AS(ClosedSetRep(AffineSet{vec2(0, 0), bad_basis}), InvalidParams);
  Matrix a(1, 2);
  a << 1, 0;
  CHECK_THROWS_AS(ClosedSetRep(PolytopeSet{a, vec1(0), vec2(1, 0)}),
                  InvalidParams);  // feasible point violates a x <= b
  CHECK_THROWS_AS(ClosedSetRep(UnionSet{{}}), InvalidParams);
}
