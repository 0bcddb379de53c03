#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "pllab/catalogue.hpp"
#include "pllab/errors.hpp"
#include "pllab/region.hpp"
#include "pllab/sampling.hpp"
#include "pllab/scalar_field.hpp"

using namespace pllab;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Vector vec1(double a) { return Vector::Constant(1, a); }

}  // namespace

TEST_CASE("quadratic_psd evaluation and derivatives") {
  // x^T q x with q = I/2 is ||x||^2 / 2.
  ScalarField f = catalogue_quadratic_psd(0.5 * Matrix::Identity(2, 2));
  CHECK(f.dim == 2);
  CHECK(eval(f, vec2(1, 2)) == doctest::Approx(2.5).epsilon(1e-14));
  Vector g = grad(f, vec2(1, 2));
  CHECK((g - vec2(1, 2)).norm() < 1e-12);
  Matrix h = hessian(f, vec2(1, 2));
  CHECK((h - Matrix::Identity(2, 2)).norm() < 1e-12);

  CHECK(f.known_inf == 0.0);
  // |grad|^2 = ||2 q x||^2 >= 4 lambda_min (x^T q x): constant 4 * 0.5 here.
  REQUIRE(f.known_pl_constant.has_value());
  CHECK(*f.known_pl_constant == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f.smoothness == Smoothness::C_inf);
}

TEST_CASE("quadratic_psd constant is 4 for the identity") {
  ScalarField f = catalogue_quadratic_psd(Matrix::Identity(3, 3));
  REQUIRE(f.known_pl_constant.has_value());
  CHECK(*f.known_pl_constant == doctest::Approx(4.0).epsilon(1e-12));

  // Rank-deficient q keeps the smallest positive eigenvalue.
  Matrix q = Matrix::Zero(2, 2);
  q(1, 1) = 1.0;
  ScalarField fr = catalogue_quadratic_psd(q);
  REQUIRE(fr.known_pl_constant.has_value());
  CHECK(*fr.known_pl_constant == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("quadratic_psd rejects indefinite matrices") {
  Matrix q = Matrix::Identity(2, 2);
  q(0, 0) = -1.0;
  CHECK_THROWS_AS(catalogue_quadratic_psd(q), InvalidParams);
}

TEST_CASE("interval field values, kinks, hessian") {
  ScalarField f = catalogue_half_sq_dist_interval(0.0, 1.0);
  CHECK(eval(f, vec1(2.0)) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(grad(f, vec1(2.0))[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eval(f, vec1(0.5)) == 0.0);
  CHECK(hessian(f, vec1(0.5))(0, 0) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(hessian(f, vec1(-1.0))(0, 0) == doctest::Approx(1.0).epsilon(1e-9));

  CHECK(f.smoothness == Smoothness::C11);
  REQUIRE(f.nonsmooth_points.size() == 2);
  CHECK(nonsmooth_distance(f, vec1(0.25)) == doctest::Approx(0.25));
}

TEST_CASE("graph residual of sin: values and hessian at a minimizer") {
  ScalarField f = catalogue_graph_residual(sin_field());
  CHECK(f.dim == 2);
  CHECK(eval(f, vec2(0, 1)) == doctest::Approx(1.0).epsilon(1e-14));

  // H(0,0) = [[2,-2],[-2,2]]: eigenvalues 0 and 4, kernel along the graph.
  Matrix h = hessian(f, vec2(0, 0));
  Matrix expect(2, 2);
  expect << 2, -2, -2, 2;
  CHECK((h - expect).norm() < 1e-9);

  REQUIRE(f.known_pl_constant.has_value());
  CHECK(*f.known_pl_constant == doctest::Approx(4.0));
  CHECK(f.known_inf == 0.0);
}

TEST_CASE("cylinder lift ignores the appended coordinates") {
  ScalarField inner = catalogue_quadratic_psd(0.5 * Matrix::Identity(1, 1));
  ScalarField f = catalogue_cylinder_lift(inner, 2);
  CHECK(f.dim == 3);
  Vector x(3);
  x << 1.5, 7.0, -3.0;
  CHECK(eval(f, x) == doctest::Approx(eval(inner, vec1(1.5))).epsilon(1e-14));
  Vector g = grad(f, x);
  CHECK(g[0] == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(std::abs(g[1]) < 1e-12);
  CHECK(std::abs(g[2]) < 1e-12);
  CHECK(f.known_pl_constant == inner.known_pl_constant);
  CHECK(f.known_inf == inner.known_inf);
}

TEST_CASE("sphere squared distance carries no 1/2 factor") {
  ScalarField f = catalogue_sq_dist_sphere(vec2(0, 0), 1.0);
  CHECK(eval(f, vec2(2, 0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(eval(f, vec2(0.5, 0)) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(f.smoothness == Smoothness::C0);
  // Nonsmooth exactly at the center.
  CHECK(nonsmooth_distance(f, vec2(0.5, 0)) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("finite differences track analytic oracles on the catalogue") {
  // 200 deterministic points per field, relative deviation below 1e-4;
  // points near a declared kink are excluded by validate_derivatives.
  struct Fixture {
    ScalarField f;
    Vector lo, hi;
  };
  std::vector<Fixture> fixtures;
  fixtures.push_back({catalogue_quadratic_psd(Matrix::Identity(2, 2)),
                      vec2(-2, -2), vec2(2, 2)});
  fixtures.push_back({catalogue_half_sq_dist_interval(0, 1), vec1(-2), vec1(3)});
  fixtures.push_back({catalogue_graph_residual(sin_field()), vec2(-2, -2),
                      vec2(2, 2)});
  fixtures.push_back({catalogue_sq_dist_sphere(vec2(0, 0), 1.0), vec2(-2, -2),
                      vec2(2, 2)});
  fixtures.push_back({catalogue_cylinder_lift(
                          catalogue_half_sq_dist_interval(0, 1), 1),
                      vec2(-2, -2), vec2(2, 2)});
  for (const Fixture& fx : fixtures) {
    CAPTURE(fx.f.name);
    auto pts = sample_box(fx.lo, fx.hi, 200, 11);
    DerivativeValidation v = validate_derivatives(fx.f, pts);
    CHECK(v.pass);
    CHECK(v.n_checked + v.n_excluded == 200);
    CHECK(v.max_grad_deviation < 1e-4);
  }
}

TEST_CASE("validate_derivatives excludes points near the kink") {
  ScalarField f = catalogue_half_sq_dist_interval(0, 1);
  std::vector<Vector> pts = {vec1(1.0 + 1e-7), vec1(2.0)};
  DerivativeValidation v = validate_derivatives(f, pts);
  CHECK(v.n_excluded == 1);
  CHECK(v.n_checked == 1);
  CHECK(v.pass);
}

TEST_CASE("validate_derivatives needs at least one oracle") {
  ScalarField f;
  f.dim = 1;
  f.value = [](const Vector& x) { return x[0] * x[0]; };
  CHECK_THROWS_AS(validate_derivatives(f, {vec1(1.0)}), NoAnalyticDerivative);
}

TEST_CASE("fd fallback approximates a known gradient") {
  ScalarField f;
  f.dim = 2;
  f.value = [](const Vector& x) { return std::sin(x[0]) + x[1] * x[1]; };
  Vector g = grad(f, vec2(0.3, -0.7));
  CHECK(g[0] == doctest::Approx(std::cos(0.3)).epsilon(1e-8));
  CHECK(g[1] == doctest::Approx(-1.4).epsilon(1e-8));
  Matrix h = hessian(f, vec2(0.3, -0.7));
  CHECK(h(0, 0) == doctest::Approx(-std::sin(0.3)).epsilon(1e-5));
  CHECK(h(1, 1) == doctest::Approx(2.0).epsilon(1e-5));
  CHECK(h(0, 1) == h(1, 0));  // symmetrized
}

TEST_CASE("eval guards dimensions and finiteness") {
  ScalarField f = catalogue_quadratic_psd(Matrix::Identity(2, 2));
  CHECK_THROWS_AS(eval(f, vec1(1.0)), DimensionMismatch);
  CHECK_THROWS_AS(grad(f, Vector::Zero(3)), DimensionMismatch);

  ScalarField bad;
  bad.dim = 1;
  bad.value = [](const Vector&) { return std::numeric_limits<double>::quiet_NaN(); };
  CHECK_THROWS_AS(eval(bad, vec1(0.0)), NonFiniteValue);
}

TEST_CASE("scale and translate update metadata") {
  ScalarField f = catalogue_quadratic_psd(0.5 * Matrix::Identity(1, 1));
  ScalarField f3 = scale(f, 3.0);
  CHECK(eval(f3, vec1(2.0)) == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(*f3.known_pl_constant == doctest::Approx(6.0));
  CHECK(*f3.known_inf == 0.0);

  ScalarField ft = translate(f, vec1(1.0));
  CHECK(eval(ft, vec1(1.0)) == doctest::Approx(0.0));
  CHECK(eval(ft, vec1(3.0)) == doctest::Approx(eval(f, vec1(2.0))));
  CHECK(*ft.known_pl_constant == *f.known_pl_constant);
}

TEST_CASE("low discrepancy sampling is deterministic") {
  auto a = sample_box(vec2(-1, -1), vec2(1, 1), 50, 7);
  auto b = sample_box(vec2(-1, -1), vec2(1, 1), 50, 7);
  auto c = sample_box(vec2(-1, -1), vec2(1, 1), 50, 8);
  REQUIRE(a.size() == 50);
  double max_same = 0.0, max_other = 0.0;
  for (int i = 0; i < 50; ++i) {
    max_same = std::max(max_same, (a[i] - b[i]).norm());
    max_other = std::max(max_other, (a[i] - c[i]).norm());
    CHECK(a[i][0] >= -1.0);
    CHECK(a[i][0] < 1.0);
  }
  CHECK(max_same == 0.0);
  CHECK(max_other > 1e-6);
}

TEST_CASE("sphere directions hit the axes when count is a multiple of 4") {
  auto dirs = sphere_directions(2, 4, 0);
  REQUIRE(dirs.size() == 4);
  CHECK((dirs[0] - vec2(1, 0)).norm() < 1e-15);
  CHECK((dirs[1] - vec2(0, 1)).norm() < 1e-15);
  CHECK((dirs[2] - vec2(-1, 0)).norm() < 1e-15);
  CHECK((dirs[3] - vec2(0, -1)).norm() < 1e-15);
  for (const Vector& d : sphere_directions(3, 20, 1))
    CHECK(d.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("regions: membership, boxes, boundary distance") {
  BoxRegion box(vec2(-1, -1), vec2(1, 1));
  Region rb = box;
  CHECK(contains(rb, vec2(0, 0)));
  CHECK(!contains(rb, vec2(0, 2)));
  CHECK(boundary_distance(rb, vec2(0.5, 0)) == doctest::Approx(0.5));

  Region ball = BallRegion(vec2(1, 1), 2.0);
  BoxRegion bb = bounding_box(ball);
  CHECK((bb.lower - vec2(-1, -1)).norm() < 1e-14);
  CHECK((bb.upper - vec2(3, 3)).norm() < 1e-14);
  CHECK(contains(ball, vec2(2, 2)));
  CHECK(!contains(ball, vec2(3.1, 1)));

  ScalarField f = catalogue_quadratic_psd(Matrix::Identity(2, 2));
  Region sub = SublevelRegion(1.0, BoxRegion(vec2(-2, -2), vec2(2, 2)));
  CHECK(contains(sub, vec2(0.5, 0.5), &f));
  CHECK(!contains(sub, vec2(1, 1), &f));

  CHECK_THROWS_AS(BoxRegion(vec2(1, 1), vec2(0, 0)), InvalidParams);
  CHECK_THROWS_AS(BallRegion(vec2(0, 0), -1.0), InvalidParams);
}

TEST_CASE("sample_region stays inside all region kinds") {
  ScalarField f = catalogue_quadratic_psd(Matrix::Identity(2, 2));
  Region rb = BoxRegion(vec2(-1, 0), vec2(2, 1));
  Region ball = BallRegion(vec2(0, 0), 1.5);
  Region sub = SublevelRegion(1.0, BoxRegion(vec2(-2, -2), vec2(2, 2)));
  for (const Vector& x : sample_region(rb, 40, 3)) CHECK(contains(rb, x));
  for (const Vector& x : sample_region(ball, 40, 3)) CHECK(contains(ball, x));
  for (const Vector& x : sample_region(sub, 40, 3, &f)) CHECK(contains(sub, x, &f));
}

TEST_CASE("catalogue listing is complete and ordered") {
  auto listing = catalogue_listing();
  REQUIRE(listing.size() == 6);
  CHECK(listing[0].name == "quadratic_psd");
  CHECK(listing[1].name == "half_sq_dist_interval");
  bool found_sphere = false;
  for (const auto& e : listing)
    if (e.name == "sq_dist_sphere") found_sphere = true;
  CHECK(found_sphere);
}
