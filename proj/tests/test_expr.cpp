#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "pllab/catalogue.hpp"
#include "pllab/errors.hpp"
#include "pllab/expr.hpp"
#include "pllab/sampling.hpp"

using namespace pllab;

namespace {

double ev(const std::string& src, int dim, const Vector& x) {
  return eval_ast(*parse(src, dim), x);
}

double ev1(const std::string& src, double x) {
  return ev(src, 1, Vector::Constant(1, x));
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("basic evaluation") {
  CHECK(ev("x1^2 + sin(x2)", 2, vec2(2, 0)) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(ev1("-x1*x1", 3) == doctest::Approx(-9.0).epsilon(1e-14));
  CHECK(ev1("0", 0.5) == 0.0);
  CHECK(ev1("exp(x1)", 1) == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
  CHECK(ev1("sqrt(abs(x1))", -4) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("precedence and associativity") {
  Vector z = Vector::Zero(1);
  // ^ is right-associative and binds tighter than unary minus.
  CHECK(ev("2^3^2", 1, z) == doctest::Approx(512.0).epsilon(1e-14));
  CHECK(ev("-2^2", 1, z) == doctest::Approx(-4.0).epsilon(1e-14));
  CHECK(ev("2^-2", 1, z) == doctest::Approx(0.25).epsilon(1e-14));
  // + - and * / are left-associative.
  CHECK(ev("2-3-4", 1, z) == doctest::Approx(-5.0).epsilon(1e-14));
  CHECK(ev("6/3/2", 1, z) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ev("1+2*3", 1, z) == doctest::Approx(7.0).epsilon(1e-14));
  CHECK(ev("(1+2)*3", 1, z) == doctest::Approx(9.0).epsilon(1e-14));
  CHECK(ev("2*3^2", 1, z) == doctest::Approx(18.0).epsilon(1e-14));
}

TEST_CASE("parse errors carry a position inside the source") {
  auto check_pos = [](const std::string& src, int dim) {
    try {
      parse(src, dim);
      FAIL("expected a parse error for: " << src);
    } catch (const SyntaxError& e) {
      CHECK(e.position <= src.size());
    }
  };
  check_pos("x1 +", 1);
  check_pos("", 1);
  check_pos("(1", 1);
  check_pos("1 2", 1);
  check_pos("sin()", 1);
  check_pos("x0", 1);
  check_pos("y1", 1);

  CHECK_THROWS_AS(parse("x0", 1), VariableOutOfRange);
  CHECK_THROWS_AS(parse("x2", 1), VariableOutOfRange);
  CHECK_THROWS_AS(parse("y1", 1), UnknownIdentifier);
  CHECK_THROWS_AS(parse("tanh(x1)", 1), UnknownIdentifier);
  CHECK_THROWS_AS(parse("x1 +", 1), SyntaxError);
}

TEST_CASE("to_text round trips structurally") {
  std::vector<std::string> sources = {
      "x1^2 + sin(x2)", "-x1*x1",      "-2^2",
      "2^-2",           "1/(x1+3)",    "sqrt(abs(x1))",
      "-(x1+1)",        "x1 - -2",     "x1*(x2-4)^3",
      "cos(x1)^2 + sin(x1)^2",         "-0.5",
  };
  for (const std::string& src : sources) {
    CAPTURE(src);
    ExprPtr a = parse(src, 2);
    std::string text = to_text(*a);
    ExprPtr b = parse(text, 2);
    CHECK(structurally_equal(*a, *b));
    // The rendering is stable under a second round trip.
    CHECK(to_text(*b) == text);
  }
}

TEST_CASE("structural equality distinguishes operand order") {
  CHECK(structurally_equal(*parse("x1+x2", 2), *parse("x1+x2", 2)));
  CHECK(!structurally_equal(*parse("x1+1", 1), *parse("1+x1", 1)));
  // Values still agree where the operation commutes.
  for (const Vector& x : sample_box(vec2(-2, -2), vec2(2, 2), 20, 5))
    CHECK(ev("x1+x2", 2, x) == doctest::Approx(ev("x2+x1", 2, x)).epsilon(1e-15));
}

TEST_CASE("negative literals fold and round trip") {
  ExprPtr a = parse("-2", 1);
  REQUIRE(std::holds_alternative<ConstantNode>(a->node));
  CHECK(std::get<ConstantNode>(a->node).value == -2.0);
  CHECK(structurally_equal(*a, *parse(to_text(*a), 1)));
}

TEST_CASE("compile wraps the ast as a field") {
  ScalarField f = compile("x1^2", 1);
  CHECK(f.dim == 1);
  CHECK(eval(f, Vector::Constant(1, 3.0)) == doctest::Approx(9.0).epsilon(1e-14));
  // No analytic oracles: gradient comes from finite differences.
  CHECK(grad(f, Vector::Constant(1, 1.0))[0] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(f.smoothness == Smoothness::C_inf);

  // abs / sqrt / log demote the smoothness tag to C0.
  CHECK(compile("abs(x1)", 1).smoothness == Smoothness::C0);
  CHECK(compile("sqrt(x1^2+1)", 1).smoothness == Smoothness::C0);
  CHECK(compile("log(x1^2+1)", 1).smoothness == Smoothness::C0);
  CHECK(uses_nonsmooth_ops(*parse("abs(x1)", 1)));
  CHECK(!uses_nonsmooth_ops(*parse("sin(x1)", 1)));
}

TEST_CASE("domain errors surface at evaluation, not parse") {
  ScalarField f = compile("log(x1)", 1);
  CHECK(eval(f, Vector::Constant(1, 1.0)) == doctest::Approx(0.0));
  CHECK_THROWS_AS(eval(f, Vector::Constant(1, -1.0)), NonFiniteValue);
  // Raw interpretation returns the NaN instead of throwing.
  CHECK(std::isnan(ev1("log(x1)", -1.0)));
  CHECK(std::isinf(ev1("1/x1", 0.0)));
}

TEST_CASE("compiled expression matches the builtin sin graph") {
  ScalarField g_expr = compile("sin(x1)", 1);
  ScalarField f_expr = catalogue_graph_residual(g_expr);
  ScalarField f_builtin = catalogue_graph_residual(sin_field());
  for (const Vector& x : sample_box(vec2(-3, -3), vec2(3, 3), 50, 9)) {
    CHECK(eval(f_expr, x) ==
          doctest::Approx(eval(f_builtin, x)).epsilon(1e-12));
  }
}
