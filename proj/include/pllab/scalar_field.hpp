#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pllab/types.hpp"

namespace pllab {

// Global smoothness class of a field.  The listed nonsmooth_points are the
// known places where the NEXT class up fails (e.g. a C11 field is C-infinity
// away from them); an empty list with tag C0 means the locus is unknown.
enum class Smoothness { C_inf, C2, C11, C0 };

std::string to_string(Smoothness s);

struct FdSteps {
  double grad_step = 1e-6;  // h0, scaled per coordinate by max(1, |x_i|)
  double hess_step = 1e-4;  // h1, same scaling, applied to the gradient
};

// A scalar field on R^n with optional analytic derivative oracles and
// optional ground-truth metadata.  Fields are immutable value types; the
// oracles must be pure so evaluation can run on any thread.
struct ScalarField {
  using ValueFn = std::function<double(const Vector&)>;
  using GradFn = std::function<Vector(const Vector&)>;
  using HessFn = std::function<Matrix(const Vector&)>;

  int dim = 0;
  ValueFn value;
  GradFn analytic_gradient;  // empty -> finite differences
  HessFn analytic_hessian;   // empty -> finite differences of grad()

  Smoothness smoothness = Smoothness::C_inf;
  std::vector<Vector> nonsmooth_points;
  // Distance to the nonsmooth locus when it is not a finite point list
  // (cylinder lifts); defaults to min distance over nonsmooth_points.
  std::function<double(const Vector&)> nonsmooth_locus_distance;

  std::optional<double> known_inf;
  std::optional<double> known_pl_constant;
  std::string known_argmin;  // human-readable description, may be empty

  FdSteps fd;
  std::string name;
};

// Evaluation with dimension and finiteness checks.
// Throws DimensionMismatch / NonFiniteValue.
double eval(const ScalarField& f, const Vector& x);

// Gradient: analytic oracle when present, otherwise central differences
// (f(x+h e_i) - f(x-h e_i)) / (2h) with h = grad_step * max(1, |x_i|).
Vector grad(const ScalarField& f, const Vector& x);

// Hessian: analytic oracle when present, otherwise central differences of
// grad() with step hess_step * max(1, |x_i|), symmetrized with its transpose.
Matrix hessian(const ScalarField& f, const Vector& x);

// Distance from x to the declared non-smooth locus (+inf when none).
double nonsmooth_distance(const ScalarField& f, const Vector& x);

// Comparison of analytic oracles against their finite-difference versions.
struct DerivativeValidation {
  int n_checked = 0;
  int n_excluded = 0;  // points within 10*step of the declared nonsmooth locus
  double max_grad_deviation = 0.0;  // ||ga-gfd|| / (1+||ga||)
  double max_hess_deviation = 0.0;  // ||Ha-Hfd||_F / (1+||Ha||_F), if checked
  std::vector<Vector> flagged;      // deviation above threshold
  bool pass = true;
  double threshold = 1e-4;
};

// Requires at least one analytic oracle (throws NoAnalyticDerivative).
DerivativeValidation validate_derivatives(const ScalarField& f,
                                          const std::vector<Vector>& points,
                                          double threshold = 1e-4);

// ---- small field combinators ------------------------------------------------

// alpha * f, with metadata scaled accordingly (pl constant scales by alpha
// only for alpha > 0; inf scales by alpha).
ScalarField scale(const ScalarField& f, double alpha);

// f(x - shift), metadata translated.
ScalarField translate(const ScalarField& f, const Vector& shift);

}  // namespace pllab
