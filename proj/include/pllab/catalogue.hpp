#pragma once

// The built-in field catalogue: quadratic forms, squared-distance fields to
// intervals / general closed sets / spheres, graph residuals (y - g(x))^2,
// and cylinder lifts.  Each constructor fills smoothness and ground-truth
// metadata (infimum, PL constant, argmin description) so checks downstream
// can be exact.  Squared-distance conventions differ on purpose:
// half_sq_dist_* carry the 1/2 factor, sq_dist_sphere does not; the factor
// is part of each field's contract and is recorded in the listing.

#include <string>
#include <vector>

#include "pllab/distance_fields.hpp"
#include "pllab/scalar_field.hpp"
#include "pllab/types.hpp"

namespace pllab {

// x^T q x for positive-semidefinite q (eigenvalues >= -1e-10 after
// symmetrization; InvalidParams otherwise).  No 1/2 factor.
// known_pl_constant = 4 * (smallest eigenvalue above 1e-10) when one exists.
ScalarField catalogue_quadratic_psd(const Matrix& q);

// 1/2 * dist(x, [a,b])^2 on the line; C11 with kinks at a and b.
ScalarField catalogue_half_sq_dist_interval(double a, double b);

// 1/2 * dist(x, F)^2 for a represented closed set; alias of dist_sq_field.
ScalarField catalogue_half_sq_dist_set(const ClosedSetRep& set);

// (x_n - g(x_1..x_{n-1}))^2 where g is any scalar field of dimension n-1.
// Derivatives are composed from g's (analytic or FD).  PL constant 4.
ScalarField catalogue_graph_residual(const ScalarField& g);

// (x, x') -> inner(x) on dim(inner)+k coordinates; same PL constant and
// infimum as inner, argmin = argmin(inner) x R^k.
ScalarField catalogue_cylinder_lift(const ScalarField& inner, int k);

// dist(x, sphere(center, radius))^2 = (||x-center|| - radius)^2.
// No 1/2 factor.  Smooth away from the center, nonsmooth at it; PL with
// constant 4 on R^n minus the center.
ScalarField catalogue_sq_dist_sphere(const Vector& center, double radius);

// g(x) = sin(x) on the line with analytic derivatives, ready to feed
// catalogue_graph_residual.
ScalarField sin_field();

struct CatalogueEntry {
  std::string name;
  std::string params_schema;  // JSON keys expected under "params"
  std::string smoothness;
  std::string notes;  // factor conventions, known constants
};

// Deterministically ordered description of every catalogue constructor.
std::vector<CatalogueEntry> catalogue_listing();

}  // namespace pllab
