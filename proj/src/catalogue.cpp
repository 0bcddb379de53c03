#include "pllab/catalogue.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "pllab/errors.hpp"

namespace pllab {

ScalarField catalogue_quadratic_psd(const Matrix& q) {
  if (q.rows() != q.cols() || q.rows() < 1)
    throw InvalidParams("quadratic_psd: q must be square and nonempty");
  const Matrix s = 0.5 * (q + q.transpose());  // x^T q x only sees this part
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  if (es.info() != Eigen::Success)
    throw InvalidParams("quadratic_psd: eigendecomposition failed");
  const Vector eigs = es.eigenvalues();
  if (eigs.minCoeff() < -1e-10)
    throw InvalidParams("quadratic_psd: q is not positive semidefinite");

  ScalarField f;
  f.dim = static_cast<int>(s.rows());
  f.name = "quadratic_psd";
  f.value = [s](const Vector& x) { return x.dot(s * x); };
  f.analytic_gradient = [s](const Vector& x) -> Vector { return 2.0 * s * x; };
  f.analytic_hessian = [s](const Vector&) -> Matrix { return 2.0 * s; };
  f.smoothness = Smoothness::C_inf;
  f.known_inf = 0.0;

  double lambda_pos = std::numeric_limits<double>::infinity();
  int kernel_dim = 0;
  for (int i = 0; i < eigs.size(); ++i) {
    if (eigs[i] > 1e-10) lambda_pos = std::min(lambda_pos, eigs[i]);
    else ++kernel_dim;
  }
  if (std::isfinite(lambda_pos)) f.known_pl_constant = 4.0 * lambda_pos;
  f.known_argmin = kernel_dim == 0
                       ? "{0}"
                       : "kernel of q (dimension " + std::to_string(kernel_dim) + ")";
  return f;
}

ScalarField catalogue_half_sq_dist_interval(double a, double b) {
  if (!(a <= b)) throw InvalidParams("half_sq_dist_interval: need a <= b");
  ScalarField f;
  f.dim = 1;
  f.name = "half_sq_dist_interval";
  f.value = [a, b](const Vector& x) {
    const double d = x[0] < a ? a - x[0] : x[0] > b ? x[0] - b : 0.0;
    return 0.5 * d * d;
  };
  f.analytic_gradient = [a, b](const Vector& x) -> Vector {
    Vector g(1);
    g[0] = x[0] < a ? x[0] - a : x[0] > b ? x[0] - b : 0.0;
    return g;
  };
  // Second derivative is the indicator of the complement; at the kinks
  // themselves we report the interior value 0.
  f.analytic_hessian = [a, b](const Vector& x) -> Matrix {
    Matrix h(1, 1);
    h(0, 0) = (x[0] < a || x[0] > b) ? 1.0 : 0.0;
    return h;
  };
  f.smoothness = Smoothness::C11;
  f.nonsmooth_points.push_back(Vector::Constant(1, a));
  if (b > a) f.nonsmooth_points.push_back(Vector::Constant(1, b));
  f.known_inf = 0.0;
  f.known_pl_constant = 2.0;
  f.known_argmin = "[" + std::to_string(a) + ", " + std::to_string(b) + "]";
  return f;
}

ScalarField catalogue_half_sq_dist_set(const ClosedSetRep& set) {
  return dist_sq_field(set);
}

ScalarField catalogue_graph_residual(const ScalarField& g) {
  if (g.dim < 1) throw InvalidParams("graph_residual: g needs dim >= 1");
  const int n = g.dim + 1;
  ScalarField f;
  f.dim = n;
  f.name = "graph_residual(" + (g.name.empty() ? "g" : g.name) + ")";
  const ScalarField gf = g;
  f.value = [gf, n](const Vector& x) {
    const double r = x[n - 1] - eval(gf, x.head(n - 1));
    return r * r;
  };
  f.analytic_gradient = [gf, n](const Vector& x) -> Vector {
    const Vector u = x.head(n - 1);
    const double r = x[n - 1] - eval(gf, u);
    const Vector gg = grad(gf, u);
    Vector out(n);
    out.head(n - 1) = -2.0 * r * gg;
    out[n - 1] = 2.0 * r;
    return out;
  };
  f.analytic_hessian = [gf, n](const Vector& x) -> Matrix {
    const Vector u = x.head(n - 1);
    const double r = x[n - 1] - eval(gf, u);
    const Vector gg = grad(gf, u);
    const Matrix hg = hessian(gf, u);
    Matrix h(n, n);
    h.topLeftCorner(n - 1, n - 1) =
        2.0 * gg * gg.transpose() - 2.0 * r * hg;
    h.block(0, n - 1, n - 1, 1) = -2.0 * gg;
    h.block(n - 1, 0, 1, n - 1) = -2.0 * gg.transpose();
    h(n - 1, n - 1) = 2.0;
    return h;
  };
  f.smoothness = g.smoothness;
  if (!g.nonsmooth_points.empty() || g.nonsmooth_locus_distance) {
    // Kinks of g lift to vertical lines; distance ignores the last coordinate.
    f.nonsmooth_locus_distance = [gf, n](const Vector& x) {
      return nonsmooth_distance(gf, x.head(n - 1));
    };
  }
  f.known_inf = 0.0;
  f.known_pl_constant = 4.0;  // |grad f|^2 = 4 f (1 + |grad g|^2) >= 4 f
  f.known_argmin = "graph of " + (g.name.empty() ? std::string("g") : g.name);
  return f;
}

ScalarField catalogue_cylinder_lift(const ScalarField& inner, int k) {
  if (k < 1) throw InvalidParams("cylinder_lift: k must be >= 1");
  if (inner.dim < 1) throw InvalidParams("cylinder_lift: inner needs dim >= 1");
  const int m = inner.dim, n = inner.dim + k;
  ScalarField f;
  f.dim = n;
  f.name = "cylinder_lift(" + (inner.name.empty() ? "f" : inner.name) + ", " +
           std::to_string(k) + ")";
  const ScalarField in = inner;
  f.value = [in, m](const Vector& x) { return eval(in, x.head(m)); };
  f.analytic_gradient = [in, m, n](const Vector& x) -> Vector {
    Vector out = Vector::Zero(n);
    out.head(m) = grad(in, x.head(m));
    return out;
  };
  f.analytic_hessian = [in, m, n](const Vector& x) -> Matrix {
    Matrix h = Matrix::Zero(n, n);
    h.topLeftCorner(m, m) = hessian(in, x.head(m));
    return h;
  };
  f.smoothness = inner.smoothness;
  if (!inner.nonsmooth_points.empty() || inner.nonsmooth_locus_distance) {
    f.nonsmooth_locus_distance = [in, m](const Vector& x) {
      return nonsmooth_distance(in, x.head(m));
    };
  }
  f.known_inf = inner.known_inf;
  f.known_pl_constant = inner.known_pl_constant;
  if (!inner.known_argmin.empty())
    f.known_argmin = inner.known_argmin + " x R^" + std::to_string(k);
  return f;
}

ScalarField catalogue_sq_dist_sphere(const Vector& center, double radius) {
  if (center.size() < 1) throw InvalidParams("sq_dist_sphere: empty center");
  if (!(radius > 0)) throw InvalidParams("sq_dist_sphere: radius must be > 0");
  const int n = static_cast<int>(center.size());
  ScalarField f;
  f.dim = n;
  f.name = "sq_dist_sphere";
  const Vector c = center;
  const double r = radius;
  f.value = [c, r](const Vector& x) {
    const double rho = (x - c).norm();
    return (rho - r) * (rho - r);
  };
  f.analytic_gradient = [c, r](const Vector& x) -> Vector {
    const Vector d = x - c;
    const double rho = d.norm();
    if (rho == 0.0) return Vector::Zero(d.size());  // declared kink
    return 2.0 * (1.0 - r / rho) * d;
  };
  f.analytic_hessian = [c, r, n](const Vector& x) -> Matrix {
    const Vector d = x - c;
    const double rho = d.norm();
    const Vector u = d / rho;  // NaN at the kink -> NonFiniteValue upstream
    const Matrix eye = Matrix::Identity(n, n);
    return 2.0 * u * u.transpose() +
           2.0 * (1.0 - r / rho) * (eye - u * u.transpose());
  };
  f.smoothness = Smoothness::C0;  // not C1 at the center
  f.nonsmooth_points.push_back(c);
  f.known_inf = 0.0;
  f.known_pl_constant = 4.0;  // |grad|^2 = 4 (rho - r)^2 = 4 f away from center
  f.known_argmin = "sphere(center, radius)";
  return f;
}

ScalarField sin_field() {
  ScalarField g;
  g.dim = 1;
  g.name = "sin";
  g.value = [](const Vector& x) { return std::sin(x[0]); };
  g.analytic_gradient = [](const Vector& x) -> Vector {
    return Vector::Constant(1, std::cos(x[0]));
  };
  g.analytic_hessian = [](const Vector& x) -> Matrix {
    return Matrix::Constant(1, 1, -std::sin(x[0]));
  };
  g.smoothness = Smoothness::C_inf;
  g.known_inf = -1.0;
  return g;
}

std::vector<CatalogueEntry> catalogue_listing() {
  return {
      {"quadratic_psd", R"({"q": [[...], ...]})", "C_inf",
       "x^T q x, q positive semidefinite; known_pl_constant=4*(smallest "
       "positive eigenvalue); identity q gives known_pl_constant=4"},
      {"half_sq_dist_interval", R"({"a": real, "b": real})", "C11",
       "(1/2)*dist(x,[a,b])^2 on the line; known_pl_constant=2; kinks at a, b"},
      {"half_sq_dist_set", R"({"set": {"variant": ..., ...}})",
       "C11 (convex set) / C0",
       "(1/2)*dist(x,F)^2 via exact projection; known_pl_constant=2"},
      {"graph_residual", R"({"g": {"builtin"|"expr"+"dim"|"catalogue"+"params"}})",
       "inherits g", "(x_n - g(x_1..x_{n-1}))^2; known_pl_constant=4"},
      {"cylinder_lift",
       R"({"inner": {"catalogue"+"params"|"expr"+"dim"}, "k": int >= 1})",
       "inherits inner",
       "(x, x') -> inner(x); same known_pl_constant and infimum as inner"},
      {"sq_dist_sphere", R"({"center": [...], "radius": real > 0})", "C0",
       "(||x-center||-radius)^2, no 1/2 factor; known_pl_constant=4 away from "
       "the center"},
  };
}

}  // namespace pllab
