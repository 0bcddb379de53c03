#include "pllab/scalar_field.hpp"

#include <cmath>
#include <limits>

#include "pllab/errors.hpp"

namespace pllab {

std::string to_string(Smoothness s) {
  switch (s) {
    case Smoothness::C_inf: return "C_inf";
    case Smoothness::C2: return "C2";
    case Smoothness::C11: return "C11";
    case Smoothness::C0: return "C0";
  }
  return "?";
}

namespace {

void check_dim(const ScalarField& f, const Vector& x, const char* what) {
  if (x.size() != f.dim)
    throw DimensionMismatch(std::string(what) + ": expected dim " +
                            std::to_string(f.dim) + ", got " +
                            std::to_string(x.size()));
}

double eval_raw(const ScalarField& f, const Vector& x, const char* what) {
  const double v = f.value(x);
  if (!std::isfinite(v))
    throw NonFiniteValue(std::string(what) + ": non-finite value of '" +
                         f.name + "'");
  return v;
}

}  // namespace

double eval(const ScalarField& f, const Vector& x) {
  check_dim(f, x, "eval");
  return eval_raw(f, x, "eval");
}

Vector grad(const ScalarField& f, const Vector& x) {
  check_dim(f, x, "grad");
  if (f.analytic_gradient) {
    Vector g = f.analytic_gradient(x);
    if (g.size() != f.dim) throw DimensionMismatch("grad: oracle dimension");
    if (!all_finite(g)) throw NonFiniteValue("grad: non-finite gradient of '" + f.name + "'");
    return g;
  }
  Vector g(f.dim);
  Vector xp = x, xm = x;
  for (int i = 0; i < f.dim; ++i) {
    const double h = f.fd.grad_step * std::max(1.0, std::abs(x[i]));
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    g[i] = (eval_raw(f, xp, "grad") - eval_raw(f, xm, "grad")) / (2.0 * h);
    xp[i] = x[i];
    xm[i] = x[i];
  }
  if (!all_finite(g)) throw NonFiniteValue("grad: non-finite FD gradient of '" + f.name + "'");
  return g;
}

Matrix hessian(const ScalarField& f, const Vector& x) {
  check_dim(f, x, "hessian");
  if (f.analytic_hessian) {
    Matrix h = f.analytic_hessian(x);
    if (h.rows() != f.dim || h.cols() != f.dim)
      throw DimensionMismatch("hessian: oracle dimension");
    if (!all_finite(h)) throw NonFiniteValue("hessian: non-finite Hessian of '" + f.name + "'");
    return h;
  }
  Matrix h(f.dim, f.dim);
  Vector xp = x, xm = x;
  for (int i = 0; i < f.dim; ++i) {
    const double step = f.fd.hess_step * std::max(1.0, std::abs(x[i]));
    xp[i] = x[i] + step;
    xm[i] = x[i] - step;
    h.col(i) = (grad(f, xp) - grad(f, xm)) / (2.0 * step);
    xp[i] = x[i];
    xm[i] = x[i];
  }
  Matrix sym = 0.5 * (h + h.transpose());
  if (!all_finite(sym)) throw NonFiniteValue("hessian: non-finite FD Hessian of '" + f.name + "'");
  return sym;
}

double nonsmooth_distance(const ScalarField& f, const Vector& x) {
  if (f.nonsmooth_locus_distance) return f.nonsmooth_locus_distance(x);
  double d = std::numeric_limits<double>::infinity();
  for (const Vector& p : f.nonsmooth_points) d = std::min(d, (x - p).norm());
  return d;
}

DerivativeValidation validate_derivatives(const ScalarField& f,
                                          const std::vector<Vector>& points,
                                          double threshold) {
  if (!f.analytic_gradient && !f.analytic_hessian)
    throw NoAnalyticDerivative("validate_derivatives: '" + f.name +
                               "' has no analytic oracle");
  DerivativeValidation out;
  out.threshold = threshold;

  ScalarField fd_only = f;  // force the finite-difference path
  fd_only.analytic_gradient = nullptr;
  fd_only.analytic_hessian = nullptr;

  for (const Vector& x : points) {
    const double locus = nonsmooth_distance(f, x);
    const double excl =
        10.0 * (f.analytic_hessian ? f.fd.hess_step : f.fd.grad_step);
    if (locus <= excl) {
      ++out.n_excluded;
      continue;
    }
    ++out.n_checked;
    double dev = 0.0;
    if (f.analytic_gradient) {
      const Vector ga = grad(f, x);
      const Vector gfd = grad(fd_only, x);
      const double d = (ga - gfd).norm() / (1.0 + ga.norm());
      out.max_grad_deviation = std::max(out.max_grad_deviation, d);
      dev = std::max(dev, d);
    }
    if (f.analytic_hessian) {
      const Matrix ha = hessian(f, x);
      // FD Hessian of the analytic gradient when present, else of values.
      ScalarField half = f;
      half.analytic_hessian = nullptr;
      const Matrix hfd = hessian(half, x);
      const double d = (ha - hfd).norm() / (1.0 + ha.norm());
      out.max_hess_deviation = std::max(out.max_hess_deviation, d);
      dev = std::max(dev, d);
    }
    if (dev > threshold) {
      out.flagged.push_back(x);
      out.pass = false;
    }
  }
  return out;
}

ScalarField scale(const ScalarField& f, double alpha) {
  ScalarField g = f;
  const ScalarField base = f;
  g.value = [base, alpha](const Vector& x) { return alpha * base.value(x); };
  if (base.analytic_gradient)
    g.analytic_gradient = [base, alpha](const Vector& x) -> Vector {
      return alpha * base.analytic_gradient(x);
    };
  if (base.analytic_hessian)
    g.analytic_hessian = [base, alpha](const Vector& x) -> Matrix {
      return alpha * base.analytic_hessian(x);
    };
  if (alpha > 0) {
    if (f.known_inf) g.known_inf = alpha * *f.known_inf;
    if (f.known_pl_constant) g.known_pl_constant = alpha * *f.known_pl_constant;
  } else {
    g.known_inf.reset();
    g.known_pl_constant.reset();
    g.known_argmin.clear();
  }
  g.name = f.name + "_scaled";
  return g;
}

ScalarField translate(const ScalarField& f, const Vector& shift) {
  if (shift.size() != f.dim) throw DimensionMismatch("translate: shift dim");
  ScalarField g = f;
  const ScalarField base = f;
  const Vector s = shift;
  g.value = [base, s](const Vector& x) { return base.value(x - s); };
  if (base.analytic_gradient)
    g.analytic_gradient = [base, s](const Vector& x) -> Vector {
      return base.analytic_gradient(x - s);
    };
  if (base.analytic_hessian)
    g.analytic_hessian = [base, s](const Vector& x) -> Matrix {
      return base.analytic_hessian(x - s);
    };
  g.nonsmooth_points.clear();
  for (const Vector& p : f.nonsmooth_points) g.nonsmooth_points.push_back(p + s);
  if (f.nonsmooth_locus_distance) {
    auto inner = f.nonsmooth_locus_distance;
    g.nonsmooth_locus_distance = [inner, s](const Vector& x) {
      return inner(x - s);
    };
  }
  g.name = f.name + "_shifted";
  return g;
}

}  // namespace pllab
