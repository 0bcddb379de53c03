#include "pllab/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "pllab/errors.hpp"
#include "pllab/sampling.hpp"

namespace pllab {

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::grad_small: return "grad_small";
    case StopReason::f_gap_small: return "f_gap_small";
    case StopReason::max_time: return "max_time";
    case StopReason::max_steps: return "max_steps";
  }
  return "?";
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187,
                 A53 = 64448.0 / 6561, A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                 B5 = -2187.0 / 6784, B6 = 11.0 / 84;
// b - bhat: weights of the embedded error estimate.
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920,
                 E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40;
// Dense-output coefficients (order-4 continuous extension).
constexpr double D1 = -12715105075.0 / 11282082432.0;
constexpr double D3 = 87487479700.0 / 32700410799.0;
constexpr double D4 = -10690763975.0 / 1880347072.0;
constexpr double D5 = 701980252875.0 / 199316789632.0;
constexpr double D6 = -1453857185.0 / 822651844.0;
constexpr double D7 = 69997945.0 / 29380423.0;

// Gauss-Legendre 4 on [0,1].
constexpr double GL_X[4] = {0.5 - 0.4305681557970263, 0.5 - 0.1699905217924281,
                            0.5 + 0.1699905217924281, 0.5 + 0.4305681557970263};
constexpr double GL_W[4] = {0.1739274225687269, 0.3260725774312731,
                            0.3260725774312731, 0.1739274225687269};

struct DenseSegment {
  // y(t0 + theta h) = r1 + theta (r2 + (1-theta)(r3 + theta (r4 + (1-theta) r5)))
  Vector r1, r2, r3, r4, r5;
  Vector at(double theta) const {
    const double t1 = 1.0 - theta;
    return r1 + theta * (r2 + t1 * (r3 + theta * (r4 + t1 * r5)));
  }
};

double scaled_err_norm(const Vector& err, const Vector& y0, const Vector& y1,
                       double atol, double rtol) {
  double acc = 0.0;
  for (int i = 0; i < err.size(); ++i) {
    const double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double q = err[i] / sc;
    acc += q * q;
  }
  return std::sqrt(acc / err.size());
}

// Hairer-style starting step size for y' = rhs(y).
double initial_step(const ScalarField& f, const Vector& y0, const Vector& f0,
                    double atol, double rtol, double t_span) {
  auto scn = [&](const Vector& v, const Vector& ref) {
    double acc = 0.0;
    for (int i = 0; i < v.size(); ++i) {
      const double sc = atol + rtol * std::abs(ref[i]);
      const double q = v[i] / sc;
      acc += q * q;
    }
    return std::sqrt(acc / v.size());
  };
  const double d0 = scn(y0, y0), d1 = scn(f0, y0);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, t_span);
  const Vector y1 = y0 + h0 * f0;
  const Vector f1 = -grad(f, y1);
  const double d2 = scn(f1 - f0, y0) / h0;
  const double dmax = std::max(d1, d2);
  double h1 = (dmax <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                              : std::pow(0.01 / dmax, 0.2);
  return std::min({100.0 * h0, h1, t_span});
}

}  // namespace

Trajectory integrate_flow(const ScalarField& f, const Vector& x0,
                          const FlowConfig& cfg) {
  if (!(cfg.rel_tol > 0) || !(cfg.abs_tol > 0) || !(cfg.max_time > 0) ||
      cfg.max_steps < 1 || !(cfg.stop_grad_norm > 0) || !(cfg.stop_f_gap > 0))
    throw InvalidParams("integrate_flow: config values must be positive");

  Trajectory traj;
  traj.x0 = x0;
  Vector y = x0;
  double t = 0.0;

  double fv = eval(f, y);
  Vector g = grad(f, y);
  double gn = g.norm();

  const double f0 = fv;
  const double mono_slack = 10.0 * cfg.rel_tol * (std::abs(f0) + cfg.abs_tol);

  auto record = [&](double time, const Vector& state, double fval, double gnorm,
                    double darc, double dchord) {
    traj.times.push_back(time);
    traj.states.push_back(state);
    traj.f_values.push_back(fval);
    traj.grad_norms.push_back(gnorm);
    const double arc = (traj.arclength_cum.empty() ? 0.0 : traj.arclength_cum.back()) + darc;
    const double chord = (traj.chordlength_cum.empty() ? 0.0 : traj.chordlength_cum.back()) + dchord;
    traj.arclength_cum.push_back(arc);
    traj.chordlength_cum.push_back(chord);
  };

  record(0.0, y, fv, gn, 0.0, 0.0);

  auto stopped = [&](double time, double fval, double gnorm) -> bool {
    if (gnorm <= cfg.stop_grad_norm) {
      traj.stop_reason = StopReason::grad_small;
      traj.converged = true;
      return true;
    }
    if (f.known_inf && fval - *f.known_inf <= cfg.stop_f_gap) {
      traj.stop_reason = StopReason::f_gap_small;
      traj.converged = true;
      return true;
    }
    if (time >= cfg.max_time * (1.0 - 1e-14)) {
      traj.stop_reason = StopReason::max_time;
      traj.converged = false;
      return true;
    }
    return false;
  };

  if (stopped(t, fv, gn)) {
    traj.terminal = y;
    return traj;
  }

  Vector k1 = -g;
  double h = initial_step(f, y, k1, cfg.abs_tol, cfg.rel_tol, cfg.max_time);

  // PI controller state (Hairer's DOPRI5 defaults).
  const double beta = 0.04, safe = 0.9, fac1 = 0.2, fac2 = 10.0;
  const double expo1 = 0.2 - beta * 0.75;
  double facold = 1e-4;
  bool rejected_last = false;

  long n_steps = 0;
  const int n = f.dim;
  Vector k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ynew(n), err(n);

  while (true) {
    if (n_steps >= cfg.max_steps) {
      traj.stop_reason = StopReason::max_steps;
      traj.converged = false;
      break;
    }
    if (h < 1e-14 * std::max(1.0, std::abs(t)))
      throw StepSizeUnderflow("integrate_flow: step size underflow at t=" +
                              std::to_string(t));
    bool clamped = false;
    if (t + h >= cfg.max_time) {
      h = cfg.max_time - t;
      clamped = true;
    }

    k2 = -grad(f, y + h * (A21 * k1));
    k3 = -grad(f, y + h * (A31 * k1 + A32 * k2));
    k4 = -grad(f, y + h * (A41 * k1 + A42 * k2 + A43 * k3));
    k5 = -grad(f, y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
    k6 = -grad(f, y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
    ynew = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
    k7 = -grad(f, ynew);
    err = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);

    ++n_steps;
    const double errn = scaled_err_norm(err, y, ynew, cfg.abs_tol, cfg.rel_tol);
    const double fac11 = std::pow(std::max(errn, 1e-300), expo1);

    if (errn > 1.0) {
      h /= std::min(1.0 / fac1, fac11 / safe);
      rejected_last = true;
      continue;
    }

    // Accepted: dense segment for this interval.
    DenseSegment seg;
    seg.r1 = y;
    seg.r2 = ynew - y;
    seg.r3 = h * k1 - seg.r2;
    seg.r4 = seg.r2 - h * k7 - seg.r3;
    seg.r5 = h * (D1 * k1 + D3 * k3 + D4 * k4 + D5 * k5 + D6 * k6 + D7 * k7);

    double darc = 0.0;
    for (int q = 0; q < 4; ++q)
      darc += GL_W[q] * grad(f, seg.at(GL_X[q])).norm();
    darc *= h;
    const double dchord = (ynew - y).norm();

    const double fnew = eval(f, ynew);
    if (fnew > traj.f_values.back() + mono_slack)
      throw Error("integrate_flow: f increased along the flow beyond tolerance (t=" +
                  std::to_string(t + h) + ")");

    t = clamped ? cfg.max_time : t + h;
    y = ynew;
    k1 = k7;  // FSAL
    fv = fnew;
    gn = k1.norm();
    record(t, y, fv, gn, darc, dchord);

    if (stopped(t, fv, gn)) break;

    double fac = fac11 / std::pow(facold, beta);
    fac = std::max(1.0 / fac2, std::min(1.0 / fac1, fac / safe));
    double hnew = h / fac;
    if (rejected_last) hnew = std::min(hnew, h);
    facold = std::max(errn, 1e-4);
    rejected_last = false;
    h = hnew;
  }

  traj.terminal = y;
  return traj;
}

Vector flow_limit(const ScalarField& f, const Vector& x0, const FlowConfig& cfg) {
  Trajectory traj = integrate_flow(f, x0, cfg);
  if (!traj.converged)
    throw NotConverged("flow_limit: flow from given start did not converge (" +
                       to_string(traj.stop_reason) + ")");
  return traj.terminal;
}

DecayReport decay_check(const ScalarField& f, const Trajectory& traj, double c,
                        double inf_f, double epsilon) {
  (void)f;
  DecayReport rep;
  rep.c_used = c;
  rep.inf_f = inf_f;
  rep.epsilon = epsilon;
  const double gap0 = traj.f_values.front() - inf_f;
  bool first = true;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double gap = traj.f_values[k] - inf_f;
    const double bound = std::exp(-c * traj.times[k]) * gap0;
    if (gap > bound * (1.0 + epsilon) + 1e-300) {
      rep.pass = false;
      if (!rep.first_violation_time) rep.first_violation_time = traj.times[k];
    }
    const double ratio =
        (gap0 <= 0.0) ? (gap <= 0.0 ? 1.0 : std::numeric_limits<double>::infinity())
                      : gap * std::exp(c * traj.times[k]) / gap0;
    if (first) {
      rep.max_scaled_ratio = rep.min_scaled_ratio = ratio;
      first = false;
    } else {
      rep.max_scaled_ratio = std::max(rep.max_scaled_ratio, ratio);
      rep.min_scaled_ratio = std::min(rep.min_scaled_ratio, ratio);
    }
  }
  return rep;
}

LengthReport length_check(const Trajectory& traj, double c, double inf_f,
                          double epsilon) {
  return length_check(traj, c, inf_f, traj.f_values.front(), epsilon);
}

LengthReport length_check(const Trajectory& traj, double c, double inf_f,
                          double f0, double epsilon) {
  if (!(c > 0)) throw InvalidParams("length_check: C must be positive");
  LengthReport rep;
  rep.c_used = c;
  rep.epsilon = epsilon;
  rep.arclength = traj.arclength();
  rep.chord_length = traj.chord_length();
  const double gap0 = std::max(f0 - inf_f, 0.0);
  rep.bound = 2.0 / std::sqrt(c) * std::sqrt(gap0);
  rep.ratio = rep.bound > 0 ? rep.arclength / rep.bound : 0.0;
  rep.pass = rep.arclength <= rep.bound * (1.0 + epsilon) + 1e-300;
  return rep;
}

RetractionReport retraction_check(const ScalarField& f,
                                  const std::vector<Vector>& grid, double c,
                                  double inf_f, const FlowConfig& cfg,
                                  double epsilon) {
  if (!(c > 0)) throw InvalidParams("retraction_check: C must be positive");
  RetractionReport rep;
  rep.c_used = c;
  rep.epsilon = epsilon;
  bool first = true;
  for (const Vector& y : grid) {
    RetractionPoint pt;
    pt.y = y;
    pt.f_gap = eval(f, y) - inf_f;
    const Vector lim = flow_limit(f, y, cfg);
    pt.displacement = (lim - y).norm();
    pt.bound = 2.0 / std::sqrt(c) * std::sqrt(std::max(pt.f_gap, 0.0));
    if (pt.f_gap <= cfg.stop_f_gap) {
      pt.minimizer_case = true;
      pt.ok = pt.displacement <= 1e-8;
      pt.ratio = 0.0;
    } else {
      pt.ratio = pt.displacement / pt.bound;
      pt.ok = pt.displacement <= pt.bound * (1.0 + epsilon);
      if (first) {
        rep.max_ratio = rep.min_ratio = pt.ratio;
        first = false;
      } else {
        rep.max_ratio = std::max(rep.max_ratio, pt.ratio);
        rep.min_ratio = std::min(rep.min_ratio, pt.ratio);
      }
    }
    rep.pass = rep.pass && pt.ok;
    rep.points.push_back(std::move(pt));
  }
  return rep;
}

BasinWitness basin_witness(const ScalarField& f, const Vector& minimizer,
                           double search_radius, const FlowConfig& cfg) {
  if (!(search_radius > 0))
    throw InvalidParams("basin_witness: search_radius must be positive");
  const double accept_tol = std::max(1e-6, 2.0 * cfg.stop_grad_norm);
  const int n = f.dim;
  for (double r = search_radius; r >= 1e-5; r /= 2.0) {
    const int count = (r >= 1e-2) ? std::max(16, 8 * n) : std::max(128, 16 * n);
    const auto dirs = sphere_directions(n, count, /*seed=*/12345);
    for (const Vector& u : dirs) {
      const Vector y = minimizer + r * u;
      Trajectory traj = integrate_flow(f, y, cfg);
      if (!traj.converged) continue;
      const double d = (traj.terminal - minimizer).norm();
      if (d <= accept_tol) {
        BasinWitness w;
        w.y = y;
        w.limit = traj.terminal;
        w.limit_distance = d;
        w.radius = r;
        return w;
      }
    }
  }
  throw NoWitnessFound(
      "basin_witness: no sphere point flows back to the minimizer (radii down "
      "to 1e-5)");
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& os) {
  const int n = traj.x0.size() ? static_cast<int>(traj.x0.size()) : 0;
  os << "t";
  for (int i = 0; i < n; ++i) os << ",x" << i;
  os << ",f,gradnorm,arclen\n";
  char buf[64];
  auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf << sep;
  };
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    put(traj.times[k], ',');
    for (int i = 0; i < n; ++i) put(traj.states[k][i], ',');
    put(traj.f_values[k], ',');
    put(traj.grad_norms[k], ',');
    std::snprintf(buf, sizeof buf, "%.17g", traj.arclength_cum[k]);
    os << buf << "\n";
  }
}

}  // namespace pllab
