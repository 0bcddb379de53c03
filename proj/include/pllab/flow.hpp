#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pllab/scalar_field.hpp"
#include "pllab/types.hpp"

namespace pllab {

struct FlowConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double max_time = 50.0;
  long max_steps = 1000000;
  double stop_grad_norm = 1e-10;
  double stop_f_gap = 1e-16;  // needs f.known_inf, otherwise inactive
};

enum class StopReason { grad_small, f_gap_small, max_time, max_steps };

std::string to_string(StopReason r);

// Accepted-step record of one gradient-flow integration y' = -grad f(y).
// arclength_cum is per-step Gauss quadrature of ||grad f|| along the dense
// output; chordlength_cum is the plain sum of chords (a lower bound).
struct Trajectory {
  Vector x0;
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<double> f_values;
  std::vector<double> grad_norms;
  std::vector<double> arclength_cum;
  std::vector<double> chordlength_cum;
  Vector terminal;
  bool converged = false;
  StopReason stop_reason = StopReason::max_time;

  double arclength() const {
    return arclength_cum.empty() ? 0.0 : arclength_cum.back();
  }
  double chord_length() const {
    return chordlength_cum.empty() ? 0.0 : chordlength_cum.back();
  }
};

// Adaptive embedded Runge-Kutta 5(4) with PI step control and dense output.
// Stops on small gradient, small f-gap (when known_inf present), max_time,
// or max_steps.  Throws StepSizeUnderflow / NonFiniteValue; enforces that
// f_values never increases by more than 10*rel_tol*(|f0|+abs_tol).
Trajectory integrate_flow(const ScalarField& f, const Vector& x0,
                          const FlowConfig& cfg = {});

// Terminal state of a converged flow; throws NotConverged otherwise.
Vector flow_limit(const ScalarField& f, const Vector& x0,
                  const FlowConfig& cfg = {});

// ---- checks of the decay / length / retraction bounds ----------------------

struct DecayReport {
  bool pass = true;
  double c_used = 0.0;
  double inf_f = 0.0;
  double epsilon = 1e-6;
  // max/min over accepted steps of (f_k - inf) * e^{C t_k} / (f_0 - inf)
  double max_scaled_ratio = 0.0;
  double min_scaled_ratio = 0.0;
  std::optional<double> first_violation_time;
};

// Verifies f_k - inf <= e^{-C t_k} (f_0 - inf) (1 + epsilon) at every
// accepted step.
DecayReport decay_check(const ScalarField& f, const Trajectory& traj, double c,
                        double inf_f, double epsilon = 1e-6);

struct LengthReport {
  bool pass = true;
  double arclength = 0.0;
  double chord_length = 0.0;
  double bound = 0.0;  // (2/sqrt(C)) * sqrt(f0 - inf)
  double ratio = 0.0;
  double c_used = 0.0;
  double epsilon = 1e-6;
  std::string method = "chord_plus_dense_quadrature";
  std::string normalization = "derived(2/sqrt(C) scaling of the C=1 bound)";
};

LengthReport length_check(const Trajectory& traj, double c, double inf_f,
                          double epsilon = 1e-6);
LengthReport length_check(const Trajectory& traj, double c, double inf_f,
                          double f0, double epsilon);

struct RetractionPoint {
  Vector y;
  double f_gap = 0.0;
  double displacement = 0.0;
  double bound = 0.0;
  double ratio = 0.0;            // displacement / bound (0 when bound == 0)
  bool minimizer_case = false;   // f-gap below stop_f_gap: fixed-point check
  bool ok = true;
};

struct RetractionReport {
  bool pass = true;
  double c_used = 0.0;
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  std::string normalization = "derived(2/sqrt(C) scaling of the C=1 bound)";
  double epsilon = 1e-6;
  std::vector<RetractionPoint> points;
};

// ||flow_limit(y) - y|| <= (2/sqrt(C)) sqrt(f(y)-inf) (1+epsilon) per grid
// point; points already at the minimum must be fixed within 1e-8.
RetractionReport retraction_check(const ScalarField& f,
                                  const std::vector<Vector>& grid, double c,
                                  double inf_f, const FlowConfig& cfg = {},
                                  double epsilon = 1e-6);

struct BasinWitness {
  Vector y;                   // witness, != minimizer
  Vector limit;               // flow limit of y
  double limit_distance = 0;  // ||limit - minimizer||
  double radius = 0;          // sphere radius where the witness was found
};

// Searches spheres of shrinking radius (r, r/2, ..., >= 1e-5) around the
// minimizer for a point that flows back to it within max(1e-6,
// 2*stop_grad_norm).  Throws NoWitnessFound (e.g. locally constant f).
BasinWitness basin_witness(const ScalarField& f, const Vector& minimizer,
                           double search_radius, const FlowConfig& cfg = {});

// CSV dump: header "t,x0,...,x{n-1},f,gradnorm,arclen", one row per accepted
// step, 17 significant digits.
void write_trajectory_csv(const Trajectory& traj, std::ostream& os);

}  // namespace pllab
