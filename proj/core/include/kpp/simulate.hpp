#pragma once

#include <string>
#include <vector>

#include "kpp/environment.hpp"
#include "kpp/kernel.hpp"

namespace kpp {

// Reaction terms: a local part f1 (logistic or pure decay) plus an
// optional delayed/nonlocal part f2 fed through the kernel.
struct ModelSpec {
  enum class F1 { fisher, linear_death };
  enum class F2 { none, ricker };

  F1 f1 = F1::fisher;
  F2 f2 = F2::none;
  double death_rate = 0.0;     // linear_death: f1 = -death_rate * u
  ShiftedEnvironment env1;     // fisher rate r(t,x): f1 = u (r - u)
  ShiftedEnvironment env2;     // ricker rate: f2 = r(t,x) v exp(-v)
  DelayKernel kernel = DelayKernel::none();
  double L0 = 1.0;             // saturation bound

  double f1_value(double t, double x, double u) const;
  double f2_value(double t, double x, double v) const;
  // Numerically check the combined reaction is nonpositive at level L
  // over sampled (t, x).
  bool saturation_holds(double L, double t_max, double x_max) const;
};

struct InitialData {
  enum class Kind { exponential, bump };  // decay rate mu / compact support

  Kind kind = Kind::bump;
  double mu = 0.5;        // exponential tail rate
  double amplitude = 0.5;
  double width = 10.0;    // bump support width

  double value(double x) const;
  double mu_or_inf() const;
};

struct FrontTrace {
  double theta = 0.1;
  std::vector<double> t;
  std::vector<double> x;  // rightmost level crossing sup{x : u >= theta}
};

struct Snapshot {
  double t = 0.0;
  std::vector<double> u;
};

struct SimParams {
  double x_lo = -50.0;
  double x_hi = 450.0;
  int nx = 2501;
  double dt = 0.0;          // 0 = auto from the diffusion CFL
  double t_final = 200.0;
  double theta = 0.1;       // front level
  bool crank_nicolson = false;
  int snapshot_count = 81;  // snapshots kept (evenly spaced, plus t=0)
};

struct SimResult {
  std::vector<double> xgrid;
  std::vector<Snapshot> snapshots;
  FrontTrace trace;
  double dt = 0.0;
  long clamp_count = 0;      // negative undershoots zeroed
  long long cell_steps = 0;
  double u_max_seen = 0.0;
};

SimResult simulate(const ModelSpec& model, const InitialData& ic,
                   const SimParams& params);

struct SpeedFit {
  double c_hat = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  int samples = 0;
};

// Least-squares slope of the front trace on [t_a, t_b] (>= 10 samples).
SpeedFit estimate_speed(const FrontTrace& trace, double t_a, double t_b);

struct DichotomyReport {
  std::vector<double> t;
  std::vector<double> outer;  // sup u over x >= (s_hat + eta) t
  std::vector<double> inner;  // inf u over 0 <= x <= (s_hat - eta) t
  bool degenerate_eta = false;
  bool outer_decays = false;  // final outer < 1e-3
  bool inner_persists = false;
};

DichotomyReport verify_dichotomy(const SimResult& sim, double s_hat,
                                 double eta, const std::vector<double>& t_check,
                                 double inner_threshold = 1e-2);

struct TailBoundReport {
  double q_lo = 0.0;  // smallest Q with w >= (mu - delta) x - Q t
  double q_hi = 0.0;  // smallest Q with w <= (mu + delta) x + Q t
  double q_hi_construction = 0.0;  // max(q_hi, lambda_ref)
  long samples_used = 0;
  bool pass = false;
};

// Sandwich fit for w = -log u on u > 1e-300, x >= 0, t > 0. lambda_ref
// should be lambda(mu - delta) of the relevant dispersion relation.
TailBoundReport tail_bound_check(const SimResult& sim, const InitialData& ic,
                                 double mu, double delta, double lambda_ref);

// Spatial decay rate of u ahead of the front: slope of -log u between the
// level crossings u_hi and u_lo on the final snapshot.
double fit_decay_rate(const SimResult& sim, double u_hi = 1e-3,
                      double u_lo = 1e-8);

}  // namespace kpp
