#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "kpp/environment.hpp"
#include "kpp/hj.hpp"
#include "kpp/kernel.hpp"
#include "kpp/simulate.hpp"

namespace kpp::cli {

using nlohmann::json;

struct KernelConfig {
  std::string type = "none";  // none | point_mass | uniform_box | gauss_exp
  double tau = 1.0;
  double y = 0.0;
  double tau0 = 1.0;
  double y_half = 1.0;
  double sigma = 1.0;
  double rate = 1.0;
  int n_tau = 16;
  int n_y = 64;
};

struct TermConfig {
  double c = 0.0;
  std::string shape = "step";  // step | tanh | bump
  double lo = 0.0;
  double hi = 0.0;
  double width = 1.0;
};

struct EnvConfig {
  double baseline = 1.0;
  std::vector<TermConfig> terms;
};

struct SpeedConfig {
  std::string mode = "auto";  // auto | two_shift_kpp | nonlocal_pulling
  double r1 = 0.25;
  double r2 = 1.0;
  double c1 = 2.5;
  double c2 = 1.5;
};

struct HjConfig {
  double s_max = 6.0;
  double h = 0.01;
  double t0 = 0.0;         // 0 = default log-time span
  double t_final = 16.0;
  double cfl = 0.45;
  double mu_cap = 0.0;     // 0 = automatic
  double zero_tol = 0.0;   // 0 = default 10 h
  double defect_tol = 0.05;
};

struct SimConfig {
  double x_lo = -50.0;
  double x_hi = 450.0;
  int nx = 2501;
  double dt = 0.0;
  double t_final = 200.0;
  double theta = 0.1;
  bool crank_nicolson = false;
  int snapshots = 81;
  std::string f1 = "fisher";  // fisher | linear_death
  std::string f2 = "none";    // none | ricker
  double death_rate = 0.0;
  double l0 = 1.0;
  std::string initial = "bump";  // bump | exponential
  double amplitude = 0.5;
  double width = 10.0;
  double fit_window = 0.0;  // trailing window length; 0 = last third
};

struct ValidateConfig {
  double tol_hj = 0.02;
  double tol_sim = 0.10;
};

struct SweepConfig {
  std::string var = "c1";  // c1 | c2 | mu
  double from = 0.0;
  double to = 5.0;
  int steps = 101;
};

struct RunConfig {
  KernelConfig kernel;
  EnvConfig env1;
  EnvConfig env2;
  bool has_env2 = false;
  double mu = mu_infinity;
  SpeedConfig speed;
  HjConfig hj;
  SimConfig sim;
  ValidateConfig validate;
  SweepConfig sweep;
  long seed = 0;
};

// Strict parse: unknown keys anywhere raise ConfigError. Missing keys
// keep their defaults.
RunConfig parse_config(const json& j);
json to_json(const RunConfig& cfg);  // full echo, defaults resolved

// Apply a dotted-path override such as "sim.t_final=100".
void apply_override(json& j, const std::string& assignment);

DelayKernel build_kernel(const KernelConfig& kc);
ShiftedEnvironment build_env(const EnvConfig& ec);
RayProfile build_profile(const RunConfig& cfg);
ModelSpec build_model(const RunConfig& cfg);
InitialData build_initial(const RunConfig& cfg);
GridSpec build_grid(const RunConfig& cfg);
HjParams build_hj_params(const RunConfig& cfg);
SimParams build_sim_params(const RunConfig& cfg);

}  // namespace kpp::cli
