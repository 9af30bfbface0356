#pragma once

#include <string>
#include <vector>

#include "kpp/dispersion.hpp"
#include "kpp/environment.hpp"
#include "kpp/speeds.hpp"

namespace kpp {

// Cell-centered grid on [0, s_max]: s_i = (i + 1/2) h. The half-cell
// offset keeps evaluation points off the profile breakpoints.
struct GridSpec {
  double s_max = 6.0;
  double h = 0.01;

  int cells() const { return static_cast<int>(s_max / h + 0.5); }
  double s(int i) const { return (i + 0.5) * h; }
};

// A gridded profile rho(s) of the reduced equation with its extracted
// free boundary.
struct RaySolution {
  double s_max = 0.0;
  double h = 0.0;
  std::vector<double> rho;
  double s_hat = 0.0;
  double mu_cap = 0.0;       // right-boundary slope actually used
  std::string regime;        // case label (closed forms)
  double self_sim_defect = 0.0;  // numeric runs, in rho units
  bool short_grid_flag = false;  // rho vanished everywhere
  bool no_zero_flag = false;     // rho exceeded the tolerance everywhere

  double s(int i) const { return (i + 0.5) * h; }
};

// Sample the closed-form viscosity solution on the grid. The regime is
// dispatched exactly as in the speed tables; pass expected_regime to
// assert a particular case (empty = auto).
RaySolution rho_closed_form_homogeneous(const DispersionRelation& rel,
                                        double mu, const GridSpec& grid);
RaySolution rho_closed_form_single_shift(const DispersionRelation& rel_minus,
                                         const DispersionRelation& rel_plus,
                                         double c1, double mu,
                                         const GridSpec& grid,
                                         const std::string& expected_regime = "");

struct HjParams {
  // Time window [t0, t_final]. The solver marches in sigma = log t, so
  // only the ratio t_final / t0 matters; it sets the sigma span. t0 = 0
  // selects the default span log(t_final / t0) = 14, and the run stops
  // early once rho stalls, so a generous span costs nothing on profiles
  // that converge quickly.
  double t0 = 0.0;
  double t_final = 16.0;
  double cfl = 0.45;            // dsigma * theta_LF / h, must stay <= 1/2
  double mu_cap_override = 0.0; // > 0 replaces the automatic cap
  double defect_tol = 0.05;     // self-similarity defect tolerance (rho units)
};

// Solve the obstacle problem min{w, w_t + Htilde(x/t, w_x)} = 0 with an
// explicit local Lax-Friedrichs Hamiltonian and projection onto w >= 0,
// starting from w growing like mu x (capped). The marching runs on the
// self-similar profile rho(s) = w(t, st) / t in logarithmic time, which
// keeps the resolution in s fixed at h for the whole run; the returned
// rho is its steady state.
RaySolution hj_solve(const RayProfile& profile, const DelayKernel& kernel,
                     double mu, const GridSpec& grid,
                     const HjParams& params = {});

// Largest grid s with rho <= zero_tol, refined by interpolating the first
// crossing back to zero. zero_tol <= 0 selects the default 10 * h.
double free_boundary(const RaySolution& sol, double zero_tol,
                     bool* no_zero_flag = nullptr, bool* short_grid_flag = nullptr);

struct ResidualStats {
  double max_defect = 0.0;
  double l1_defect = 0.0;
  int cells_checked = 0;
  int kink_cells_excluded = 0;
};

// Complementarity defect |min{rho, H(s, rho - s rho', rho')}| with
// centered differences, excluding a 3-cell neighborhood of detected kinks.
ResidualStats viscosity_residual(const RaySolution& sol,
                                 const RayProfile& profile,
                                 const DelayKernel& kernel);

}  // namespace kpp
