// End-to-end acceptance checks: each criterion prints one PASS/FAIL line.
// The three computation routes (closed-form speed tables, the reduced
// Hamilton-Jacobi obstacle solver, and direct simulation of the
// reaction-diffusion model) are cross-validated against each other.

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "kpp/dispersion.hpp"
#include "kpp/environment.hpp"
#include "kpp/hj.hpp"
#include "kpp/kernel.hpp"
#include "kpp/simulate.hpp"
#include "kpp/speeds.hpp"

using namespace kpp;

namespace {

int g_failures = 0;

void report(int idx, const char* name, bool ok, const std::string& detail) {
  std::printf("criterion %d (%s): %s — %s\n", idx, name,
              ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

ModelSpec fisher_model(ShiftedEnvironment env) {
  ModelSpec m;
  m.f1 = ModelSpec::F1::fisher;
  m.env1 = std::move(env);
  return m;
}

InitialData bump_ic() {
  InitialData ic;
  ic.kind = InitialData::Kind::bump;
  ic.amplitude = 0.5;
  ic.width = 10.0;
  return ic;
}

// Grid-level monotonicity / shape invariants demanded of every profile
// rho(s) the solver produces (used by criterion 7, collected everywhere).
bool ray_invariants_hold(const RaySolution& sol) {
  const int n = static_cast<int>(sol.rho.size());
  if (sol.rho[0] > 10.0 * sol.h) return false;
  for (int i = 1; i < n; ++i) {
    if (sol.rho[i] < sol.rho[i - 1] - sol.h) return false;
    if (sol.rho[i] < 0.0) return false;
  }
  for (int i = 1; i + 1 < n; ++i) {
    double a = sol.rho[i - 1] / sol.s(i - 1);
    double b = sol.rho[i] / sol.s(i);
    double c = sol.rho[i + 1] / sol.s(i + 1);
    if (b > std::max(a, c) + 10.0 * sol.h) return false;
  }
  return true;
}

bool g_all_ray_invariants = true;
int g_ray_solutions_checked = 0;

RaySolution hj_checked(const RayProfile& profile, const DelayKernel& kernel,
                       double mu, const GridSpec& grid) {
  auto sol = hj_solve(profile, kernel, mu, grid);
  g_all_ray_invariants = g_all_ray_invariants && ray_invariants_hold(sol);
  ++g_ray_solutions_checked;
  return sol;
}

// --- criterion 1: homogeneous speed, three routes ------------------------

void criterion1() {
  DispersionRelation rel(1.0, 0.0, DelayKernel::none());
  bool exact_ok = true;
  for (double mu = 0.05; mu < 1.0; mu += 0.02) {
    double want = mu + 1.0 / mu;
    if (std::abs(speed_homogeneous(rel, mu).s_hat - want) >
        1e-14 * want)
      exact_ok = false;
  }
  for (double mu : {1.0, 1.7, 4.0, mu_infinity}) {
    if (std::abs(speed_homogeneous(rel, mu).s_hat - 2.0) > 1e-11)
      exact_ok = false;
  }

  SimParams params;  // [-50, 450], dx = 0.2, T = 200
  auto sim = simulate(fisher_model(ShiftedEnvironment(1.0)), bump_ic(),
                      params);
  double c_sim = estimate_speed(sim.trace, 130.0, 200.0).c_hat;

  auto hj = hj_checked(RayProfile::constant(1.0), DelayKernel::none(),
                       mu_infinity, GridSpec{6.0, 0.005});

  bool ok = exact_ok && std::abs(c_sim - 2.0) / 2.0 <= 0.05 &&
            std::abs(hj.s_hat - 2.0) <= 0.02;
  report(1, "homogeneous speed, three routes", ok,
         fmt("formula exact=%s, simulated c=%.4f (target 2 within 5%%), "
             "HJ s_hat=%.4f (within 0.02)",
             exact_ok ? "yes" : "no", c_sim, hj.s_hat));
}

// --- criterion 2: single shift, compactly supported data -----------------

void criterion2() {
  DispersionRelation rm(0.25, 0.0, DelayKernel::none());
  DispersionRelation rp(1.0, 0.0, DelayKernel::none());
  const double b1 = 2.0;                          // 2 sqrt(r2)
  const double b2 = 1.0 + 2.0 * std::sqrt(0.75);  // 2 sqrt(r1) + 2 sqrt(r2-r1)

  // Printed three-branch curve, sampled at 200 points on [0, 5].
  bool formula_ok = true;
  for (int i = 0; i < 200; ++i) {
    double c1 = 5.0 * (i + 0.5) / 200.0;
    double want;
    if (c1 <= b1) {
      want = 2.0;
    } else if (c1 < b2) {
      double p = 0.5 * c1 - std::sqrt(0.75);
      want = p + 0.25 / p;
    } else {
      want = 1.0;
    }
    if (std::abs(speed_single_shift(rm, rp, c1, mu_infinity).s_hat - want) >
        1e-9)
      formula_ok = false;
  }

  bool cont_ok = true;
  for (double b : {b1, b2}) {
    double lo = speed_single_shift(rm, rp, b - 1e-10, mu_infinity).s_hat;
    double hi = speed_single_shift(rm, rp, b + 1e-10, mu_infinity).s_hat;
    if (std::abs(hi - lo) > 1e-8) cont_ok = false;
  }

  double s_mid = speed_single_shift(rm, rp, 2.5, mu_infinity).s_hat;
  // Exact value 1.03505934; the quoted 7-digit anchor is rounded a touch
  // low, so allow half a unit in its last digit.
  bool anchor_ok = std::abs(s_mid - 1.0350590) <= 5e-7;

  // Simulation: rate ramp 0.25 -> 1 (tanh, width 2) shifting at c1 = 2.5.
  ShiftedEnvironment env(0.0);
  env.add_term({2.5, ProfileTerm::Shape::tanh_ramp, 0.25, 1.0, 2.0});
  SimParams params;
  auto sim = simulate(fisher_model(env), bump_ic(), params);
  double c_sim = estimate_speed(sim.trace, 130.0, 200.0).c_hat;

  auto hj = hj_checked(RayProfile::piecewise({2.5}, {{0.25, 0.0}, {1.0, 0.0}}),
                       DelayKernel::none(), mu_infinity, GridSpec{6.0, 0.005});

  bool ok = formula_ok && cont_ok && anchor_ok &&
            std::abs(c_sim - s_mid) / s_mid <= 0.10 &&
            std::abs(hj.s_hat - s_mid) <= 0.02;
  report(2, "single-shift speed, three routes", ok,
         fmt("3-branch formula=%s, continuity=%s, s(2.5)=%.7f, "
             "simulated c=%.4f (within 10%%), HJ s_hat=%.4f (within 0.02)",
             formula_ok ? "1e-9" : "off", cont_ok ? "1e-8" : "off", s_mid,
             c_sim, hj.s_hat));
}

// --- criterion 3: pulled-speed formula consistency ------------------------

void criterion3() {
  DispersionRelation rm(0.25, 0.0, DelayKernel::none());
  DispersionRelation rp(1.0, 0.0, DelayKernel::none());
  double worst = 0.0;
  for (double c1 = 0.0; c1 <= 5.0 + 1e-12; c1 += 0.01) {
    double a = speed_nonlocal_pulling(0.25, 1.0, c1);
    double b = speed_single_shift(rm, rp, c1, mu_infinity).s_hat;
    worst = std::max(worst, std::abs(a - b));
  }
  report(3, "pulled-speed display formula vs case dispatch", worst <= 1e-12,
         fmt("max |difference| = %.3e over c1 in [0,5] (tol 1e-12)", worst));
}

// --- criterion 4: exponential initial data --------------------------------

void criterion4() {
  InitialData ic;
  ic.kind = InitialData::Kind::exponential;
  ic.mu = 0.5;
  ic.amplitude = 0.5;

  SimParams params;
  params.t_final = 150.0;
  params.x_hi = 500.0;
  params.nx = 2751;
  auto sim = simulate(fisher_model(ShiftedEnvironment(1.0)), ic, params);
  double c_sim = estimate_speed(sim.trace, 100.0, 150.0).c_hat;
  double mu_fit = fit_decay_rate(sim);

  bool ok = std::abs(c_sim - 2.5) / 2.5 <= 0.05 &&
            std::abs(mu_fit - 0.5) / 0.5 <= 0.10;
  report(4, "exponential data: speed and tail decay", ok,
         fmt("simulated c=%.4f (target 2.5 within 5%%), fitted decay "
             "rate=%.4f (target 0.5 within 10%%)",
             c_sim, mu_fit));
}

// --- criterion 5: delayed nonlocal model -----------------------------------

void criterion5() {
  auto pm = DelayKernel::point_mass(1.0, 0.0);
  DispersionRelation rel(-0.5, 1.5, pm);
  double c_star = speed_homogeneous(rel, mu_infinity).s_hat;

  // Independent oracle: bisection on the implicit growth rate
  // g(lam) = -lam + p^2 - 0.5 + 1.5 exp(-lam), then golden-section
  // minimization of lam(p)/p.
  auto lam_oracle = [](double p) {
    auto g = [&](double lam) {
      return -lam + p * p - 0.5 + 1.5 * std::exp(-lam);
    };
    double lo = -5.0, hi = 5.0 + p * p;
    while (g(hi) > 0.0) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      (g(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  double residual = 0.0;
  for (double p : {0.3, 0.8, 1.5, 3.0}) {
    double lam = lam_oracle(p);
    residual = std::max(residual, std::abs(-lam + p * p - 0.5 +
                                           1.5 * std::exp(-lam)));
  }
  double a = 1e-3, b = 10.0;
  constexpr double invphi = 0.6180339887498949;
  double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
  auto ratio = [&](double p) { return lam_oracle(p) / p; };
  double f1 = ratio(x1), f2 = ratio(x2);
  while (b - a > 1e-12) {
    if (f1 < f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - invphi * (b - a); f1 = ratio(x1);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + invphi * (b - a); f2 = ratio(x2);
    }
  }
  double c_oracle = ratio(0.5 * (a + b));
  bool oracle_ok = residual <= 1e-10 && std::abs(c_star - c_oracle) <= 1e-7;

  ModelSpec model;
  model.f1 = ModelSpec::F1::linear_death;
  model.death_rate = 0.5;
  model.f2 = ModelSpec::F2::ricker;
  model.env2 = ShiftedEnvironment(1.5);
  model.kernel = pm;
  SimParams params;
  params.t_final = 150.0;
  params.x_hi = 300.0;
  params.nx = 1751;
  params.theta = 0.05;
  auto sim = simulate(model, bump_ic(), params);
  double c_sim = estimate_speed(sim.trace, 100.0, 150.0).c_hat;

  auto hj = hj_checked(RayProfile::constant(-0.5, 1.5), pm, mu_infinity,
                       GridSpec{6.0, 0.01});

  bool ok = oracle_ok && std::abs(c_sim - c_star) / c_star <= 0.10 &&
            std::abs(hj.s_hat - c_star) <= 0.03;
  report(5, "delayed model, three routes", ok,
         fmt("analytic c=%.6f (oracle %.6f, residual %.1e), simulated "
             "c=%.4f (within 10%%), HJ s_hat=%.4f (within 0.03)",
             c_star, c_oracle, residual, c_sim, hj.s_hat));
}

// --- criterion 6: two shifts ------------------------------------------------

void criterion6() {
  const double r1 = 0.25, r2 = 0.5;
  double s_a = speed_two_shift_kpp(r1, r2, 2.2, 1.5).s_hat;
  double s_b = speed_two_shift_kpp(r1, r2, 1.8, 1.5).s_hat;
  bool anchors_ok =
      std::abs(s_a - 1.665504) <= 1e-6 && std::abs(s_b - 2.0) <= 1e-12;

  // Continuity at every case boundary: scan the sweeps for case-label
  // changes, bisect each boundary, then compare the two one-sided values.
  bool cont_ok = true;
  auto check_boundary = [&](auto eval, double lo, double hi) {
    // eval(x) -> SpeedResult; lo/hi bracket one label change.
    auto lo_label = eval(lo).regime;
    for (int it = 0; it < 60; ++it) {
      double mid = 0.5 * (lo + hi);
      (eval(mid).regime == lo_label ? lo : hi) = mid;
    }
    double jump = std::abs(eval(hi).s_hat - eval(lo).s_hat);
    if (jump > 1e-8) cont_ok = false;
  };
  auto scan = [&](auto eval, double from, double to) {
    double step = 0.002;
    auto prev = eval(from);
    for (double x = from + step; x <= to; x += step) {
      auto cur = eval(x);
      if (cur.regime != prev.regime) check_boundary(eval, x - step, x);
      prev = cur;
    }
  };
  for (double c2 : {0.8, 1.2, 1.5, 2.5}) {
    scan([&](double c1) { return speed_two_shift_kpp(r1, r2, c1, c2); },
         c2 + 0.011, 6.0);
  }
  for (double c1 : {2.1, 2.5, 3.0, 4.0}) {
    scan([&](double c2) { return speed_two_shift_kpp(r1, r2, c1, c2); },
         0.012, c1 - 0.005);
  }

  // Blended environment: 0.25 far behind, 0.5 between the two ramps, 1
  // far ahead, ramps shifting at c2 = 1.5 and c1 = 2.2.
  ShiftedEnvironment env(0.25);
  env.add_term({1.5, ProfileTerm::Shape::tanh_ramp, 0.0, 0.25, 2.0});
  env.add_term({2.2, ProfileTerm::Shape::tanh_ramp, 0.0, 0.50, 2.0});
  SimParams params;
  auto sim = simulate(fisher_model(env), bump_ic(), params);
  double c_sim = estimate_speed(sim.trace, 130.0, 200.0).c_hat;

  bool ok = anchors_ok && cont_ok && std::abs(c_sim - s_a) / s_a <= 0.10;
  report(6, "two-shift table and blended simulation", ok,
         fmt("s(2.2,1.5)=%.6f, s(1.8,1.5)=%.3f, case-boundary "
             "continuity=%s, simulated c=%.4f (within 10%%)",
             s_a, s_b, cont_ok ? "1e-8" : "off", c_sim));
}

// --- criterion 7: property suites -------------------------------------------

void criterion7() {
  std::mt19937 rng(20240817);
  std::uniform_real_distribution<double> rate(0.1, 2.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> pbox(-3.0, 3.0);

  bool dispersion_ok = true;
  for (int trial = 0; trial < 100; ++trial) {
    DelayKernel k = DelayKernel::none();
    double r2 = 0.0;
    int pick = trial % 3;
    if (pick == 1) {
      k = DelayKernel::point_mass(0.1 + 2.0 * unit(rng),
                                  2.0 * unit(rng) - 1.0);
      r2 = rate(rng);
    } else if (pick == 2) {
      k = DelayKernel::uniform_box(0.1 + unit(rng), 0.5 + unit(rng), 8, 17);
      r2 = rate(rng);
    }
    double ra = rate(rng), rb = rate(rng);
    double r_minus = std::min(ra, rb), r_plus = std::max(ra, rb) + 0.05;
    DispersionRelation dm(r_minus, r2, k);
    DispersionRelation dp(r_plus, r2, k);
    for (int j = 0; j < 6; ++j) {
      double p = pbox(rng), q = pbox(rng);
      double lam = dm.lambda(p);
      // Residual of the defining relation.
      double res = -lam + p * p + r_minus +
                   (k.absent() ? 0.0 : r2 * k.mgf(p, -lam));
      if (std::abs(res) > 1e-12) dispersion_ok = false;
      // Evenness requires a symmetric kernel; check via -p only for none.
      if (k.absent() && std::abs(lam - dm.lambda(-p)) > 1e-12)
        dispersion_ok = false;
      // Midpoint convexity.
      double mid = dm.lambda(0.5 * (p + q));
      if (mid > 0.5 * (dm.lambda(p) + dm.lambda(q)) + 1e-10)
        dispersion_ok = false;
      // Ordering.
      if (dm.lambda(p) >= dp.lambda(p)) dispersion_ok = false;
    }
    if (dm.mu_star().c_star >= dp.mu_star().c_star) dispersion_ok = false;
  }

  // Residual refinement (rate per halving, measured across 4x).
  auto profile = RayProfile::constant(1.0);
  auto n1 = hj_checked(profile, DelayKernel::none(), mu_infinity,
                       GridSpec{6.0, 0.04});
  auto n2 = hj_checked(profile, DelayKernel::none(), mu_infinity,
                       GridSpec{6.0, 0.01});
  auto d1 = viscosity_residual(n1, profile, DelayKernel::none());
  auto d2 = viscosity_residual(n2, profile, DelayKernel::none());
  double rate_meas = 0.5 * std::log2(d1.max_defect / d2.max_defect);

  // Obstacle sandwich over a 50x50 single-shift lattice (formula route).
  DispersionRelation rm(0.25, 0.0, DelayKernel::none());
  DispersionRelation rp(1.0, 0.0, DelayKernel::none());
  bool sandwich_ok = true;
  for (int i = 0; i < 50; ++i) {
    double mu = 0.05 + 0.06 * i;
    for (int j = 0; j < 50; ++j) {
      double c1 = 0.1 + 0.1 * j;
      double s = speed_single_shift(rm, rp, c1, mu).s_hat;
      if (s < 1.0 - 1e-9 || s > std::max(2.0, mu + 1.0 / mu) + 1e-9)
        sandwich_ok = false;
    }
  }

  // mu-cap insensitivity.
  GridSpec grid{6.0, 0.01};
  HjParams cap10, cap20;
  cap10.mu_cap_override = 10.0;
  cap20.mu_cap_override = 20.0;
  auto a = hj_solve(profile, DelayKernel::none(), mu_infinity, grid, cap10);
  auto b = hj_solve(profile, DelayKernel::none(), mu_infinity, grid, cap20);
  double cap_diff = std::abs(a.s_hat - b.s_hat);

  bool ok = dispersion_ok && g_all_ray_invariants && rate_meas >= 0.8 &&
            sandwich_ok && cap_diff <= 2.0 * grid.h;
  report(7, "property suites", ok,
         fmt("dispersion invariants over 100 random relations=%s, profile "
             "invariants on %d solver outputs=%s, residual refinement "
             "rate=%.2f (>=0.8), sandwich 50x50=%s, cap sensitivity=%.4f "
             "(<=%.2f)",
             dispersion_ok ? "ok" : "violated", g_ray_solutions_checked,
             g_all_ray_invariants ? "ok" : "violated", rate_meas,
             sandwich_ok ? "ok" : "violated", cap_diff, 2.0 * grid.h));
}

// --- criterion 8: scope statement -------------------------------------------

void criterion8() {
  report(8, "validation scope", g_failures == 0,
         "the long-time limit statements cannot be executed directly; "
         "acceptance rests on the explicit speed tables, closed-form vs "
         "numeric profile oracle matches, and the three-route agreement "
         "checked above");
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
