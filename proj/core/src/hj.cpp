#include "kpp/hj.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "kpp/errors.hpp"

namespace kpp {

namespace {

double legendre(const DispersionRelation& rel, double s) {
  const double p = rel.psi(s);
  return s * p - rel.lambda(p);
}

// Homogeneous self-similar profile for initial data mu x at t = 0.
double rho_hom(const DispersionRelation& rel, double mu, double s) {
  const auto ms = rel.mu_star();
  if (mu <= ms.mu_star) return std::max(0.0, mu * s - rel.lambda(mu));
  if (s >= rel.lambda_prime(mu)) return mu * s - rel.lambda(mu);
  if (s > ms.c_star) return legendre(rel, s);
  return 0.0;
}

template <typename F>
RaySolution sample_profile(const GridSpec& grid, const std::string& regime,
                           double s_hat, double mu_cap, F&& f) {
  RaySolution sol;
  sol.s_max = grid.s_max;
  sol.h = grid.h;
  sol.regime = regime;
  sol.s_hat = s_hat;
  sol.mu_cap = mu_cap;
  const int n = grid.cells();
  sol.rho.resize(n);
  for (int i = 0; i < n; ++i) sol.rho[i] = std::max(0.0, f(grid.s(i)));
  return sol;
}

}  // namespace

RaySolution rho_closed_form_homogeneous(const DispersionRelation& rel,
                                        double mu, const GridSpec& grid) {
  if (!(mu > 0.0)) throw RegimeError("rho_closed_form: mu must be positive");
  const auto ms = rel.mu_star();
  if (std::isfinite(mu) && mu <= ms.mu_star) {
    const double lam = rel.lambda(mu);
    return sample_profile(grid, "R22-mu", lam / mu, mu,
                          [&](double s) { return mu * s - lam; });
  }
  if (std::isfinite(mu)) {
    const double lam = rel.lambda(mu);
    const double knee = rel.lambda_prime(mu);
    return sample_profile(grid, "R22-inf", ms.c_star, mu, [&](double s) {
      if (s >= knee) return mu * s - lam;
      if (s >= ms.c_star) return legendre(rel, s);
      return 0.0;
    });
  }
  return sample_profile(grid, "R22-inf", ms.c_star, mu, [&](double s) {
    return s > ms.c_star ? legendre(rel, s) : 0.0;
  });
}

RaySolution rho_closed_form_single_shift(const DispersionRelation& rel_minus,
                                         const DispersionRelation& rel_plus,
                                         double c1, double mu,
                                         const GridSpec& grid,
                                         const std::string& expected_regime) {
  const SpeedResult sr = speed_single_shift(rel_minus, rel_plus, c1, mu);
  if (!expected_regime.empty() && sr.regime != expected_regime)
    throw RegimeError("rho_closed_form: parameters fall in regime " +
                      sr.regime + ", not " + expected_regime);

  const auto msp = rel_plus.mu_star();
  const auto msm = rel_minus.mu_star();
  const std::string& rg = sr.regime;

  if (rg == "1.18-i") {
    const double lam = rel_plus.lambda(mu);
    return sample_profile(grid, rg, sr.s_hat, mu,
                          [&](double s) { return mu * s - lam; });
  }
  if (rg == "1.20-i") {
    const double lam = rel_plus.lambda(mu);
    const double knee = rel_plus.lambda_prime(mu);
    return sample_profile(grid, rg, sr.s_hat, mu, [&](double s) {
      if (s >= knee) return mu * s - lam;
      if (s >= msp.c_star) return legendre(rel_plus, s);
      return 0.0;
    });
  }
  if (rg == "1.22-i") {
    return sample_profile(grid, rg, sr.s_hat, mu, [&](double s) {
      return s > msp.c_star ? legendre(rel_plus, s) : 0.0;
    });
  }
  if (rg == "1.18-ii" || rg == "1.20-iii") {
    const double p = *sr.underline_p;
    const double lam_p = rel_plus.lambda(mu);
    const double lam_m = rel_minus.lambda(p);
    return sample_profile(grid, rg, sr.s_hat, mu, [&](double s) {
      return s >= c1 ? mu * s - lam_p : p * s - lam_m;
    });
  }
  if (rg == "1.20-ii") {
    const double pb = *sr.bar_p;
    const double lam_p = rel_plus.lambda(mu);
    const double lam_m = rel_minus.lambda(pb);
    const double knee = rel_plus.lambda_prime(mu);
    return sample_profile(grid, rg, sr.s_hat, mu, [&](double s) {
      if (s >= knee) return mu * s - lam_p;
      if (s >= c1) return legendre(rel_plus, s);
      return pb * s - lam_m;
    });
  }
  if (rg == "1.22-ii") {
    const double pb = *sr.bar_p;
    const double lam_m = rel_minus.lambda(pb);
    return sample_profile(grid, rg, sr.s_hat, mu, [&](double s) {
      return s >= c1 ? legendre(rel_plus, s) : pb * s - lam_m;
    });
  }
  if (rg == "1.20-iv" || rg == "1.22-iii") {
    const double pb = *sr.bar_p;
    const double lam_m = rel_minus.lambda(pb);
    const double knee_m = rel_minus.lambda_prime(pb);
    const bool finite = (rg == "1.20-iv");
    const double lam_p = finite ? rel_plus.lambda(mu) : 0.0;
    const double knee_p = finite ? rel_plus.lambda_prime(mu)
                                 : std::numeric_limits<double>::infinity();
    return sample_profile(grid, rg, sr.s_hat, mu, [&](double s) {
      if (finite && s >= knee_p) return mu * s - lam_p;
      if (s >= c1) return legendre(rel_plus, s);
      if (s >= knee_m) return pb * s - lam_m;
      if (s >= msm.c_star) return legendre(rel_minus, s);
      return 0.0;
    });
  }
  if (rg == "1.20-v" || rg == "1.18-iii") {
    const double p = *sr.underline_p;
    const double lam_p = rel_plus.lambda(mu);
    const double lam_m = rel_minus.lambda(p);
    const double knee_m = rel_minus.lambda_prime(p);
    return sample_profile(grid, rg, sr.s_hat, mu, [&](double s) {
      if (s >= c1) return mu * s - lam_p;
      if (s >= knee_m) return p * s - lam_m;
      if (s >= msm.c_star) return legendre(rel_minus, s);
      return 0.0;
    });
  }
  throw RegimeError("rho_closed_form: unhandled regime " + rg);
}

namespace {

// Per-segment relations plus breakpoint lookup, for fast Htilde(s, p)
// evaluation inside the marching loop.
struct SegmentedHamiltonian {
  std::vector<double> breaks;
  std::vector<DispersionRelation> rels;

  SegmentedHamiltonian(const RayProfile& profile, const DelayKernel& kernel)
      : breaks(profile.breakpoints()) {
    rels.reserve(profile.segments().size());
    for (const auto& seg : profile.segments())
      rels.emplace_back(seg.r1, seg.r2, kernel);
  }

  const DispersionRelation& at(double s) const {
    size_t k = std::upper_bound(breaks.begin(), breaks.end(), s) -
               breaks.begin();
    return rels[k];
  }
};

}  // namespace

RaySolution hj_solve(const RayProfile& profile, const DelayKernel& kernel,
                     double mu, const GridSpec& grid, const HjParams& params) {
  if (!(mu > 0.0)) throw RegimeError("hj_solve: mu must be positive");
  if (params.cfl > 0.5 || params.cfl <= 0.0)
    throw ConfigError("hj_solve: CFL number must lie in (0, 1/2]");
  if (!(params.t_final > 2.0 * params.t0))
    throw ConfigError("hj_solve: need t_final > 2 t0 for the defect check");
  if (!check_hypotheses(profile, kernel).positivity_ok)
    throw RegimeError("hj_solve: profile fails positivity");

  const SegmentedHamiltonian ham(profile, kernel);

  double mu_cap;
  if (std::isfinite(mu)) {
    mu_cap = mu;
  } else if (params.mu_cap_override > 0.0) {
    mu_cap = params.mu_cap_override;
  } else {
    double top = 0.0;
    for (const auto& rel : ham.rels)
      top = std::max(top, rel.mu_star().mu_star);
    mu_cap = std::max(10.0, 5.0 * top);
  }

  const double P = mu_cap + 1.0;
  double theta = 0.0;
  for (const auto& rel : ham.rels)
    theta = std::max(theta, std::abs(rel.lambda_prime(P)) + grid.s_max);
  if (!(theta > 0.0)) throw ConvergenceError("hj_solve: degenerate theta_LF");

  // The self-similar profile rho(s) = w(t, st) / t solves the obstacle
  // equation in logarithmic time sigma = log t,
  //   max{ d rho/d sigma + rho - s rho' + Htilde(s, rho'), -rho } = 0,
  // and w(t, x) = t rho(x / t) recovers the marching variable. Working
  // on the s grid keeps the spatial resolution fixed at h for the whole
  // run, whereas an x grid sized for t_final under-resolves early times.
  const double T = params.t_final;
  double t0 = params.t0;
  if (t0 <= 0.0) t0 = T * std::exp(-14.0);
  if (!(T > 2.0 * t0))
    throw ConfigError("hj_solve: need t_final > 2 t0 for the defect check");
  const double sigma_len = std::log(T / t0);

  const int n = grid.cells();
  const double h = grid.h;

  // The defect compares rho against its value one factor of two earlier
  // in t, i.e. w(T, x) against 2 w(T/2, x / 2). Once a full window
  // changes by less than stop_tol the iteration has converged and the
  // remaining sigma span cannot move the answer.
  const double stop_tol = 1e-10;

  const DispersionRelation& far = ham.rels.back();
  std::vector<const DispersionRelation*> seg(n);
  std::vector<double> sgrid(n);
  for (int i = 0; i < n; ++i) {
    sgrid[i] = grid.s(i);
    seg[i] = &ham.at(sgrid[i]);
  }

  // Steady right-edge slope: Psi_far at the boundary, capped by mu_cap
  // once the edge sits inside the linear region of the profile.
  const double s_edge = std::clamp(grid.s_max, far.mu_star().c_star,
                                   far.lambda_prime(P));
  const double ghost_slope = std::min(mu_cap, far.psi(s_edge));

  std::vector<double> rho(n), rn(n), rho_check;
  for (int i = 0; i < n; ++i) rho[i] = rho_hom(far, mu_cap, sgrid[i]);
  rho_check = rho;

  // Step size adapts to the largest characteristic speed seen on the
  // previous step; the 1.25 margin covers its growth within one step and
  // the worst case theta bound is the fallback for the first step.
  double defect = 0.0;
  double sigma = 0.0;
  double sigma_check = 0.0;
  double th_max_prev = theta;
  while (sigma < sigma_len) {
    if (sigma - sigma_check >= std::log(2.0)) {
      defect = 0.0;
      for (int i = 0; i < n; ++i)
        defect = std::max(defect, std::abs(rho[i] - rho_check[i]));
      if (defect < stop_tol) break;
      rho_check = rho;
      sigma_check = sigma;
    }
    const double th_step = std::min(theta, 1.25 * th_max_prev);
    const double dsig =
        std::min(params.cfl * h / th_step, sigma_len - sigma);
    double th_max = 1.0;
    for (int i = 0; i < n; ++i) {
      const double rl = (i > 0) ? rho[i - 1] : -rho[0];
      const double rr =
          (i + 1 < n) ? rho[i + 1] : rho[i] + ghost_slope * h;
      const double dm = std::clamp((rho[i] - rl) / h, -P, P);
      const double dp = std::clamp((rr - rho[i]) / h, -P, P);
      const double pm = 0.5 * (dm + dp);
      const double s = sgrid[i];
      const DispersionRelation& rel = *seg[i];
      // Local Lax-Friedrichs: the convexity of lambda puts the largest
      // characteristic speed at the endpoint slopes.
      const double th_loc = std::max(std::abs(rel.lambda_prime(dm) - s),
                                     std::abs(rel.lambda_prime(dp) - s));
      th_max = std::max(th_max, th_loc);
      const double gval =
          rho[i] - s * pm + rel.lambda(pm) - 0.5 * th_loc * (dp - dm);
      rn[i] = std::max(0.0, rho[i] - dsig * gval);
    }
    th_max_prev = th_max;
    rho.swap(rn);
    sigma += dsig;
  }

  for (int i = 0; i < n; ++i)
    defect = std::max(defect, std::abs(rho[i] - rho_check[i]));

  RaySolution sol;
  sol.s_max = grid.s_max;
  sol.h = grid.h;
  sol.regime = "numeric";
  sol.mu_cap = mu_cap;
  sol.self_sim_defect = defect;
  sol.rho = rho;
  sol.s_hat = free_boundary(sol, 0.0, &sol.no_zero_flag, &sol.short_grid_flag);

  if (sol.self_sim_defect > params.defect_tol)
    throw ConvergenceError("hj_solve: self-similarity defect " +
                           std::to_string(sol.self_sim_defect) +
                           " above tolerance; increase t_final");
  return sol;
}

double free_boundary(const RaySolution& sol, double zero_tol,
                     bool* no_zero_flag, bool* short_grid_flag) {
  const int n = (int)sol.rho.size();
  if (no_zero_flag) *no_zero_flag = false;
  if (short_grid_flag) *short_grid_flag = false;
  if (n < 2) throw ConfigError("free_boundary: grid too small");
  const double tol = (zero_tol > 0.0) ? zero_tol : 10.0 * sol.h;

  if (sol.rho[0] > tol) {
    if (no_zero_flag) *no_zero_flag = true;
    return 0.0;
  }
  int j = 0;
  while (j < n && sol.rho[j] <= tol) ++j;
  if (j == n) {
    if (short_grid_flag) *short_grid_flag = true;
    return sol.s_max;
  }

  // Interpolate the tol crossing, then remove the level bias by sliding
  // down the local slope. The slope is measured a couple of cells above
  // the crossing, past the smeared corner of a numeric solution.
  const double level = std::max(tol, std::min(0.05, 0.5 * sol.rho[n - 1]));
  int jl = j;
  while (jl < n && sol.rho[jl] <= level) ++jl;
  if (jl == n) jl = n - 1;
  const int lo = std::max(jl - 1, 0);
  const double drop = sol.rho[jl] - sol.rho[lo];
  double s_cross = sol.s(jl);
  if (drop > 0.0)
    s_cross = sol.s(lo) + (level - sol.rho[lo]) / drop * sol.h;

  const int a = std::min(jl + 1, n - 2);
  const int b = std::min(a + 2, n - 1);
  double slope = (sol.rho[b] - sol.rho[a]) / ((b - a) * sol.h);
  if (!(slope > 0.0)) slope = drop > 0.0 ? drop / sol.h : 1.0;

  const double root = s_cross - level / slope;
  return std::clamp(root, 0.0, s_cross);
}

ResidualStats viscosity_residual(const RaySolution& sol,
                                 const RayProfile& profile,
                                 const DelayKernel& kernel) {
  const int n = (int)sol.rho.size();
  ResidualStats st;
  if (n < 3) return st;
  const double h = sol.h;

  // Kinks announce themselves in the undivided second difference: O(h^2)
  // where rho is C^2, O(h) times the slope jump at a corner.
  std::vector<char> kink(n, 0);
  for (int i = 1; i + 1 < n; ++i) {
    const double d2 = sol.rho[i + 1] - 2.0 * sol.rho[i] + sol.rho[i - 1];
    if (std::abs(d2) > 10.0 * h * h) kink[i] = 1;
  }

  for (int i = 1; i + 1 < n; ++i) {
    bool masked = false;
    for (int k = std::max(0, i - 3); k <= std::min(n - 1, i + 3); ++k)
      if (kink[k]) masked = true;
    if (masked) {
      ++st.kink_cells_excluded;
      continue;
    }
    const double s = sol.s(i);
    const double p = (sol.rho[i + 1] - sol.rho[i - 1]) / (2.0 * h);
    const double q = sol.rho[i] - s * p;
    const auto [r1, r2] = profile.eval(s, Envelope::upper);
    double g = q + p * p + r1;
    if (r2 != 0.0) g += r2 * kernel.mgf(p, q);
    const double defect = std::abs(std::min(sol.rho[i], g));
    st.max_defect = std::max(st.max_defect, defect);
    st.l1_defect += defect * h;
    ++st.cells_checked;
  }
  return st;
}

}  // namespace kpp
