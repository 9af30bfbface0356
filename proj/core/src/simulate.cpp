#include "kpp/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "kpp/errors.hpp"
#include "kpp/speeds.hpp"

namespace kpp {

double ModelSpec::f1_value(double t, double x, double u) const {
  switch (f1) {
    case F1::fisher:
      return u * (env1.realize(t, x) - u);
    case F1::linear_death:
      return -death_rate * u;
  }
  return 0.0;
}

double ModelSpec::f2_value(double t, double x, double v) const {
  switch (f2) {
    case F2::none:
      return 0.0;
    case F2::ricker:
      return env2.realize(t, x) * v * std::exp(-v);
  }
  return 0.0;
}

bool ModelSpec::saturation_holds(double L, double t_max, double x_max) const {
  double worst1 = -std::numeric_limits<double>::infinity();
  double worst2 = 0.0;
  const int nt = 25, nx = 41;
  for (int it = 0; it <= nt; ++it) {
    const double t = t_max * it / nt;
    for (int ix = 0; ix <= nx; ++ix) {
      const double x = -x_max + 2.0 * x_max * ix / nx;
      worst1 = std::max(worst1, f1_value(t, x, L));
      worst2 = std::max(worst2, f2_value(t, x, L));
    }
  }
  return worst1 + worst2 <= 1e-12;
}

double InitialData::value(double x) const {
  if (kind == Kind::exponential)
    return amplitude * std::min(1.0, std::exp(-mu * x));
  if (std::abs(x) >= 0.5 * width) return 0.0;
  const double c = std::cos(M_PI * x / width);
  return amplitude * c * c;
}

double InitialData::mu_or_inf() const {
  return kind == Kind::exponential ? mu : mu_infinity;
}

namespace {

double interp_clamped(const std::vector<double>& u, double x, double x_lo,
                      double dx) {
  const double pos = (x - x_lo) / dx;
  if (pos <= 0.0) return u.front();
  if (pos >= (double)(u.size() - 1)) return u.back();
  const int i = (int)pos;
  const double f = pos - i;
  return (1.0 - f) * u[i] + f * u[i + 1];
}

// Tridiagonal solve for (1 + 2a) on the diagonal and -a off it, with the
// Neumann/Dirichlet boundary rows baked in. Thomas algorithm.
void solve_cn(std::vector<double>& rhs, double a, std::vector<double>& cwork) {
  const int n = (int)rhs.size();
  // Row 0: Neumann (u_{-1} = u_1): diag 1 + 2a, upper -2a.
  // Row n-1: Dirichlet u = 0.
  cwork[0] = -2.0 * a / (1.0 + 2.0 * a);
  rhs[0] = rhs[0] / (1.0 + 2.0 * a);
  for (int i = 1; i < n - 1; ++i) {
    const double m = (1.0 + 2.0 * a) + a * cwork[i - 1];
    cwork[i] = -a / m;
    rhs[i] = (rhs[i] + a * rhs[i - 1]) / m;
  }
  rhs[n - 1] = 0.0;
  for (int i = n - 2; i >= 0; --i) rhs[i] -= cwork[i] * rhs[i + 1];
}

double front_position(const std::vector<double>& u, double theta, double x_lo,
                      double dx) {
  for (int i = (int)u.size() - 1; i > 0; --i) {
    if (u[i - 1] >= theta && u[i] < theta) {
      const double f = (u[i - 1] - theta) / (u[i - 1] - u[i]);
      return x_lo + (i - 1 + f) * dx;
    }
  }
  if (u.back() >= theta) return x_lo + (u.size() - 1) * dx;
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

SimResult simulate(const ModelSpec& model, const InitialData& ic,
                   const SimParams& params) {
  const int nx = params.nx;
  if (nx < 10) throw ConfigError("simulate: nx too small");
  const double dx = (params.x_hi - params.x_lo) / (nx - 1);
  double dt = params.dt;
  if (dt <= 0.0) dt = params.crank_nicolson ? 0.25 * dx : 0.35 * dx * dx;
  if (!params.crank_nicolson && dt > 0.4 * dx * dx)
    throw ConfigError("simulate: dt violates the explicit diffusion CFL");

  const bool delayed =
      model.f2 != ModelSpec::F2::none && !model.kernel.atoms().empty();
  double tau0 = 0.0;
  for (const auto& atom : model.kernel.atoms())
    tau0 = std::max(tau0, atom.tau);
  // At least two slices so the update never aliases the slice it reads.
  const int hist_len = delayed ? std::max(2, (int)std::ceil(tau0 / dt) + 2) : 2;

  SimResult res;
  res.dt = dt;
  res.xgrid.resize(nx);
  for (int i = 0; i < nx; ++i) res.xgrid[i] = params.x_lo + i * dx;

  std::vector<std::vector<double>> hist(hist_len, std::vector<double>(nx));
  for (int i = 0; i < nx; ++i) hist[0][i] = ic.value(res.xgrid[i]);
  hist[0][nx - 1] = 0.0;
  for (int k = 1; k < hist_len; ++k) hist[k] = hist[0];
  int head = 0;  // hist[(head - k) mod] is the slice k steps back

  double phi_max = 0.0;
  for (double v : hist[0]) phi_max = std::max(phi_max, v);
  const double blowup = 2.0 * std::max(model.L0, phi_max);

  // Per-atom lookback: slice offsets and interpolation weights in tau.
  struct AtomPlan {
    int k0, k1;
    double w0, w1;
    double y, weight;
  };
  std::vector<AtomPlan> plan;
  if (delayed) {
    for (const auto& atom : model.kernel.atoms()) {
      AtomPlan ap;
      const double kf = atom.tau / dt;
      const int knear = (int)std::lround(kf);
      if (std::abs(kf - knear) < 1e-6) {
        ap.k0 = ap.k1 = std::max(1, knear);
        ap.w0 = 1.0;
        ap.w1 = 0.0;
      } else {
        ap.k0 = std::max(1, (int)kf);
        ap.k1 = ap.k0 + 1;
        ap.w1 = kf - std::floor(kf);
        ap.w0 = 1.0 - ap.w1;
      }
      ap.y = atom.y;
      ap.weight = atom.weight;
      plan.push_back(ap);
    }
  }

  const int total_steps = (int)std::ceil(params.t_final / dt);
  const int snap_every =
      std::max(1, total_steps / std::max(1, params.snapshot_count - 1));
  const int trace_every = std::max(1, (int)std::lround(0.25 / dt));

  res.snapshots.push_back({0.0, hist[head]});
  res.trace.theta = params.theta;

  std::vector<double> rhs(nx), cwork(nx), reaction(nx);
  const double a_cn = 0.5 * dt / (dx * dx);

  for (int step = 1; step <= total_steps; ++step) {
    const double t = (step - 1) * dt;  // time level of the current slice
    const std::vector<double>& u = hist[head];

    for (int i = 0; i < nx; ++i) {
      double f = model.f1_value(t, res.xgrid[i], u[i]);
      if (delayed) {
        for (const auto& ap : plan) {
          auto past = [&](int k) -> const std::vector<double>& {
            return hist[((head - k) % hist_len + hist_len) % hist_len];
          };
          double v = ap.w0 * interp_clamped(past(ap.k0), res.xgrid[i] - ap.y,
                                            params.x_lo, dx);
          if (ap.w1 > 0.0)
            v += ap.w1 * interp_clamped(past(ap.k1), res.xgrid[i] - ap.y,
                                        params.x_lo, dx);
          f += ap.weight *
               model.f2_value(t - ap.k0 * dt * ap.w0 - ap.k1 * dt * ap.w1,
                              res.xgrid[i] - ap.y, v);
        }
      }
      reaction[i] = f;
    }

    head = (head + 1) % hist_len;
    std::vector<double>& un = hist[head];

    if (params.crank_nicolson) {
      for (int i = 0; i < nx; ++i) {
        const double ul = (i > 0) ? u[i - 1] : u[1];
        const double ur = (i + 1 < nx) ? u[i + 1] : 0.0;
        rhs[i] = u[i] + a_cn * (ul - 2.0 * u[i] + ur) + dt * reaction[i];
      }
      solve_cn(rhs, a_cn, cwork);
      un = rhs;
    } else {
      for (int i = 0; i < nx; ++i) {
        const double ul = (i > 0) ? u[i - 1] : u[1];
        const double ur = (i + 1 < nx) ? u[i + 1] : 0.0;
        un[i] = u[i] + dt * ((ul - 2.0 * u[i] + ur) / (dx * dx) + reaction[i]);
      }
      un[nx - 1] = 0.0;
    }

    for (int i = 0; i < nx; ++i) {
      if (un[i] < 0.0) {
        if (un[i] < -1e-14) ++res.clamp_count;
        un[i] = 0.0;
      }
      res.u_max_seen = std::max(res.u_max_seen, un[i]);
    }
    res.cell_steps += nx;
    if (res.u_max_seen > blowup)
      throw ConvergenceError("simulate: solution exceeded the saturation "
                             "guard, likely a scheme instability");

    const double tn = step * dt;
    if (step % trace_every == 0 || step == total_steps) {
      const double xf = front_position(un, params.theta, params.x_lo, dx);
      if (std::isfinite(xf)) {
        if (xf > params.x_hi - 20.0 * dx)
          throw ConvergenceError("simulate: front reached the right "
                                 "boundary; widen the domain");
        res.trace.t.push_back(tn);
        res.trace.x.push_back(xf);
      }
    }
    if (step % snap_every == 0 || step == total_steps)
      res.snapshots.push_back({tn, un});
  }
  return res;
}

SpeedFit estimate_speed(const FrontTrace& trace, double t_a, double t_b) {
  SpeedFit fit;
  double st = 0, sx = 0, stt = 0, stx = 0;
  std::vector<int> idx;
  for (size_t i = 0; i < trace.t.size(); ++i)
    if (trace.t[i] >= t_a && trace.t[i] <= t_b) idx.push_back((int)i);
  fit.samples = (int)idx.size();
  if (fit.samples < 10)
    throw ConfigError("estimate_speed: fewer than 10 trace samples in window");
  for (int i : idx) {
    st += trace.t[i];
    sx += trace.x[i];
    stt += trace.t[i] * trace.t[i];
    stx += trace.t[i] * trace.x[i];
  }
  const double n = fit.samples;
  const double denom = stt - st * st / n;
  fit.c_hat = (stx - st * sx / n) / denom;
  fit.intercept = (sx - fit.c_hat * st) / n;
  double ss = 0;
  for (int i : idx) {
    const double r = trace.x[i] - fit.c_hat * trace.t[i] - fit.intercept;
    ss += r * r;
  }
  fit.stderr_slope = std::sqrt(ss / std::max(1.0, n - 2.0) / denom);
  return fit;
}

DichotomyReport verify_dichotomy(const SimResult& sim, double s_hat,
                                 double eta, const std::vector<double>& t_check,
                                 double inner_threshold) {
  if (!(s_hat > 0.0) || !(eta > 0.0))
    throw ConfigError("verify_dichotomy: s_hat and eta must be positive");
  DichotomyReport rep;
  rep.degenerate_eta = (s_hat - eta <= 0.0);
  const double x_lo = sim.xgrid.front(), x_hi = sim.xgrid.back();
  const double dx = sim.xgrid[1] - sim.xgrid[0];
  for (double t : t_check) {
    if ((s_hat + eta) * t > x_hi)
      throw ConfigError("verify_dichotomy: check region outside the domain");
    const Snapshot* best = &sim.snapshots.front();
    for (const auto& snap : sim.snapshots)
      if (std::abs(snap.t - t) < std::abs(best->t - t)) best = &snap;
    const int i_out = (int)std::ceil(((s_hat + eta) * best->t - x_lo) / dx);
    double outer = 0.0;
    for (int i = std::max(0, i_out); i < (int)best->u.size(); ++i)
      outer = std::max(outer, best->u[i]);
    double inner = std::numeric_limits<double>::infinity();
    if (!rep.degenerate_eta) {
      const int i0 = (int)std::ceil((0.0 - x_lo) / dx);
      const int i1 = (int)std::floor(((s_hat - eta) * best->t - x_lo) / dx);
      for (int i = std::max(0, i0); i <= std::min((int)best->u.size() - 1, i1);
           ++i)
        inner = std::min(inner, best->u[i]);
    }
    rep.t.push_back(best->t);
    rep.outer.push_back(outer);
    rep.inner.push_back(inner);
  }
  if (!rep.outer.empty()) {
    rep.outer_decays = rep.outer.back() < 1e-3;
    rep.inner_persists =
        !rep.degenerate_eta && rep.inner.back() > inner_threshold;
  }
  return rep;
}

TailBoundReport tail_bound_check(const SimResult& sim, const InitialData& ic,
                                 double mu, double delta, double lambda_ref) {
  if (ic.kind != InitialData::Kind::exponential)
    throw ConfigError("tail_bound_check: needs exponential-tail initial data");
  TailBoundReport rep;
  for (const auto& snap : sim.snapshots) {
    if (snap.t <= 0.0) continue;
    for (size_t i = 0; i < sim.xgrid.size(); ++i) {
      const double x = sim.xgrid[i];
      if (x < 0.0 || snap.u[i] <= 1e-300) continue;
      const double w = -std::log(snap.u[i]);
      rep.q_lo = std::max(rep.q_lo, ((mu - delta) * x - w) / snap.t);
      rep.q_hi = std::max(rep.q_hi, (w - (mu + delta) * x) / snap.t);
      ++rep.samples_used;
    }
  }
  if (rep.samples_used < 100)
    throw ConvergenceError("tail_bound_check: usable region underflowed");
  rep.q_hi_construction = std::max(rep.q_hi, lambda_ref);
  rep.pass = std::isfinite(rep.q_lo) && std::isfinite(rep.q_hi);
  return rep;
}

double fit_decay_rate(const SimResult& sim, double u_hi, double u_lo) {
  const auto& snap = sim.snapshots.back();
  double sx = 0, sw = 0, sxx = 0, sxw = 0;
  long n = 0;
  for (size_t i = 0; i < sim.xgrid.size(); ++i) {
    if (snap.u[i] >= u_hi || snap.u[i] <= u_lo) continue;
    const double w = -std::log(snap.u[i]);
    sx += sim.xgrid[i];
    sw += w;
    sxx += sim.xgrid[i] * sim.xgrid[i];
    sxw += sim.xgrid[i] * w;
    ++n;
  }
  if (n < 10)
    throw ConvergenceError("fit_decay_rate: tail window has too few cells");
  return (sxw - sx * sw / n) / (sxx - sx * sx / n);
}

}  // namespace kpp
