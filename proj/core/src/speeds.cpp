#include "kpp/speeds.hpp"

#include <algorithm>
#include <cmath>

#include "kpp/errors.hpp"
#include "kpp/rootfind.hpp"

namespace kpp {

namespace {
// Relative tolerance for branch dispatch at regime boundaries; the fired
// branch is recorded in SpeedResult::regime so disagreements near a
// boundary stay debuggable.
constexpr double kTieTol = 1e-12;

bool leq_tol(double a, double b) {
  return a <= b + kTieTol * std::max(1.0, std::abs(b));
}

// Polish a root of c1 p - lambda_-(p) = rhs with a few Newton steps; the
// derivative c1 - lambda'_-(p) is positive left of Psi_-(c1), so the
// bisection result converges quadratically to full precision.
template <typename F>
double polish_root(F&& f, const DispersionRelation& rel_minus, double c1,
                   double p) {
  for (int i = 0; i < 3; ++i) {
    const double d = c1 - rel_minus.lambda_prime(p);
    if (!(d > 0.0)) break;
    const double step = f(p) / d;
    if (!std::isfinite(step)) break;
    p -= step;
  }
  return p;
}
}  // namespace

SpeedResult speed_homogeneous(const DispersionRelation& rel, double mu) {
  if (!(mu > 0.0)) throw RegimeError("speed: mu must be positive");
  if (rel.r1() + rel.r2() <= 0.0)
    throw RegimeError("speed: homogeneous formula needs r1 + r2 > 0");
  auto [mu_star, c_star] = rel.mu_star();
  SpeedResult res;
  res.mu_star_plus = mu_star;
  res.c_star_plus = c_star;
  if (mu < mu_star) {
    res.s_hat = rel.lambda(mu) / mu;
    res.regime = "R22-mu";
  } else {
    res.s_hat = c_star;
    res.regime = "R22-inf";
  }
  return res;
}

double underline_p(const DispersionRelation& rel_minus,
                   const DispersionRelation& rel_plus, double c1, double mu) {
  if (!(std::isfinite(mu) && mu > 0.0))
    throw RegimeError("underline_p: mu must be finite and positive");
  const double rhs = c1 * mu - rel_plus.lambda(mu);
  auto f = [&](double p) { return c1 * p - rel_minus.lambda(p) - rhs; };
  // f is increasing on [0, Psi_-(c1)] and f(mu) = lambda_+(mu) -
  // lambda_-(mu) > 0, so the smallest root lies in (0, min(mu, Psi_-(c1))].
  double hi = std::min(mu, rel_minus.psi(c1));
  if (!(f(hi) > 0.0) || !(f(0.0) < 0.0))
    throw RegimeError("underline_p: no sign change (regime misuse)");
  return polish_root(f, rel_minus, c1, bisect(f, 0.0, hi, 1e-13, 1e-12));
}

double bar_p(const DispersionRelation& rel_minus,
             const DispersionRelation& rel_plus, double c1) {
  const double psi_plus = rel_plus.psi(c1);
  const double rhs = c1 * psi_plus - rel_plus.lambda(psi_plus);
  auto f = [&](double p) { return c1 * p - rel_minus.lambda(p) - rhs; };
  double hi = std::min(psi_plus, rel_minus.psi(c1));
  if (!(f(hi) > 0.0) || !(f(0.0) < 0.0))
    throw RegimeError("bar_p: no sign change (c1 <= c*_+ ?)");
  return polish_root(f, rel_minus, c1, bisect(f, 0.0, hi, 1e-13, 1e-12));
}

SpeedResult speed_single_shift(const DispersionRelation& rel_minus,
                               const DispersionRelation& rel_plus, double c1,
                               double mu) {
  const double sum_minus = rel_minus.r1() + rel_minus.r2();
  const double sum_plus = rel_plus.r1() + rel_plus.r2();
  if (!(sum_plus > sum_minus && sum_minus > 0.0))
    throw RegimeError("single shift: needs R_+ sums > R_- sums > 0");
  if (!(mu > 0.0)) throw RegimeError("single shift: mu must be positive");

  auto [msm, csm] = rel_minus.mu_star();
  auto [msp, csp] = rel_plus.mu_star();
  SpeedResult res;
  res.mu_star_minus = msm;
  res.mu_star_plus = msp;
  res.c_star_minus = csm;
  res.c_star_plus = csp;

  if (std::isinf(mu)) {
    // eq. for mu = infinity
    if (leq_tol(c1, csp)) {
      res.s_hat = csp;
      res.regime = "1.22-i";
      return res;
    }
    const double bp = bar_p(rel_minus, rel_plus, c1);
    res.bar_p = bp;
    if (bp < msm) {
      res.s_hat = rel_minus.lambda(bp) / bp;
      res.regime = "1.22-ii";
    } else {
      res.s_hat = csm;
      res.regime = "1.22-iii";
    }
    return res;
  }

  if (leq_tol(mu, msp)) {
    // mu in (0, mu*_+]
    const double thresh = rel_plus.lambda(mu) / mu;
    if (leq_tol(c1, thresh)) {
      res.s_hat = thresh;
      res.regime = "1.18-i";
      return res;
    }
    const double up = underline_p(rel_minus, rel_plus, c1, mu);
    res.underline_p = up;
    if (up < msm) {
      res.s_hat = rel_minus.lambda(up) / up;
      res.regime = "1.18-ii";
    } else {
      res.s_hat = csm;
      res.regime = "1.18-iii";
    }
    return res;
  }

  // mu in (mu*_+, infinity)
  if (leq_tol(c1, csp)) {
    res.s_hat = csp;
    res.regime = "1.20-i";
    return res;
  }
  if (leq_tol(c1, rel_plus.lambda_prime(mu))) {
    const double bp = bar_p(rel_minus, rel_plus, c1);
    res.bar_p = bp;
    if (bp < msm) {
      res.s_hat = rel_minus.lambda(bp) / bp;
      res.regime = "1.20-ii";
    } else {
      res.s_hat = csm;
      res.regime = "1.20-iv";
    }
    return res;
  }
  const double up = underline_p(rel_minus, rel_plus, c1, mu);
  res.underline_p = up;
  if (up < msm) {
    res.s_hat = rel_minus.lambda(up) / up;
    res.regime = "1.20-iii";
  } else {
    res.s_hat = csm;
    res.regime = "1.20-v";
  }
  return res;
}

SpeedResult speed_two_shift_kpp(double r1, double r2, double c1, double c2) {
  if (!(1.0 > r2 && r2 > r1 && r1 > 0.0))
    throw RegimeError("two shift: needs 1 > r2 > r1 > 0");
  if (!(c1 > c2 && c2 > 0.0))
    throw RegimeError("two shift: needs c1 > c2 > 0");

  const double mu = 0.5 * c1 - std::sqrt(1.0 - r2);
  const double bp =
      0.5 * c2 - std::sqrt((0.5 * c2 - mu) * (0.5 * c2 - mu) + r2 - r1);
  const double up = 0.5 * c2 - std::sqrt(r2 - r1);
  const double sr1 = std::sqrt(r1);
  const double sr2 = std::sqrt(r2);

  SpeedResult res;
  res.bar_p = bp;
  res.underline_p = up;
  res.mu_star_minus = sr1;
  res.mu_star_plus = sr2;
  res.c_star_minus = 2.0 * sr1;
  res.c_star_plus = 2.0 * sr2;

  if (leq_tol(c1, 2.0)) {
    res.s_hat = 2.0;
    res.regime = "1.10-1";
  } else if (mu < sr2 && leq_tol(c2, mu + r2 / mu)) {
    res.s_hat = mu + r2 / mu;
    res.regime = "1.10-2";
  } else if (mu >= sr2 && leq_tol(c2, 2.0 * sr2)) {
    res.s_hat = 2.0 * sr2;
    res.regime = "1.10-3";
  } else if ((mu < sr2 && bp > 0.0 && bp < sr1 && c2 > mu + r2 / mu) ||
             (mu >= sr2 && c2 >= 2.0 * mu && bp > 0.0 && bp < sr1 &&
              c2 > 2.0 * sr2)) {
    // The matched decay bar-p carries the tail inherited from the fastest
    // band; it only applies while that tail reaches the slow region, i.e.
    // c2 >= 2 mu.  At c2 = 2 mu it coincides with underline-p below.
    res.s_hat = bp + r1 / bp;
    res.regime = "1.10-4";
  } else if (mu >= sr2 && c2 < 2.0 * mu && up > 0.0 && up < sr1 &&
             c2 > 2.0 * sr2) {
    // Wide-band regime: the middle band pulls with its own minimal tail,
    // recovering the single-interface formula as c1 -> infinity.
    res.s_hat = up + r1 / up;
    res.regime = "1.10-5";
  } else {
    res.s_hat = 2.0 * sr1;
    res.regime = "1.10-6";
  }
  return res;
}

double speed_nonlocal_pulling(double r1, double r2, double c1) {
  if (!(r2 > r1 && r1 > 0.0))
    throw RegimeError("nonlocal pulling: needs r2 > r1 > 0");
  const double sr1 = std::sqrt(r1);
  const double gap = std::sqrt(r2 - r1);
  if (c1 <= 2.0 * std::sqrt(r2)) return 2.0 * std::sqrt(r2);
  if (c1 >= 2.0 * (sr1 + gap)) return 2.0 * sr1;
  const double p = 0.5 * c1 - gap;
  return p + r1 / p;
}

}  // namespace kpp
