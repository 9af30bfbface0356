#pragma once

#include <cmath>
#include <functional>
#include <utility>

#include "kpp/errors.hpp"

namespace kpp {

// Bisection on [lo, hi] assuming f(lo) and f(hi) have opposite signs.
// Runs until the bracket is below xtol or the residual below ftol.
template <typename F>
double bisect(F&& f, double lo, double hi, double xtol = 1e-14,
              double ftol = 0.0, int max_iter = 200) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0) throw ConvergenceError("bisect: no sign change in bracket");
  for (int i = 0; i < max_iter; ++i) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0.0 || hi - lo < xtol || std::abs(fm) <= ftol) return mid;
    if (flo * fm < 0.0) {
      hi = mid;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

// Newton iteration safeguarded by a maintained sign-change bracket.
// f must be provided together with its derivative; [lo, hi] must bracket
// the root. Falls back to bisection whenever a Newton step leaves the
// bracket or stalls.
template <typename F, typename DF>
double newton_safeguarded(F&& f, DF&& df, double lo, double hi,
                          double ftol = 1e-12, int max_iter = 100) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0)
    throw ConvergenceError("newton_safeguarded: no sign change in bracket");
  double x = 0.5 * (lo + hi);
  double fx = f(x);
  for (int i = 0; i < max_iter; ++i) {
    if (std::abs(fx) <= ftol) return x;
    if (flo * fx < 0.0) {
      hi = x;
    } else {
      lo = x;
      flo = fx;
    }
    double d = df(x);
    double xn = (d != 0.0) ? x - fx / d : lo - 1.0;
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    x = xn;
    fx = f(x);
  }
  if (std::abs(fx) <= 1e3 * ftol) return x;
  throw ConvergenceError("newton_safeguarded: residual did not converge");
}

// Golden-section minimization of a unimodal function on [lo, hi].
// Returns (argmin, min value).
template <typename F>
std::pair<double, double> golden_min(F&& f, double lo, double hi,
                                     double xtol = 1e-10) {
  constexpr double invphi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > xtol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  double xm = 0.5 * (a + b);
  return {xm, f(xm)};
}

}  // namespace kpp
