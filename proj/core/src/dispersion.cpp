#include "kpp/dispersion.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "kpp/errors.hpp"
#include "kpp/rootfind.hpp"

namespace kpp {

namespace {
constexpr double kLambdaResidual = 1e-12;
constexpr size_t kCacheCap = 1u << 20;  // stop inserting past this size
}  // namespace

struct DispersionRelation::Shared {
  std::unordered_map<std::int64_t, double> cache;
  std::mutex mutex;
  std::optional<MuStar> mu_star;
};

DispersionRelation::DispersionRelation(double r1, double r2, DelayKernel kernel)
    : r1_(r1),
      r2_(r2),
      kernel_(std::move(kernel)),
      shared_(std::make_shared<Shared>()),
      nonpositive_count_(std::make_shared<std::atomic<long>>(0)) {
  if (r2_ < 0.0) throw ConfigError("dispersion: r2 must be nonnegative");
  if (r2_ > 0.0 && kernel_.absent())
    throw ConfigError("dispersion: r2 > 0 requires a kernel");
}

double DispersionRelation::delta(double lam, double p) const {
  double m = (r2_ != 0.0) ? kernel_.mgf(p, -lam) : 0.0;
  return -lam + p * p + r1_ + r2_ * m;
}

double DispersionRelation::solve_lambda(double p) const {
  // Kernel-free case is affine in lambda.
  if (r2_ == 0.0 || kernel_.absent()) return p * p + r1_;

  // Delta is strictly decreasing in lambda with slope <= -1, so a sign
  // change brackets the unique root. Start from the suggested bracket and
  // expand geometrically.
  double lo = p * p + r1_ + r2_ - 1.0;
  double hi = p * p + r1_ + r2_ * kernel_.mgf(p, 0.0) + 1.0;
  double step = 1.0;
  int doublings = 0;
  while (delta(lo, p) < 0.0) {
    lo -= step;
    step *= 2.0;
    if (++doublings > 200)
      throw ConvergenceError("dispersion: lambda bracket expansion failed");
  }
  step = 1.0;
  while (delta(hi, p) > 0.0) {
    hi += step;
    step *= 2.0;
    if (++doublings > 200)
      throw ConvergenceError("dispersion: lambda bracket expansion failed");
  }
  auto f = [&](double lam) { return delta(lam, p); };
  auto df = [&](double lam) {
    return -1.0 - r2_ * kernel_.mgf_dq(p, -lam);
  };
  double lam = newton_safeguarded(f, df, lo, hi, kLambdaResidual);
  if (lam <= 0.0) nonpositive_count_->fetch_add(1);
  return lam;
}

double DispersionRelation::lambda(double p) const {
  // Memo keyed on p rounded at the 1e-14 level; |p| beyond the key range
  // is solved directly.
  const double scaled = p * 1e14;
  if (std::abs(scaled) < 9e18) {
    const auto key = static_cast<std::int64_t>(std::llround(scaled));
    {
      std::lock_guard<std::mutex> lock(shared_->mutex);
      auto it = shared_->cache.find(key);
      if (it != shared_->cache.end()) return it->second;
    }
    const double lam = solve_lambda(p);
    std::lock_guard<std::mutex> lock(shared_->mutex);
    if (shared_->cache.size() < kCacheCap) shared_->cache.emplace(key, lam);
    return lam;
  }
  return solve_lambda(p);
}

double DispersionRelation::lambda_prime(double p) const {
  const double lam = lambda(p);
  if (r2_ == 0.0 || kernel_.absent()) return 2.0 * p;
  const double dp = 2.0 * p + r2_ * kernel_.mgf_dp(p, -lam);
  const double dl = -1.0 - r2_ * kernel_.mgf_dq(p, -lam);
  return -dp / dl;
}

double DispersionRelation::psi(double s) const {
  // lambda' is continuous and strictly increasing (lambda'' > 0).
  double lo = 0.0, hi = 0.0, step = 1.0;
  int doublings = 0;
  while (lambda_prime(lo) > s) {
    lo -= step;
    step *= 2.0;
    if (++doublings > 200) throw ConvergenceError("dispersion: psi bracket failed");
  }
  step = 1.0;
  while (lambda_prime(hi) < s) {
    hi += step;
    step *= 2.0;
    if (++doublings > 200) throw ConvergenceError("dispersion: psi bracket failed");
  }
  auto f = [&](double p) { return lambda_prime(p) - s; };
  double p = bisect(f, lo, hi, 1e-13, 1e-11);
  if (std::abs(lambda_prime(p) - s) > 1e-10)
    throw ConvergenceError("dispersion: psi residual too large");
  return p;
}

DispersionRelation::MuStar DispersionRelation::mu_star() const {
  {
    std::lock_guard<std::mutex> lock(shared_->mutex);
    if (shared_->mu_star) return *shared_->mu_star;
  }
  if (lambda(0.0) <= 0.0)
    throw RegimeError("dispersion: mu* needs lambda(0) > 0");
  auto ratio = [&](double p) { return lambda(p) / p; };

  // lambda(p)/p is decreasing on (0, mu*) and increasing on (mu*, inf);
  // expand until the right end is on the increasing side.
  double lo = 1e-8;
  double hi = 1.0;
  int doublings = 0;
  while (ratio(hi) <= ratio(0.5 * hi)) {
    hi *= 2.0;
    if (++doublings > 200)
      throw ConvergenceError("dispersion: lambda(p)/p not eventually increasing");
  }
  auto [mu, c] = golden_min(ratio, lo, hi, 1e-10);
  // Golden section is limited to ~sqrt(eps) accuracy in the argmin; refine
  // on the stationarity function g(p) = lambda'(p) p - lambda(p), which is
  // increasing because lambda is convex.
  auto g = [&](double p) { return lambda_prime(p) * p - lambda(p); };
  double ga = mu * (1.0 - 1e-6), gb = mu * (1.0 + 1e-6);
  int widen = 0;
  while (g(ga) > 0.0 && ++widen < 40) ga *= 0.5;
  widen = 0;
  while (g(gb) < 0.0 && ++widen < 40) gb *= 2.0;
  if (g(ga) <= 0.0 && g(gb) >= 0.0) {
    mu = bisect(g, ga, gb, 1e-14 * mu, 1e-13);
    c = ratio(mu);
  }
  MuStar result{mu, c};
  const double stat = std::abs(lambda_prime(mu) * mu - lambda(mu));
  if (stat > 1e-8 * (1.0 + lambda(mu)))
    throw ConvergenceError("dispersion: mu* stationarity check failed");
  std::lock_guard<std::mutex> lock(shared_->mutex);
  shared_->mu_star = result;
  return result;
}

double htilde(const RayProfile& profile, const DelayKernel& kernel, double s,
              double p) {
  auto [R1, R2] = profile.eval(s, Envelope::upper);
  if (R2 == 0.0 || kernel.absent()) return p * p + R1;
  // g(q) = q + p^2 + R1 + R2 mgf(p, q) is increasing in q with slope >= 1.
  auto g = [&](double q) { return q + p * p + R1 + R2 * kernel.mgf(p, q); };
  auto dg = [&](double q) { return 1.0 + R2 * kernel.mgf_dq(p, q); };
  double hi = -(p * p + R1);  // g(hi) = R2 mgf >= 0
  double lo = hi;
  double step = 1.0;
  int doublings = 0;
  while (g(lo) > 0.0) {
    lo -= step;
    step *= 2.0;
    if (++doublings > 200)
      throw ConvergenceError("dispersion: htilde bracket expansion failed");
  }
  const double q = newton_safeguarded(g, dg, lo, hi + 1e-12, 1e-12);
  return -q;
}

}  // namespace kpp
