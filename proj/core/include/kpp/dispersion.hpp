#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "kpp/environment.hpp"
#include "kpp/kernel.hpp"

namespace kpp {

// The linearized growth/decay balance for the exponential ansatz
// exp(p x - lambda t):
//
//   Delta(lambda, p) = -lambda + p^2 + r1 + r2 * mgf(p, -lambda)
//
// Delta is strictly decreasing in lambda with slope <= -1, so lambda(p)
// is the unique root of Delta(., p) = 0. lambda is even in p for
// y-symmetric kernels, strictly convex, and lambda(p)/p is unbounded,
// which makes the minimizer mu* of lambda(p)/p and the inverse Psi of
// lambda' well defined.
class DispersionRelation {
 public:
  DispersionRelation(double r1, double r2, DelayKernel kernel);

  double r1() const { return r1_; }
  double r2() const { return r2_; }
  const DelayKernel& kernel() const { return kernel_; }

  double delta(double lam, double p) const;

  // Unique root of Delta(., p) = 0, residual <= 1e-12. Memoized; results
  // are bitwise independent of cache state.
  double lambda(double p) const;

  // lambda'(p) by implicit differentiation, partials in closed form.
  double lambda_prime(double p) const;

  // Inverse of lambda': the unique p with lambda'(p) = s.
  double psi(double s) const;

  struct MuStar {
    double mu_star;
    double c_star;  // lambda(mu*) / mu* = inf_{p>0} lambda(p)/p
  };
  MuStar mu_star() const;

  // Diagnostic: number of lambda solves that returned a nonpositive root
  // (possible under heavy quadrature truncation with very negative r1).
  long nonpositive_lambda_count() const { return nonpositive_count_->load(); }

 private:
  double solve_lambda(double p) const;

  double r1_;
  double r2_;
  DelayKernel kernel_;

  struct Shared;
  std::shared_ptr<Shared> shared_;  // memo cache + diagnostics, thread-safe
  std::shared_ptr<std::atomic<long>> nonpositive_count_;
};

// The Hamiltonian of the reduced equation in implicit form: H-tilde(s,p)
// is the unique -q solving q + p^2 + R1(s) + R2(s) mgf(p,q) = 0, using
// the u.s.c. envelope of the profile. Coincides with lambda(p) of the
// per-regime dispersion relation.
double htilde(const RayProfile& profile, const DelayKernel& kernel, double s,
              double p);

}  // namespace kpp
