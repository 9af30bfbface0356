#pragma once

#include <optional>
#include <string>
#include <vector>

namespace kpp {

struct KernelAtom {
  double tau;     // delay, in [0, tau0]
  double y;       // spatial offset
  double weight;  // nonnegative, weights sum to 1
};

// Quadrature representation of the spatio-temporal delay kernel.
// The continuous kernel is discretized to weighted atoms; every
// downstream consumer touches it only through the exponential moment
// mgf(p, q) = sum_j w_j exp(p*y_j + q*tau_j).
//
// An "absent" kernel (no delayed reaction at all) is a distinct state
// rather than a zero-mass kernel: mgf() returns 1 by convention and the
// caller is expected to multiply it by R2 == 0.
class DelayKernel {
 public:
  // Kernel-free model (f2 identically zero).
  static DelayKernel none();

  // Dirac mass at (tau_hat, y_hat).
  static DelayKernel point_mass(double tau_hat, double y_hat);

  // Uniform density on [0, tau0] x [-y_half, y_half], trapezoid nodes.
  static DelayKernel uniform_box(double tau0, double y_half, int n_tau,
                                 int n_y);

  // Truncated Gaussian (std sigma) in y on [-y_half, y_half] times an
  // exponential density with the given rate in tau on [0, tau0].
  static DelayKernel gauss_exp(double sigma, double y_half, int n_y,
                               double tau0, double rate, int n_tau);

  bool absent() const { return absent_; }
  double tau0() const { return tau0_; }
  bool symmetric_y() const { return symmetric_y_; }
  const std::vector<KernelAtom>& atoms() const { return atoms_; }

  // (H6'') support metadata: user-declared tau1 such that the kernel
  // vanishes on [0, tau1] x (-inf, 0). Only verified against the atoms.
  void declare_tau1(double tau1);
  std::optional<double> tau1() const { return tau1_; }
  bool one_sided_support_holds() const;

  // Exponential moment. Throws OverflowError if any atom exponent
  // exceeds 700, so that infinities never leak into root brackets.
  double mgf(double p, double q) const;

  // Partial derivatives of mgf, in closed form through the atom sums.
  double mgf_dp(double p, double q) const;
  double mgf_dq(double p, double q) const;

 private:
  DelayKernel() = default;
  void validate_and_normalize();

  std::vector<KernelAtom> atoms_;
  double tau0_ = 0.0;
  bool symmetric_y_ = true;
  bool absent_ = true;
  std::optional<double> tau1_;
};

}  // namespace kpp
