#include "kpp/kernel.hpp"

#include <cmath>
#include <numeric>

#include "kpp/errors.hpp"

namespace kpp {

namespace {

constexpr double kExpLimit = 700.0;  // near the double exp() overflow point

// Trapezoid nodes and weights on [a, b] with n >= 2 nodes.
void trapezoid_nodes(double a, double b, int n, std::vector<double>& nodes,
                     std::vector<double>& weights) {
  if (n < 2) throw ConfigError("kernel: node count must be at least 2");
  const double h = (b - a) / (n - 1);
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = a + i * h;
    weights[i] = (i == 0 || i == n - 1) ? 0.5 * h : h;
  }
}

}  // namespace

DelayKernel DelayKernel::none() {
  DelayKernel k;
  k.absent_ = true;
  k.tau0_ = 0.0;
  k.symmetric_y_ = true;
  return k;
}

DelayKernel DelayKernel::point_mass(double tau_hat, double y_hat) {
  if (tau_hat < 0.0) throw ConfigError("kernel: point mass needs tau >= 0");
  DelayKernel k;
  k.absent_ = false;
  k.tau0_ = tau_hat;
  k.symmetric_y_ = (y_hat == 0.0);
  k.atoms_ = {{tau_hat, y_hat, 1.0}};
  k.validate_and_normalize();
  return k;
}

DelayKernel DelayKernel::uniform_box(double tau0, double y_half, int n_tau,
                                     int n_y) {
  if (n_tau <= 0 || n_y <= 0)
    throw ConfigError("kernel: nonpositive node count");
  if (tau0 <= 0.0) throw ConfigError("kernel: tau0 must be positive");
  if (y_half <= 0.0) throw ConfigError("kernel: y_half must be positive");
  std::vector<double> tn, tw, yn, yw;
  trapezoid_nodes(0.0, tau0, n_tau, tn, tw);
  trapezoid_nodes(-y_half, y_half, n_y, yn, yw);
  DelayKernel k;
  k.absent_ = false;
  k.tau0_ = tau0;
  k.symmetric_y_ = true;
  k.atoms_.reserve(static_cast<size_t>(n_tau) * n_y);
  for (int i = 0; i < n_tau; ++i)
    for (int j = 0; j < n_y; ++j) k.atoms_.push_back({tn[i], yn[j], tw[i] * yw[j]});
  k.validate_and_normalize();
  return k;
}

DelayKernel DelayKernel::gauss_exp(double sigma, double y_half, int n_y,
                                   double tau0, double rate, int n_tau) {
  if (n_tau <= 0 || n_y <= 0)
    throw ConfigError("kernel: nonpositive node count");
  if (tau0 <= 0.0) throw ConfigError("kernel: tau0 must be positive");
  if (sigma <= 0.0 || rate <= 0.0)
    throw ConfigError("kernel: sigma and rate must be positive");
  std::vector<double> tn, tw, yn, yw;
  trapezoid_nodes(0.0, tau0, n_tau, tn, tw);
  trapezoid_nodes(-y_half, y_half, n_y, yn, yw);
  DelayKernel k;
  k.absent_ = false;
  k.tau0_ = tau0;
  k.symmetric_y_ = true;
  k.atoms_.reserve(static_cast<size_t>(n_tau) * n_y);
  for (int i = 0; i < n_tau; ++i) {
    const double dt = rate * std::exp(-rate * tn[i]);
    for (int j = 0; j < n_y; ++j) {
      const double dy = std::exp(-0.5 * yn[j] * yn[j] / (sigma * sigma));
      k.atoms_.push_back({tn[i], yn[j], tw[i] * yw[j] * dt * dy});
    }
  }
  k.validate_and_normalize();
  return k;
}

void DelayKernel::validate_and_normalize() {
  double mass = 0.0;
  for (const auto& a : atoms_) {
    if (a.weight < 0.0) throw ConfigError("kernel: negative quadrature weight");
    if (a.tau < 0.0 || a.tau > tau0_)
      throw ConfigError("kernel: atom delay outside [0, tau0]");
    mass += a.weight;
  }
  if (mass <= 0.0) throw ConfigError("kernel: zero total mass");
  for (auto& a : atoms_) a.weight /= mass;
}

void DelayKernel::declare_tau1(double tau1) {
  if (absent_) throw ConfigError("kernel: tau1 declared on absent kernel");
  if (tau1 <= 0.0 || tau1 > tau0_)
    throw ConfigError("kernel: tau1 must lie in (0, tau0]");
  tau1_ = tau1;
}

bool DelayKernel::one_sided_support_holds() const {
  if (!tau1_) return false;
  for (const auto& a : atoms_)
    if (a.tau <= *tau1_ && a.y < 0.0 && a.weight > 0.0) return false;
  return true;
}

double DelayKernel::mgf(double p, double q) const {
  if (absent_) return 1.0;
  double acc = 0.0;
  for (const auto& a : atoms_) {
    const double e = p * a.y + q * a.tau;
    if (e > kExpLimit) throw OverflowError("kernel: mgf exponent out of range");
    acc += a.weight * std::exp(e);
  }
  return acc;
}

double DelayKernel::mgf_dp(double p, double q) const {
  if (absent_) return 0.0;
  double acc = 0.0;
  for (const auto& a : atoms_) {
    const double e = p * a.y + q * a.tau;
    if (e > kExpLimit) throw OverflowError("kernel: mgf exponent out of range");
    acc += a.weight * a.y * std::exp(e);
  }
  return acc;
}

double DelayKernel::mgf_dq(double p, double q) const {
  if (absent_) return 0.0;
  double acc = 0.0;
  for (const auto& a : atoms_) {
    const double e = p * a.y + q * a.tau;
    if (e > kExpLimit) throw OverflowError("kernel: mgf exponent out of range");
    acc += a.weight * a.tau * std::exp(e);
  }
  return acc;
}

}  // namespace kpp
