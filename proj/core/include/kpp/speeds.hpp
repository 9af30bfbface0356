#pragma once

#include <limits>
#include <optional>
#include <string>

#include "kpp/dispersion.hpp"

namespace kpp {

// mu = infinity selects compactly-supported (faster-than-exponential)
// initial data.
inline constexpr double mu_infinity = std::numeric_limits<double>::infinity();

struct SpeedResult {
  double s_hat = 0.0;
  std::string regime;  // which alternative of the theorem fired
  std::optional<double> mu_star_minus, mu_star_plus;
  std::optional<double> c_star_minus, c_star_plus;
  std::optional<double> underline_p, bar_p;
};

// Homogeneous environment: lambda(mu)/mu below mu*, the minimal linear
// speed inf_p lambda(p)/p at and above.
SpeedResult speed_homogeneous(const DispersionRelation& rel, double mu);

// Smallest root p of  c1 p - lambda_-(p) = c1 mu - lambda_+(mu)  on
// (0, min(mu, Psi_-(c1))]. Valid in the regime c1 > lambda_+(mu)/mu.
double underline_p(const DispersionRelation& rel_minus,
                   const DispersionRelation& rel_plus, double c1, double mu);

// Smallest root p of  c1 p - lambda_-(p) = c1 Psi_+(c1) - lambda_+(Psi_+(c1)).
// Valid for c1 > c*_+.
double bar_p(const DispersionRelation& rel_minus,
             const DispersionRelation& rel_plus, double c1);

// Single-shift environment (R ordering R_+ sums > R_- sums > 0): the full
// case table, dispatching on mu against mu*_+ and on c1 against
// lambda_+(mu)/mu, c*_+ and lambda'_+(mu).
SpeedResult speed_single_shift(const DispersionRelation& rel_minus,
                               const DispersionRelation& rel_plus, double c1,
                               double mu);

// Two shifts, Fisher-KPP specialization (1 > r2 > r1 > 0, c1 > c2 > 0),
// compactly supported initial data.
SpeedResult speed_two_shift_kpp(double r1, double r2, double c1, double c2);

// The closed 3-branch curve c1 -> speed for the single-shift Fisher-KPP
// problem with compactly supported data (the nonlocal-pulling formula).
double speed_nonlocal_pulling(double r1, double r2, double c1);

}  // namespace kpp
