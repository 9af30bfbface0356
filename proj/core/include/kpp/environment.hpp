#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kpp/kernel.hpp"

namespace kpp {

enum class Envelope { upper, lower };

// Ray-homogenized growth rates R1(s), R2(s) on s = x/t >= 0, stored as a
// piecewise-constant function with breakpoints at the shift speeds. The
// stored value at a breakpoint follows the u.s.c. convention (max of the
// one-sided limits, possibly raised further by a compact bump); the
// l.s.c. envelope is derived as the min of the adjacent limits.
class RayProfile {
 public:
  struct Segment {
    double r1;
    double r2;
  };

  static RayProfile constant(double r1, double r2 = 0.0);
  // breaks must be sorted strictly increasing; segments.size() must be
  // breaks.size() + 1 (values below the first / between / above the last).
  static RayProfile piecewise(std::vector<double> breaks,
                              std::vector<Segment> segments);

  // Raise the upper-envelope value at an existing breakpoint (compact
  // bump contribution). Affects only the upper envelope at that point.
  void add_break_bump(double s_break, double extra_r1, double extra_r2 = 0.0);

  // Declared-only flag for the (H6') decay-rate clause, which is not
  // machine-checkable from samples.
  void declare_h6prime_decay(bool v) { h6prime_decay_declared_ = v; }
  bool h6prime_decay_declared() const { return h6prime_decay_declared_; }

  std::pair<double, double> eval(double s, Envelope env) const;

  const std::vector<double>& breakpoints() const { return breaks_; }
  const std::vector<Segment>& segments() const { return segs_; }

 private:
  int segment_index(double s) const;

  std::vector<double> breaks_;
  std::vector<Segment> segs_;
  // Explicit upper-envelope value at each breakpoint; defaults to the max
  // of the adjacent segments.
  std::vector<std::optional<Segment>> break_upper_;
  bool h6prime_decay_declared_ = false;
};

// A concrete heterogeneous coefficient r(t,x) = baseline + sum_i
// r_i(x - c_i t) built from shifted bounded profiles, for simulation.
struct ProfileTerm {
  enum class Shape { step, tanh_ramp, bump };
  double c = 0.0;      // shift speed
  Shape shape = Shape::step;
  double lo = 0.0;     // value at -inf (ignored for bump)
  double hi = 0.0;     // value at +inf (bump: peak height)
  double width = 1.0;  // ramp width / bump support width

  double value(double xi) const;
};

class ShiftedEnvironment {
 public:
  ShiftedEnvironment() = default;
  explicit ShiftedEnvironment(double baseline) : baseline_(baseline) {}

  void add_term(ProfileTerm term) { terms_.push_back(term); }
  double baseline() const { return baseline_; }
  const std::vector<ProfileTerm>& terms() const { return terms_; }

  // Pointwise evaluation r(t, x).
  double realize(double t, double x) const;

 private:
  double baseline_ = 0.0;
  std::vector<ProfileTerm> terms_;
};

// Homogenize shifted environments along rays s = x/t. env1 feeds R1,
// env2 (may be null) feeds R2. Breakpoints land exactly at the positive
// shift speeds; compact bumps contribute only to the upper envelope at
// their own speed.
RayProfile ray_limit(const ShiftedEnvironment& env1,
                     const ShiftedEnvironment* env2 = nullptr);

struct HypothesisClause {
  std::string name;
  bool pass;
  std::string detail;
};

struct HypothesisReport {
  std::vector<HypothesisClause> clauses;
  bool positivity_ok = false;  // lower R1 + lower R2 > 0 for s > 0
  bool h4_ok = false;          // at least one of (H4)(i)-(iii)
  bool h6_any_ok = false;      // (H6), (H6') or (H6'')

  bool accepted() const { return positivity_ok && h4_ok; }
  const HypothesisClause* find(const std::string& name) const;
};

HypothesisReport check_hypotheses(const RayProfile& profile,
                                  const DelayKernel& kernel);

}  // namespace kpp
