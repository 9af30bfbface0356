#include "kpp/environment.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "kpp/errors.hpp"

namespace kpp {

RayProfile RayProfile::constant(double r1, double r2) {
  RayProfile p;
  p.segs_ = {{r1, r2}};
  return p;
}

RayProfile RayProfile::piecewise(std::vector<double> breaks,
                                 std::vector<Segment> segments) {
  if (segments.size() != breaks.size() + 1)
    throw ConfigError("ray profile: segments must be breaks + 1");
  if (!std::is_sorted(breaks.begin(), breaks.end()) ||
      std::adjacent_find(breaks.begin(), breaks.end()) != breaks.end())
    throw ConfigError("ray profile: breakpoints must be strictly increasing");
  RayProfile p;
  p.breaks_ = std::move(breaks);
  p.segs_ = std::move(segments);
  p.break_upper_.assign(p.breaks_.size(), std::nullopt);
  return p;
}

void RayProfile::add_break_bump(double s_break, double extra_r1,
                                double extra_r2) {
  for (size_t k = 0; k < breaks_.size(); ++k) {
    if (breaks_[k] == s_break) {
      Segment base{std::max(segs_[k].r1, segs_[k + 1].r1),
                   std::max(segs_[k].r2, segs_[k + 1].r2)};
      if (break_upper_[k]) base = *break_upper_[k];
      break_upper_[k] = Segment{base.r1 + extra_r1, base.r2 + extra_r2};
      return;
    }
  }
  throw ConfigError("ray profile: bump speed is not a breakpoint");
}

int RayProfile::segment_index(double s) const {
  // index of the open interval containing s; ties handled by the caller
  int k = 0;
  while (k < static_cast<int>(breaks_.size()) && s > breaks_[k]) ++k;
  return k;
}

std::pair<double, double> RayProfile::eval(double s, Envelope env) const {
  for (size_t k = 0; k < breaks_.size(); ++k) {
    if (s == breaks_[k]) {
      const Segment& a = segs_[k];
      const Segment& b = segs_[k + 1];
      if (env == Envelope::lower)
        return {std::min(a.r1, b.r1), std::min(a.r2, b.r2)};
      Segment up{std::max(a.r1, b.r1), std::max(a.r2, b.r2)};
      if (break_upper_[k]) up = *break_upper_[k];
      return {up.r1, up.r2};
    }
  }
  const Segment& seg = segs_[segment_index(s)];
  return {seg.r1, seg.r2};
}

double ProfileTerm::value(double xi) const {
  switch (shape) {
    case Shape::step:
      return xi < 0.0 ? lo : hi;
    case Shape::tanh_ramp:
      return lo + (hi - lo) * 0.5 * (1.0 + std::tanh(2.0 * xi / width));
    case Shape::bump: {
      const double z = xi / (0.5 * width);
      if (std::abs(z) >= 1.0) return 0.0;
      const double c = std::cos(0.5 * M_PI * z);
      return hi * c * c;
    }
  }
  return 0.0;
}

double ShiftedEnvironment::realize(double t, double x) const {
  double r = baseline_;
  for (const auto& term : terms_) r += term.value(x - term.c * t);
  return r;
}

namespace {

// As t -> infinity along the ray x = s t, a shifted term sees its
// argument (s - c) t, hence contributes its -inf value below its shift
// speed and its +inf value above. Bumps vanish off their own speed.
double term_ray_value(const ProfileTerm& term, double s) {
  if (term.shape == ProfileTerm::Shape::bump) return 0.0;
  return s > term.c ? term.hi : term.lo;
}

void accumulate(const ShiftedEnvironment& env, std::vector<double>& speeds) {
  for (const auto& term : env.terms())
    if (term.c > 0.0) speeds.push_back(term.c);
}

}  // namespace

RayProfile ray_limit(const ShiftedEnvironment& env1,
                     const ShiftedEnvironment* env2) {
  for (const auto* env : {&env1, env2}) {
    if (!env) continue;
    for (const auto& term : env->terms())
      if (!std::isfinite(term.lo) || !std::isfinite(term.hi))
        throw ConfigError("ray limit: unbounded profile term");
  }

  std::vector<double> speeds;
  accumulate(env1, speeds);
  if (env2) accumulate(*env2, speeds);
  std::sort(speeds.begin(), speeds.end());
  speeds.erase(std::unique(speeds.begin(), speeds.end()), speeds.end());

  auto env_value = [](const ShiftedEnvironment& env, double s) {
    double v = env.baseline();
    for (const auto& term : env.terms()) v += term_ray_value(term, s);
    return v;
  };

  std::vector<RayProfile::Segment> segs;
  for (size_t k = 0; k <= speeds.size(); ++k) {
    // sample point strictly inside the k-th interval
    double s;
    if (speeds.empty())
      s = 1.0;
    else if (k == 0)
      s = 0.5 * speeds.front();
    else if (k == speeds.size())
      s = speeds.back() + 1.0;
    else
      s = 0.5 * (speeds[k - 1] + speeds[k]);
    segs.push_back({env_value(env1, s), env2 ? env_value(*env2, s) : 0.0});
  }

  RayProfile profile =
      speeds.empty() ? RayProfile::constant(segs[0].r1, segs[0].r2)
                     : RayProfile::piecewise(speeds, segs);

  // Compact bumps raise the upper envelope at their own shift speed only.
  auto add_bumps = [&](const ShiftedEnvironment& env, bool into_r2) {
    for (const auto& term : env.terms()) {
      if (term.shape != ProfileTerm::Shape::bump || term.c <= 0.0) continue;
      if (into_r2)
        profile.add_break_bump(term.c, 0.0, term.hi);
      else
        profile.add_break_bump(term.c, term.hi, 0.0);
    }
  };
  add_bumps(env1, false);
  if (env2) add_bumps(*env2, true);
  return profile;
}

namespace {

bool non_decreasing(const std::vector<double>& v) {
  for (size_t i = 1; i < v.size(); ++i)
    if (v[i] < v[i - 1]) return false;
  return true;
}

bool non_increasing(const std::vector<double>& v) {
  for (size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[i - 1]) return false;
  return true;
}

bool monotone(const std::vector<double>& v) {
  return non_decreasing(v) || non_increasing(v);
}

bool all_equal(const std::vector<double>& v) {
  for (size_t i = 1; i < v.size(); ++i)
    if (v[i] != v[0]) return false;
  return true;
}

// A piecewise-constant function with the u.s.c. breakpoint convention is
// locally monotone iff no breakpoint value strictly exceeds both
// one-sided limits (which can only happen via an explicit bump).
bool locally_monotone(const RayProfile& profile, bool use_sum) {
  for (double b : profile.breakpoints()) {
    auto [u1, u2] = profile.eval(b, Envelope::upper);
    double up = use_sum ? u1 + u2 : u1;
    auto left = profile.eval(std::nexttoward(b, -1e300), Envelope::upper);
    auto right = profile.eval(std::nexttoward(b, 1e300), Envelope::upper);
    double l = use_sum ? left.first + left.second : left.first;
    double r = use_sum ? right.first + right.second : right.first;
    if (up > std::max(l, r)) return false;
  }
  return true;
}

}  // namespace

const HypothesisClause* HypothesisReport::find(const std::string& name) const {
  for (const auto& c : clauses)
    if (c.name == name) return &c;
  return nullptr;
}

HypothesisReport check_hypotheses(const RayProfile& profile,
                                  const DelayKernel& kernel) {
  HypothesisReport rep;

  std::vector<double> r1s, r2s;
  for (const auto& seg : profile.segments()) {
    r1s.push_back(seg.r1);
    r2s.push_back(seg.r2);
  }

  // positivity of the lower envelope of R1 + R2
  bool pos = true;
  for (const auto& seg : profile.segments())
    if (seg.r1 + seg.r2 <= 0.0) pos = false;
  for (double b : profile.breakpoints()) {
    auto [l1, l2] = profile.eval(b, Envelope::lower);
    if (l1 + l2 <= 0.0) pos = false;
  }
  rep.positivity_ok = pos;
  rep.clauses.push_back({"positivity", pos, "lower R1 + lower R2 > 0 on s > 0"});

  bool r2_nonneg = true;
  for (double v : r2s)
    if (v < 0.0) r2_nonneg = false;
  rep.clauses.push_back({"r2_nonnegative", r2_nonneg, "R2 >= 0 everywhere"});

  const bool h4i = (non_decreasing(r1s) && non_decreasing(r2s)) ||
                   (non_increasing(r1s) && non_increasing(r2s));
  rep.clauses.push_back(
      {"h4_i", h4i, "R1 and R2 both non-increasing or both non-decreasing"});

  const bool h4ii = all_equal(r1s) && monotone(r2s);
  rep.clauses.push_back({"h4_ii", h4ii, "R1 continuous and R2 monotone"});

  const bool h4iii =
      locally_monotone(profile, false) && locally_monotone(profile, true);
  rep.clauses.push_back(
      {"h4_iii", h4iii,
       "R2 piecewise constant, R1 and R1+R2 locally monotone"});

  rep.h4_ok = (h4i || h4ii || h4iii) && pos && r2_nonneg;
  rep.clauses.push_back({"h4", rep.h4_ok, "one of (H4)(i)-(iii) plus positivity"});

  // (H6): R2 identically zero, or non-increasing on [s0, inf). Piecewise
  // constant R2 is eventually constant, so the clause always holds; keep
  // the zero case distinguishable in the detail string.
  const bool h6_zero = all_equal(r2s) && r2s[0] == 0.0;
  rep.clauses.push_back({"h6", true,
                         h6_zero ? "R2 identically zero"
                                 : "R2 constant (hence non-increasing) near "
                                   "+infinity"});
  const bool h6 = true;

  const bool r2_limit_pos = !r2s.empty() && r2s.back() > 0.0;
  const bool h6p = r2_limit_pos && profile.h6prime_decay_declared();
  rep.clauses.push_back(
      {"h6_prime", h6p,
       "R2(+inf) > 0 and declared o(1/s^2) decay tag (tag-only check)"});

  const bool h6pp = r2_limit_pos && !kernel.absent() &&
                    kernel.one_sided_support_holds();
  rep.clauses.push_back(
      {"h6_doubleprime", h6pp,
       "kernel support in [0,tau1] x [0,inf) and limsup R2 > 0"});

  rep.h6_any_ok = h6 || h6p || h6pp;

  // (H5) sufficient condition from the remark: lower R1 > 0 near s = 0
  auto low0 = profile.eval(0.0, Envelope::lower);
  rep.clauses.push_back({"h5_sufficient", low0.first > 0.0,
                         "lower R1(s) > 0 for s near 0 (sufficient condition)"});

  return rep;
}

}  // namespace kpp
