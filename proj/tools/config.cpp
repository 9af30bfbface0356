#include "config.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "kpp/errors.hpp"

namespace kpp::cli {

namespace {

class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object())
      throw ConfigError("config: " + path_ + " must be an object");
  }
  ~Section() = default;

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError("config: bad value for " + path_ + "." + key + ": " +
                        e.what());
    }
  }

  bool has(const char* key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const json& sub(const char* key) { return j_.at(key); }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key()))
        throw ConfigError("config: unknown key " + path_ + "." + it.key());
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void parse_mu(const json& j, double& mu) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") {
      mu = mu_infinity;
      return;
    }
    throw ConfigError("config: mu must be a positive number or \"inf\"");
  }
  mu = j.get<double>();
  if (!(mu > 0.0))
    throw ConfigError("config: mu must be a positive number or \"inf\"");
}

EnvConfig parse_env(const json& j, const std::string& path) {
  EnvConfig ec;
  Section s(j, path);
  s.get("baseline", ec.baseline);
  if (s.has("terms")) {
    const json& arr = s.sub("terms");
    if (!arr.is_array())
      throw ConfigError("config: " + path + ".terms must be an array");
    for (size_t i = 0; i < arr.size(); ++i) {
      TermConfig tc;
      Section t(arr[i], path + ".terms[" + std::to_string(i) + "]");
      t.get("c", tc.c);
      t.get("shape", tc.shape);
      t.get("lo", tc.lo);
      t.get("hi", tc.hi);
      t.get("width", tc.width);
      t.finish();
      if (tc.shape != "step" && tc.shape != "tanh" && tc.shape != "bump")
        throw ConfigError("config: unknown term shape " + tc.shape);
      ec.terms.push_back(tc);
    }
  }
  s.finish();
  return ec;
}

json env_to_json(const EnvConfig& ec) {
  json terms = json::array();
  for (const auto& t : ec.terms)
    terms.push_back({{"c", t.c},
                     {"shape", t.shape},
                     {"lo", t.lo},
                     {"hi", t.hi},
                     {"width", t.width}});
  return {{"baseline", ec.baseline}, {"terms", terms}};
}

}  // namespace

RunConfig parse_config(const json& j) {
  RunConfig cfg;
  Section root(j, "$");

  if (root.has("kernel")) {
    Section k(root.sub("kernel"), "kernel");
    k.get("type", cfg.kernel.type);
    k.get("tau", cfg.kernel.tau);
    k.get("y", cfg.kernel.y);
    k.get("tau0", cfg.kernel.tau0);
    k.get("y_half", cfg.kernel.y_half);
    k.get("sigma", cfg.kernel.sigma);
    k.get("rate", cfg.kernel.rate);
    k.get("n_tau", cfg.kernel.n_tau);
    k.get("n_y", cfg.kernel.n_y);
    k.finish();
    const std::string& t = cfg.kernel.type;
    if (t != "none" && t != "point_mass" && t != "uniform_box" &&
        t != "gauss_exp")
      throw ConfigError("config: unknown kernel type " + t);
  }
  if (root.has("env1")) cfg.env1 = parse_env(root.sub("env1"), "env1");
  if (root.has("env2")) {
    cfg.env2 = parse_env(root.sub("env2"), "env2");
    cfg.has_env2 = true;
  }
  if (root.has("mu")) parse_mu(root.sub("mu"), cfg.mu);
  if (root.has("speed")) {
    Section s(root.sub("speed"), "speed");
    s.get("mode", cfg.speed.mode);
    s.get("r1", cfg.speed.r1);
    s.get("r2", cfg.speed.r2);
    s.get("c1", cfg.speed.c1);
    s.get("c2", cfg.speed.c2);
    s.finish();
    const std::string& m = cfg.speed.mode;
    if (m != "auto" && m != "two_shift_kpp" && m != "nonlocal_pulling")
      throw ConfigError("config: unknown speed mode " + m);
  }
  if (root.has("hj")) {
    Section h(root.sub("hj"), "hj");
    h.get("s_max", cfg.hj.s_max);
    h.get("h", cfg.hj.h);
    h.get("t0", cfg.hj.t0);
    h.get("t_final", cfg.hj.t_final);
    h.get("cfl", cfg.hj.cfl);
    h.get("mu_cap", cfg.hj.mu_cap);
    h.get("zero_tol", cfg.hj.zero_tol);
    h.get("defect_tol", cfg.hj.defect_tol);
    h.finish();
  }
  if (root.has("sim")) {
    Section s(root.sub("sim"), "sim");
    s.get("x_lo", cfg.sim.x_lo);
    s.get("x_hi", cfg.sim.x_hi);
    s.get("nx", cfg.sim.nx);
    s.get("dt", cfg.sim.dt);
    s.get("t_final", cfg.sim.t_final);
    s.get("theta", cfg.sim.theta);
    s.get("crank_nicolson", cfg.sim.crank_nicolson);
    s.get("snapshots", cfg.sim.snapshots);
    s.get("f1", cfg.sim.f1);
    s.get("f2", cfg.sim.f2);
    s.get("death_rate", cfg.sim.death_rate);
    s.get("l0", cfg.sim.l0);
    s.get("initial", cfg.sim.initial);
    s.get("amplitude", cfg.sim.amplitude);
    s.get("width", cfg.sim.width);
    s.get("fit_window", cfg.sim.fit_window);
    s.finish();
    if (cfg.sim.f1 != "fisher" && cfg.sim.f1 != "linear_death")
      throw ConfigError("config: unknown f1 " + cfg.sim.f1);
    if (cfg.sim.f2 != "none" && cfg.sim.f2 != "ricker")
      throw ConfigError("config: unknown f2 " + cfg.sim.f2);
    if (cfg.sim.initial != "bump" && cfg.sim.initial != "exponential")
      throw ConfigError("config: unknown initial data class " +
                        cfg.sim.initial);
  }
  if (root.has("validate")) {
    Section v(root.sub("validate"), "validate");
    v.get("tol_hj", cfg.validate.tol_hj);
    v.get("tol_sim", cfg.validate.tol_sim);
    v.finish();
  }
  if (root.has("sweep")) {
    Section s(root.sub("sweep"), "sweep");
    s.get("var", cfg.sweep.var);
    s.get("from", cfg.sweep.from);
    s.get("to", cfg.sweep.to);
    s.get("steps", cfg.sweep.steps);
    s.finish();
    if (cfg.sweep.var != "c1" && cfg.sweep.var != "c2" && cfg.sweep.var != "mu")
      throw ConfigError("config: sweep.var must be c1, c2 or mu");
    if (cfg.sweep.steps < 2)
      throw ConfigError("config: sweep.steps must be at least 2");
  }
  root.get("seed", cfg.seed);
  root.finish();
  return cfg;
}

json to_json(const RunConfig& cfg) {
  json j;
  j["kernel"] = {{"type", cfg.kernel.type},   {"tau", cfg.kernel.tau},
                 {"y", cfg.kernel.y},         {"tau0", cfg.kernel.tau0},
                 {"y_half", cfg.kernel.y_half}, {"sigma", cfg.kernel.sigma},
                 {"rate", cfg.kernel.rate},   {"n_tau", cfg.kernel.n_tau},
                 {"n_y", cfg.kernel.n_y}};
  j["env1"] = env_to_json(cfg.env1);
  if (cfg.has_env2) j["env2"] = env_to_json(cfg.env2);
  if (std::isfinite(cfg.mu))
    j["mu"] = cfg.mu;
  else
    j["mu"] = "inf";
  j["speed"] = {{"mode", cfg.speed.mode},
                {"r1", cfg.speed.r1},
                {"r2", cfg.speed.r2},
                {"c1", cfg.speed.c1},
                {"c2", cfg.speed.c2}};
  j["hj"] = {{"s_max", cfg.hj.s_max},   {"h", cfg.hj.h},
             {"t0", cfg.hj.t0},
             {"t_final", cfg.hj.t_final}, {"cfl", cfg.hj.cfl},
             {"mu_cap", cfg.hj.mu_cap}, {"zero_tol", cfg.hj.zero_tol},
             {"defect_tol", cfg.hj.defect_tol}};
  j["sim"] = {{"x_lo", cfg.sim.x_lo},
              {"x_hi", cfg.sim.x_hi},
              {"nx", cfg.sim.nx},
              {"dt", cfg.sim.dt},
              {"t_final", cfg.sim.t_final},
              {"theta", cfg.sim.theta},
              {"crank_nicolson", cfg.sim.crank_nicolson},
              {"snapshots", cfg.sim.snapshots},
              {"f1", cfg.sim.f1},
              {"f2", cfg.sim.f2},
              {"death_rate", cfg.sim.death_rate},
              {"l0", cfg.sim.l0},
              {"initial", cfg.sim.initial},
              {"amplitude", cfg.sim.amplitude},
              {"width", cfg.sim.width},
              {"fit_window", cfg.sim.fit_window}};
  j["validate"] = {{"tol_hj", cfg.validate.tol_hj},
                   {"tol_sim", cfg.validate.tol_sim}};
  j["sweep"] = {{"var", cfg.sweep.var},
                {"from", cfg.sweep.from},
                {"to", cfg.sweep.to},
                {"steps", cfg.sweep.steps}};
  j["seed"] = cfg.seed;
  return j;
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override must look like section.key=value: " +
                      assignment);
  const std::string path = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);

  json* node = &j;
  std::stringstream ss(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  if (parts.empty()) throw ConfigError("override has an empty path");
  for (size_t i = 0; i + 1 < parts.size(); ++i) node = &(*node)[parts[i]];

  json parsed = json::parse(value, nullptr, false);
  if (parsed.is_discarded()) parsed = value;  // bare string
  (*node)[parts.back()] = parsed;
}

DelayKernel build_kernel(const KernelConfig& kc) {
  if (kc.type == "none") return DelayKernel::none();
  if (kc.type == "point_mass") return DelayKernel::point_mass(kc.tau, kc.y);
  if (kc.type == "uniform_box")
    return DelayKernel::uniform_box(kc.tau0, kc.y_half, kc.n_tau, kc.n_y);
  return DelayKernel::gauss_exp(kc.sigma, kc.y_half, kc.n_y, kc.tau0, kc.rate,
                                kc.n_tau);
}

ShiftedEnvironment build_env(const EnvConfig& ec) {
  ShiftedEnvironment env(ec.baseline);
  for (const auto& t : ec.terms) {
    ProfileTerm term;
    term.c = t.c;
    term.lo = t.lo;
    term.hi = t.hi;
    term.width = t.width;
    if (t.shape == "step")
      term.shape = ProfileTerm::Shape::step;
    else if (t.shape == "tanh")
      term.shape = ProfileTerm::Shape::tanh_ramp;
    else
      term.shape = ProfileTerm::Shape::bump;
    env.add_term(term);
  }
  return env;
}

RayProfile build_profile(const RunConfig& cfg) {
  const ShiftedEnvironment e1 = build_env(cfg.env1);
  if (!cfg.has_env2) return ray_limit(e1);
  const ShiftedEnvironment e2 = build_env(cfg.env2);
  return ray_limit(e1, &e2);
}

ModelSpec build_model(const RunConfig& cfg) {
  ModelSpec m;
  m.f1 = cfg.sim.f1 == "fisher" ? ModelSpec::F1::fisher
                                : ModelSpec::F1::linear_death;
  m.f2 = cfg.sim.f2 == "none" ? ModelSpec::F2::none : ModelSpec::F2::ricker;
  m.death_rate = cfg.sim.death_rate;
  m.env1 = build_env(cfg.env1);
  if (cfg.has_env2) m.env2 = build_env(cfg.env2);
  m.kernel = build_kernel(cfg.kernel);
  m.L0 = cfg.sim.l0;
  return m;
}

InitialData build_initial(const RunConfig& cfg) {
  InitialData ic;
  ic.kind = cfg.sim.initial == "bump" ? InitialData::Kind::bump
                                      : InitialData::Kind::exponential;
  if (ic.kind == InitialData::Kind::exponential) {
    if (!std::isfinite(cfg.mu))
      throw ConfigError("config: exponential initial data needs finite mu");
    ic.mu = cfg.mu;
  }
  ic.amplitude = cfg.sim.amplitude;
  ic.width = cfg.sim.width;
  return ic;
}

GridSpec build_grid(const RunConfig& cfg) {
  return GridSpec{cfg.hj.s_max, cfg.hj.h};
}

HjParams build_hj_params(const RunConfig& cfg) {
  HjParams p;
  p.t0 = cfg.hj.t0;
  p.t_final = cfg.hj.t_final;
  p.cfl = cfg.hj.cfl;
  p.mu_cap_override = cfg.hj.mu_cap;
  p.defect_tol = cfg.hj.defect_tol;
  return p;
}

SimParams build_sim_params(const RunConfig& cfg) {
  SimParams p;
  p.x_lo = cfg.sim.x_lo;
  p.x_hi = cfg.sim.x_hi;
  p.nx = cfg.sim.nx;
  p.dt = cfg.sim.dt;
  p.t_final = cfg.sim.t_final;
  p.theta = cfg.sim.theta;
  p.crank_nicolson = cfg.sim.crank_nicolson;
  p.snapshot_count = cfg.sim.snapshots;
  return p;
}

}  // namespace kpp::cli
