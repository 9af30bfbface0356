#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "config.hpp"
#include "kpp/dispersion.hpp"
#include "kpp/errors.hpp"
#include "kpp/hj.hpp"
#include "kpp/simulate.hpp"
#include "kpp/speeds.hpp"

namespace fs = std::filesystem;
using kpp::cli::RunConfig;
using nlohmann::json;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  int jobs = 1;
};

RunConfig load_config(const CommonOpts& opts) {
  json j = json::object();
  if (!opts.config_path.empty()) {
    std::ifstream in(opts.config_path);
    if (!in) throw kpp::ConfigError("cannot open config " + opts.config_path);
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw kpp::ConfigError("config parse error: " + std::string(e.what()));
    }
  }
  for (const auto& ov : opts.overrides) kpp::cli::apply_override(j, ov);
  return kpp::cli::parse_config(j);
}

fs::path resolve_out(const CommonOpts& opts) {
  std::string dir = opts.out_dir;
  if (dir.empty()) {
    if (const char* env = std::getenv("KPPFRONT_OUT")) dir = env;
  }
  if (dir.empty()) dir = "out";
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p))
    throw kpp::ConfigError("cannot create output directory " + dir);
  return p;
}

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream out(path);
  out << body;
  if (!out) throw kpp::ConfigError("cannot write " + path.string());
}

void write_meta(const fs::path& out, const RunConfig& cfg,
                const std::string& command, json extra) {
  json meta;
  meta["command"] = command;
  meta["config"] = kpp::cli::to_json(cfg);
  meta["results"] = std::move(extra);
  write_file(out / "meta.json", meta.dump(2) + "\n");
}

json speed_to_json(const kpp::SpeedResult& r) {
  json j;
  j["s_hat"] = r.s_hat;
  j["regime"] = r.regime;
  if (r.underline_p) j["underline_p"] = *r.underline_p;
  if (r.bar_p) j["bar_p"] = *r.bar_p;
  if (r.mu_star_minus) j["mu_star_minus"] = *r.mu_star_minus;
  if (r.mu_star_plus) j["mu_star_plus"] = *r.mu_star_plus;
  if (r.c_star_minus) j["c_star_minus"] = *r.c_star_minus;
  if (r.c_star_plus) j["c_star_plus"] = *r.c_star_plus;
  return j;
}

// Analytic route shared by speed, validate and sweep.
kpp::SpeedResult analytic_speed(const RunConfig& cfg) {
  if (cfg.speed.mode == "two_shift_kpp")
    return kpp::speed_two_shift_kpp(cfg.speed.r1, cfg.speed.r2, cfg.speed.c1,
                                    cfg.speed.c2);
  if (cfg.speed.mode == "nonlocal_pulling") {
    kpp::SpeedResult r;
    r.s_hat =
        kpp::speed_nonlocal_pulling(cfg.speed.r1, cfg.speed.r2, cfg.speed.c1);
    r.regime = "nonlocal-pulling";
    return r;
  }
  const kpp::RayProfile profile = kpp::cli::build_profile(cfg);
  const kpp::DelayKernel kernel = kpp::cli::build_kernel(cfg.kernel);
  const auto report = kpp::check_hypotheses(profile, kernel);
  if (!report.accepted()) {
    std::string clause = "unknown";
    for (const auto& c : report.clauses)
      if (!c.pass) {
        clause = c.name;
        break;
      }
    throw kpp::RegimeError("hypothesis check failed at clause " + clause);
  }
  const auto& segs = profile.segments();
  if (segs.size() == 1) {
    kpp::DispersionRelation rel(segs[0].r1, segs[0].r2, kernel);
    return kpp::speed_homogeneous(rel, cfg.mu);
  }
  if (segs.size() == 2) {
    kpp::DispersionRelation rm(segs[0].r1, segs[0].r2, kernel);
    kpp::DispersionRelation rp(segs[1].r1, segs[1].r2, kernel);
    return kpp::speed_single_shift(rm, rp, profile.breakpoints()[0], cfg.mu);
  }
  throw kpp::ConfigError(
      "no analytic formula for this profile shape; use speed.mode = "
      "two_shift_kpp for the two-shift table");
}

int cmd_speed(const CommonOpts& opts, bool write_outputs) {
  const RunConfig cfg = load_config(opts);
  const kpp::SpeedResult res = analytic_speed(cfg);
  const json j = speed_to_json(res);
  std::cout << j.dump(2) << "\n";
  if (write_outputs) {
    const fs::path out = resolve_out(opts);
    write_file(out / "speed.json", j.dump(2) + "\n");
    write_meta(out, cfg, "speed", j);
  }
  return 0;
}

int cmd_hj(const CommonOpts& opts) {
  const RunConfig cfg = load_config(opts);
  const kpp::RayProfile profile = kpp::cli::build_profile(cfg);
  const kpp::DelayKernel kernel = kpp::cli::build_kernel(cfg.kernel);
  const kpp::RaySolution sol =
      kpp::hj_solve(profile, kernel, cfg.mu, kpp::cli::build_grid(cfg),
                    kpp::cli::build_hj_params(cfg));
  double s_hat = sol.s_hat;
  if (cfg.hj.zero_tol > 0.0) s_hat = kpp::free_boundary(sol, cfg.hj.zero_tol);

  const fs::path out = resolve_out(opts);
  std::string csv = "s,rho,rho_over_s\n";
  char line[128];
  for (size_t i = 0; i < sol.rho.size(); ++i) {
    const double s = sol.s((int)i);
    std::snprintf(line, sizeof line, "%.10g,%.10g,%.10g\n", s, sol.rho[i],
                  sol.rho[i] / s);
    csv += line;
  }
  write_file(out / "rho.csv", csv);

  json j = {{"s_hat", s_hat},
            {"mu_cap", sol.mu_cap},
            {"self_sim_defect", sol.self_sim_defect},
            {"h", sol.h},
            {"s_max", sol.s_max},
            {"cells", sol.rho.size()},
            {"no_zero_flag", sol.no_zero_flag},
            {"short_grid_flag", sol.short_grid_flag}};
  std::cout << j.dump(2) << "\n";
  write_meta(out, cfg, "hj", j);
  return 0;
}

int cmd_simulate(const CommonOpts& opts) {
  const RunConfig cfg = load_config(opts);
  const kpp::SimResult sim =
      kpp::simulate(kpp::cli::build_model(cfg), kpp::cli::build_initial(cfg),
                    kpp::cli::build_sim_params(cfg));
  const double window = cfg.sim.fit_window > 0.0 ? cfg.sim.fit_window
                                                 : cfg.sim.t_final / 3.0;
  const kpp::SpeedFit fit = kpp::estimate_speed(
      sim.trace, cfg.sim.t_final - window, cfg.sim.t_final);

  const fs::path out = resolve_out(opts);
  std::string csv = "t,x_theta\n";
  char line[96];
  for (size_t i = 0; i < sim.trace.t.size(); ++i) {
    std::snprintf(line, sizeof line, "%.10g,%.10g\n", sim.trace.t[i],
                  sim.trace.x[i]);
    csv += line;
  }
  write_file(out / "front.csv", csv);

  json j = {{"c_hat", fit.c_hat},
            {"stderr", fit.stderr_slope},
            {"fit_samples", fit.samples},
            {"theta", cfg.sim.theta},
            {"dt", sim.dt},
            {"clamp_count", sim.clamp_count},
            {"cell_steps", sim.cell_steps},
            {"u_max_seen", sim.u_max_seen}};
  std::cout << j.dump(2) << "\n";
  write_meta(out, cfg, "simulate", j);
  return 0;
}

int cmd_validate(const CommonOpts& opts) {
  const RunConfig cfg = load_config(opts);
  const kpp::SpeedResult analytic = analytic_speed(cfg);

  const kpp::RayProfile profile = kpp::cli::build_profile(cfg);
  const kpp::DelayKernel kernel = kpp::cli::build_kernel(cfg.kernel);
  const kpp::RaySolution sol =
      kpp::hj_solve(profile, kernel, cfg.mu, kpp::cli::build_grid(cfg),
                    kpp::cli::build_hj_params(cfg));

  const kpp::SimResult sim =
      kpp::simulate(kpp::cli::build_model(cfg), kpp::cli::build_initial(cfg),
                    kpp::cli::build_sim_params(cfg));
  const double window = cfg.sim.fit_window > 0.0 ? cfg.sim.fit_window
                                                 : cfg.sim.t_final / 3.0;
  const kpp::SpeedFit fit = kpp::estimate_speed(
      sim.trace, cfg.sim.t_final - window, cfg.sim.t_final);

  const double d_hj = std::abs(sol.s_hat - analytic.s_hat);
  const double d_sim = std::abs(fit.c_hat - analytic.s_hat) / analytic.s_hat;
  const bool hj_ok = d_hj <= cfg.validate.tol_hj;
  const bool sim_ok = d_sim <= cfg.validate.tol_sim;

  std::printf("route      s_hat        diff         tol          status\n");
  std::printf("analytic   %-12.7g -            -            reference\n",
              analytic.s_hat);
  std::printf("hj         %-12.7g %-12.3g %-12.3g %s\n", sol.s_hat, d_hj,
              cfg.validate.tol_hj, hj_ok ? "pass" : "FAIL");
  std::printf("simulate   %-12.7g %-12.3g %-12.3g %s\n", fit.c_hat, d_sim,
              cfg.validate.tol_sim, sim_ok ? "pass" : "FAIL");

  json j = {{"analytic", speed_to_json(analytic)},
            {"hj", {{"s_hat", sol.s_hat}, {"abs_diff", d_hj}, {"pass", hj_ok}}},
            {"simulate",
             {{"c_hat", fit.c_hat}, {"rel_diff", d_sim}, {"pass", sim_ok}}},
            {"pass", hj_ok && sim_ok}};
  const fs::path out = resolve_out(opts);
  write_file(out / "validate.json", j.dump(2) + "\n");
  write_meta(out, cfg, "validate", j);
  return (hj_ok && sim_ok) ? 0 : 2;
}

int cmd_sweep(const CommonOpts& opts) {
  const RunConfig base = load_config(opts);
  const int n = base.sweep.steps;
  std::vector<std::string> rows(n);
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::string first_error;
  std::mutex err_mu;

  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      RunConfig cfg = base;
      const double v = base.sweep.from +
                       (base.sweep.to - base.sweep.from) * i / (n - 1);
      if (base.sweep.var == "mu") {
        cfg.mu = v;
      } else if (base.sweep.var == "c1") {
        cfg.speed.c1 = v;
        if (cfg.speed.mode == "auto" && !cfg.env1.terms.empty())
          cfg.env1.terms[0].c = v;
      } else {
        cfg.speed.c2 = v;
        if (cfg.speed.mode == "auto" && cfg.env1.terms.size() > 1)
          cfg.env1.terms[1].c = v;
      }
      try {
        const kpp::SpeedResult r = analytic_speed(cfg);
        auto opt = [](const std::optional<double>& o) {
          char b[32];
          if (!o) return std::string();
          std::snprintf(b, sizeof b, "%.10g", *o);
          return std::string(b);
        };
        char head[128];
        std::snprintf(head, sizeof head, "%.10g,%.10g,%.10g,%.10g,",
                      std::isfinite(cfg.mu) ? cfg.mu : -1.0, cfg.speed.c1,
                      cfg.speed.c2, r.s_hat);
        rows[i] = std::string(head) + r.regime + "," + opt(r.underline_p) +
                  "," + opt(r.bar_p) + "," + opt(r.mu_star_minus) + "," +
                  opt(r.mu_star_plus) + "\n";
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!failed.exchange(true)) first_error = e.what();
      }
    }
  };

  const int jobs = std::max(1, opts.jobs);
  std::vector<std::thread> pool;
  for (int k = 0; k < jobs; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failed.load()) throw kpp::Error("sweep entry failed: " + first_error);

  std::string csv =
      "mu,c1,c2,s_hat,regime,underline_p,bar_p,mu_star_minus,mu_star_plus\n";
  for (const auto& row : rows) csv += row;
  const fs::path out = resolve_out(opts);
  write_file(out / "sweep.csv", csv);
  write_meta(out, base, "sweep", {{"rows", n}});
  std::cout << "wrote " << (out / "sweep.csv").string() << " (" << n
            << " rows)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "kppfront: spreading speeds of reactive fronts in shifting "
      "environments, by analytic formula, Hamilton-Jacobi free boundary, "
      "and direct simulation"};
  app.require_subcommand(1);

  CommonOpts opts;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "JSON config file");
    sub->add_option("--out", opts.out_dir,
                    "output directory (default $KPPFRONT_OUT or ./out)");
    sub->add_option("--set", opts.overrides,
                    "override config entries, e.g. --set sim.t_final=100");
    sub->add_option("--jobs", opts.jobs, "worker threads for sweeps");
  };

  CLI::App* sp = app.add_subcommand("speed", "analytic spreading speed");
  CLI::App* hj = app.add_subcommand("hj", "free boundary of the ray problem");
  CLI::App* sim = app.add_subcommand("simulate", "direct front simulation");
  CLI::App* val = app.add_subcommand("validate", "three-route comparison");
  CLI::App* sw = app.add_subcommand("sweep", "parameter sweep to CSV");
  for (CLI::App* sub : {sp, hj, sim, val, sw}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (sp->parsed()) return cmd_speed(opts, true);
    if (hj->parsed()) return cmd_hj(opts);
    if (sim->parsed()) return cmd_simulate(opts);
    if (val->parsed()) return cmd_validate(opts);
    if (sw->parsed()) return cmd_sweep(opts);
  } catch (const kpp::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const kpp::RegimeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const kpp::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const kpp::OverflowError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
