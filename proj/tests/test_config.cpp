#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "config.hpp"
#include "kpp/errors.hpp"

using namespace kpp;
using namespace kpp::cli;
using nlohmann::json;

TEST_CASE("defaults round-trip losslessly through serialization") {
  RunConfig def;
  json echo = to_json(def);
  RunConfig back = parse_config(echo);
  CHECK(to_json(back) == echo);
}

TEST_CASE("parse fills documented defaults for omitted sections") {
  RunConfig cfg = parse_config(json::object());
  CHECK(cfg.hj.h == 0.01);
  CHECK(cfg.hj.s_max == 6.0);
  CHECK(cfg.sim.t_final == 200.0);
  CHECK(cfg.sim.nx == 2501);
  CHECK(std::isinf(cfg.mu));
}

TEST_CASE("unknown keys are rejected at every level") {
  CHECK_THROWS_AS(parse_config(json{{"nonsense", 1}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"hj", {{"dx", 0.01}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"kernel", {{"kind", "point_mass"}}}}),
                  ConfigError);
  CHECK_THROWS_AS(
      parse_config(json{{"env1", {{"terms", json::array({{{"slope", 1}}})}}}}),
      ConfigError);
}

TEST_CASE("mu accepts inf and positive reals") {
  RunConfig a = parse_config(json{{"mu", "inf"}});
  CHECK(std::isinf(a.mu));
  RunConfig b = parse_config(json{{"mu", 0.5}});
  CHECK(b.mu == 0.5);
}

TEST_CASE("dotted overrides take effect and win over the file") {
  json base = {{"hj", {{"h", 0.02}}}};
  apply_override(base, "hj.h=0.005");
  apply_override(base, "mu=inf");
  apply_override(base, "env1.baseline=0.25");
  RunConfig cfg = parse_config(base);
  CHECK(cfg.hj.h == 0.005);
  CHECK(std::isinf(cfg.mu));
  CHECK(cfg.env1.baseline == 0.25);
}

TEST_CASE("override parses JSON values including arrays") {
  json base = json::object();
  apply_override(base,
                 "env1.terms=[{\"c\":2.5,\"shape\":\"step\",\"lo\":0,"
                 "\"hi\":0.75}]");
  RunConfig cfg = parse_config(base);
  REQUIRE(cfg.env1.terms.size() == 1);
  CHECK(cfg.env1.terms[0].c == 2.5);
  CHECK(cfg.env1.terms[0].hi == 0.75);
}

TEST_CASE("builders construct consistent core objects") {
  json base = {{"env1",
                {{"baseline", 0.25},
                 {"terms", json::array({{{"c", 2.5},
                                         {"shape", "step"},
                                         {"lo", 0.0},
                                         {"hi", 0.75}}})}}},
               {"mu", "inf"}};
  RunConfig cfg = parse_config(base);
  auto profile = build_profile(cfg);
  REQUIRE(profile.breakpoints().size() == 1);
  CHECK(profile.breakpoints()[0] == 2.5);
  CHECK(profile.eval(1.0, Envelope::upper).first == doctest::Approx(0.25));
  CHECK(profile.eval(4.0, Envelope::upper).first == doctest::Approx(1.0));

  auto grid = build_grid(cfg);
  CHECK(grid.h == cfg.hj.h);

  auto params = build_hj_params(cfg);
  CHECK(params.t_final == cfg.hj.t_final);
  CHECK(params.t0 == cfg.hj.t0);
}

TEST_CASE("kernel config dispatch") {
  RunConfig cfg = parse_config(
      json{{"kernel", {{"type", "point_mass"}, {"tau", 1.0}, {"y", 0.0}}}});
  auto k = build_kernel(cfg.kernel);
  REQUIRE(k.atoms().size() == 1);
  CHECK(k.atoms()[0].tau == 1.0);

  CHECK_THROWS_AS(
      parse_config(json{{"kernel", {{"type", "mystery"}}}}), ConfigError);
}
