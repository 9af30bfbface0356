#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "kpp/dispersion.hpp"
#include "kpp/environment.hpp"
#include "kpp/errors.hpp"
#include "kpp/kernel.hpp"
#include "kpp/rootfind.hpp"

using namespace kpp;

namespace {

// Independent oracle: solve -lam + p^2 + r1 + r2 mgf(p, -lam) = 0 by plain
// bisection on a wide bracket.
double lambda_oracle(double r1, double r2, const DelayKernel& k, double p) {
  auto f = [&](double lam) {
    return -lam + p * p + r1 + r2 * k.mgf(p, -lam);
  };
  double lo = -50.0, hi = 200.0;
  return bisect(f, lo, hi, 1e-14, 1e-13, 400);
}

DispersionRelation random_relation(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double r2 = 0.3 + 1.2 * u(rng);
  double r1 = -0.4 + 1.0 * u(rng);
  if (r1 + r2 <= 0.1) r1 = 0.1 - r2 + 0.5;
  switch (static_cast<int>(3.0 * u(rng))) {
    case 0:
      return DispersionRelation(r1 + r2, 0.0, DelayKernel::none());
    case 1:
      return DispersionRelation(
          r1, r2, DelayKernel::point_mass(0.2 + u(rng), 0.0));
    default:
      return DispersionRelation(
          r1, r2,
          DelayKernel::uniform_box(0.5 + u(rng), 0.5 + u(rng), 6, 17));
  }
}

}  // namespace

TEST_CASE("delta closed forms") {
  DispersionRelation kpp(1.0, 0.0, DelayKernel::none());
  CHECK(kpp.delta(2.0, 1.0) == doctest::Approx(0.0).epsilon(1e-15));

  // Omega constant: lambda = e^{-lambda} at p = 0.
  DispersionRelation delayed(0.0, 1.0, DelayKernel::point_mass(1.0, 0.0));
  CHECK(delayed.delta(0.5671432904097838, 0.0) ==
        doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("delta decreases by at least one per unit lambda") {
  DispersionRelation rel(0.25, 1.0, DelayKernel::point_mass(1.0, 0.3));
  for (double lam : {-2.0, 0.0, 1.5}) {
    for (double p : {0.0, 0.7, 2.0}) {
      CHECK(rel.delta(lam + 1.0, p) - rel.delta(lam, p) <= -1.0);
    }
  }
}

TEST_CASE("lambda closed forms and oracles") {
  DispersionRelation kpp(1.0, 0.0, DelayKernel::none());
  CHECK(kpp.lambda(0.5) == doctest::Approx(1.25).epsilon(1e-14));

  DispersionRelation omega(0.0, 1.0, DelayKernel::point_mass(1.0, 0.0));
  CHECK(omega.lambda(0.0) ==
        doctest::Approx(0.5671432904097838).epsilon(1e-10));

  // Negative r1 with (H4)-positive sum.
  auto pm = DelayKernel::point_mass(1.0, 0.0);
  DispersionRelation neg(-0.5, 1.5, pm);
  CHECK(neg.lambda(0.0) ==
        doctest::Approx(lambda_oracle(-0.5, 1.5, pm, 0.0)).epsilon(1e-11));
}

TEST_CASE("lambda root residual on 100 random p") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> pdist(-10.0, 10.0);
  DispersionRelation rel(0.25, 1.0,
                         DelayKernel::uniform_box(1.0, 1.0, 8, 17));
  for (int i = 0; i < 100; ++i) {
    double p = pdist(rng);
    CHECK(std::abs(rel.delta(rel.lambda(p), p)) <= 1e-12);
  }
}

TEST_CASE("lambda is even for symmetric kernels") {
  DispersionRelation rel(0.25, 1.0,
                         DelayKernel::uniform_box(1.0, 1.5, 8, 33));
  for (double p : {0.3, 1.1, 2.7}) {
    CHECK(rel.lambda(p) == doctest::Approx(rel.lambda(-p)).epsilon(1e-12));
  }
}

TEST_CASE("lambda is strictly convex and lambda(p)/p unbounded") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> pdist(-6.0, 6.0);
  for (int trial = 0; trial < 10; ++trial) {
    auto rel = random_relation(rng);
    for (int i = 0; i < 30; ++i) {
      double a = pdist(rng), b = pdist(rng);
      if (std::abs(a - b) < 1e-3) continue;
      double mid = rel.lambda(0.5 * (a + b));
      double avg = 0.5 * (rel.lambda(a) + rel.lambda(b));
      CHECK(mid < avg + 1e-12);
    }
    CHECK(rel.lambda(40.0) / 40.0 > rel.lambda(5.0) / 5.0 + 10.0);
  }
}

TEST_CASE("lambda_prime matches finite differences") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> pdist(-5.0, 5.0);
  DispersionRelation kpp(1.0, 0.0, DelayKernel::none());
  CHECK(kpp.lambda_prime(1.0) == doctest::Approx(2.0).epsilon(1e-12));

  for (int trial = 0; trial < 8; ++trial) {
    auto rel = random_relation(rng);
    CHECK(std::abs(rel.lambda_prime(0.0)) <= 1e-9);
    for (int i = 0; i < 10; ++i) {
      double p = pdist(rng);
      const double h = 1e-5;
      double fd = (rel.lambda(p + h) - rel.lambda(p - h)) / (2 * h);
      CHECK(rel.lambda_prime(p) ==
            doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("mu_star closed forms") {
  DispersionRelation a(1.0, 0.0, DelayKernel::none());
  auto ma = a.mu_star();
  CHECK(ma.mu_star == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(ma.c_star == doctest::Approx(2.0).epsilon(1e-10));

  DispersionRelation b(0.25, 0.0, DelayKernel::none());
  auto mb = b.mu_star();
  CHECK(mb.mu_star == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(mb.c_star == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("mu_star against a grid scan") {
  DispersionRelation rel(-0.5, 1.5, DelayKernel::point_mass(1.0, 0.0));
  auto ms = rel.mu_star();
  double best = 1e300, best_p = 0.0;
  for (double p = 1e-4; p <= 10.0; p += 1e-4) {
    double v = rel.lambda(p) / p;
    if (v < best) {
      best = v;
      best_p = p;
    }
  }
  CHECK(ms.mu_star == doctest::Approx(best_p).epsilon(2e-4));
  CHECK(ms.c_star == doctest::Approx(best).epsilon(1e-8));
  // First-order optimality: lambda'(mu*) mu* = lambda(mu*).
  CHECK(std::abs(rel.lambda_prime(ms.mu_star) * ms.mu_star -
                 rel.lambda(ms.mu_star)) <= 1e-8 * (1 + rel.lambda(ms.mu_star)));
}

TEST_CASE("psi inverts lambda_prime") {
  DispersionRelation kpp(1.0, 0.0, DelayKernel::none());
  CHECK(kpp.psi(3.0) == doctest::Approx(1.5).epsilon(1e-10));

  std::mt19937 rng(19);
  std::uniform_real_distribution<double> pdist(-4.0, 4.0);
  for (int trial = 0; trial < 8; ++trial) {
    auto rel = random_relation(rng);
    for (int i = 0; i < 10; ++i) {
      double p = pdist(rng);
      CHECK(rel.psi(rel.lambda_prime(p)) ==
            doctest::Approx(p).epsilon(1e-9));
    }
  }
}

TEST_CASE("psi against dense tabulation of lambda_prime") {
  DispersionRelation rel(0.0, 1.0, DelayKernel::point_mass(1.0, 0.0));
  for (double s : {0.5, 1.0, 2.0, 4.0}) {
    double p = rel.psi(s);
    CHECK(std::abs(rel.lambda_prime(p) - s) <= 1e-10);
    // Bracketing check from the tabulated neighbors.
    CHECK(rel.lambda_prime(p - 1e-6) < s);
    CHECK(rel.lambda_prime(p + 1e-6) > s);
  }
}

TEST_CASE("ordering of lambda and c_star across a shift") {
  DispersionRelation minus(0.25, 0.0, DelayKernel::none());
  DispersionRelation plus(1.0, 0.0, DelayKernel::none());
  for (double p = -5.0; p <= 5.0; p += 0.25) {
    CHECK(minus.lambda(p) < plus.lambda(p));
  }
  CHECK(minus.mu_star().c_star < plus.mu_star().c_star);

  auto pm = DelayKernel::point_mass(0.7, 0.2);
  DispersionRelation dminus(0.1, 0.4, pm);
  DispersionRelation dplus(0.3, 0.9, pm);
  for (double p = -3.0; p <= 3.0; p += 0.25) {
    CHECK(dminus.lambda(p) < dplus.lambda(p));
  }
  CHECK(dminus.mu_star().c_star < dplus.mu_star().c_star);
}

TEST_CASE("lambda results are independent of cache state") {
  std::vector<double> ps = {1.3, -0.2, 1.3, 4.0, -0.2, 0.0};
  DispersionRelation a(0.25, 1.0, DelayKernel::point_mass(1.0, 0.1));
  DispersionRelation b(0.25, 1.0, DelayKernel::point_mass(1.0, 0.1));
  // Warm b's cache in a different order, then compare bitwise.
  for (auto it = ps.rbegin(); it != ps.rend(); ++it) b.lambda(*it);
  for (double p : ps) {
    CHECK(a.lambda(p) == b.lambda(p));
  }
}

TEST_CASE("htilde implicit Hamiltonian") {
  auto profile = RayProfile::constant(1.0);
  CHECK(htilde(profile, DelayKernel::none(), 0.5, 1.0) ==
        doctest::Approx(2.0).epsilon(1e-12));

  auto pm = DelayKernel::point_mass(1.0, 0.0);
  auto p2 = RayProfile::piecewise({1.0}, {{0.0, 1.0}, {0.0, 1.0}});
  CHECK(htilde(p2, pm, 0.5, 0.0) ==
        doctest::Approx(0.5671432904097838).epsilon(1e-9));

  // htilde coincides with the per-segment lambda and is convex in p.
  auto shift = RayProfile::piecewise({2.5}, {{0.25, 0.0}, {1.0, 0.0}});
  DispersionRelation minus(0.25, 0.0, DelayKernel::none());
  DispersionRelation plus(1.0, 0.0, DelayKernel::none());
  CHECK(htilde(shift, DelayKernel::none(), 1.0, 0.7) ==
        doctest::Approx(minus.lambda(0.7)).epsilon(1e-12));
  CHECK(htilde(shift, DelayKernel::none(), 3.0, 0.7) ==
        doctest::Approx(plus.lambda(0.7)).epsilon(1e-12));

  std::mt19937 rng(23);
  std::uniform_real_distribution<double> pdist(-3.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    double a = pdist(rng), b = pdist(rng);
    double mid = htilde(p2, pm, 0.5, 0.5 * (a + b));
    double avg = 0.5 * (htilde(p2, pm, 0.5, a) + htilde(p2, pm, 0.5, b));
    CHECK(mid <= avg + 1e-10);
  }
}

TEST_CASE("construction guards") {
  CHECK_THROWS_AS(DispersionRelation(1.0, -0.5, DelayKernel::none()),
                  ConfigError);
  CHECK_THROWS_AS(DispersionRelation(1.0, 0.5, DelayKernel::none()),
                  ConfigError);
  DispersionRelation nonpos(-1.0, 0.0, DelayKernel::none());
  CHECK_THROWS_AS(nonpos.mu_star(), RegimeError);
}
