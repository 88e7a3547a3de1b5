#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "slowfast/calculus.hpp"
#include "slowfast/circle_action.hpp"
#include "slowfast/errors.hpp"
#include "slowfast/fixtures.hpp"

using namespace slowfast;
using doctest::Approx;

TEST_CASE("natural order round trip") {
  const Fixture f = elastic_pendulum();
  const std::vector<double> nat{1, 2, 3, 4};
  const auto lib = f.from_natural_order(nat);
  CHECK(lib == std::vector<double>{3, 4, 1, 2});
  CHECK(f.to_natural_order(lib) == nat);
  CHECK(f.natural_labels.front() == "p");
  CHECK_THROWS_AS(f.from_natural_order(std::vector<double>{1, 2}), DomainError);
  const Fixture c = charged_particle();
  CHECK(c.to_natural_order(c.default_point) == std::vector<double>{0.2, 1.0, 0.1, 0.3});
  CHECK(f.to_natural_order(f.default_point) == std::vector<double>{0.1, 1.0, 0.5, 0.0});
}

TEST_CASE("elastic pendulum values") {
  const Fixture f = elastic_pendulum(1.0, 1.0);
  const auto m = f.from_natural_order(std::vector<double>{1, 1, 1, 0});
  CHECK(f.system.hamiltonian(m) == Approx(1.5));
  CHECK(f.system.momentum(m) == Approx(0.625));
  CHECK(f.system.frequency(m) == Approx(1.0));
  CHECK(f.F1_closed(m) == Approx(1.0));
  CHECK(f.F2_closed(m) == Approx(-0.875));
  const Fixture g = elastic_pendulum(2.0, 0.0);
  const std::vector<double> z{0.4, 0.3, 0.0, 0.0};
  CHECK(g.system.momentum(z) == Approx((0.16 + 4.0 * 0.09) / 4.0));
}

TEST_CASE("charged particle values") {
  const Fixture f = charged_particle(1.0, 0.0);
  const std::vector<double> m{0.3, -0.4, 0.1, 1.0};
  CHECK(f.system.frequency(m) == Approx(1.0));
  CHECK(f.system.momentum(m) == Approx(0.125));
  const Fixture g = charged_particle(2.0, 0.3);
  const std::vector<double> n{0.1, 0.3, 0.2, 1.5};
  CHECK(g.system.frequency(n) == Approx(std::sqrt(4.0 * std::pow(1.5, 4) + 0.09) / 2.25));
  CHECK(g.has_F1_closed());
  CHECK_FALSE(g.has_F2_closed());
}

TEST_CASE("fast gradient of J is that of H over omega") {
  for (const auto& f : {elastic_pendulum(1.3, 0.7), charged_particle(1.2, 0.4)}) {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 20; ++i) {
      const auto m = f.random_point(rng);
      const auto gJ = partial_gradient(f.system.momentum, m, 0, 2);
      const auto gH = partial_gradient(f.system.hamiltonian, m, 0, 2);
      const double w = f.system.frequency(m);
      CHECK(gJ[0] == Approx(gH[0] / w).epsilon(1e-12));
      CHECK(gJ[1] == Approx(gH[1] / w).epsilon(1e-12));
    }
  }
}

TEST_CASE("transverse momentum of the charged particle") {
  const Fixture f = charged_particle(1.0, 0.3);
  std::mt19937_64 rng(12);
  for (int i = 0; i < 20; ++i) {
    const PhasePoint m = f.point(f.random_point(rng));
    CHECK(verify_transverse_momentum(f, m) <= 1e-10);
  }
  CHECK_THROWS_AS(verify_transverse_momentum(f, f.point(std::vector<double>{0, 0, 0, 0.1})), DomainError);
}

TEST_CASE("domains") {
  const Fixture c = charged_particle();
  CHECK(c.system.in_domain(c.default_point));
  CHECK_FALSE(c.system.in_domain(std::vector<double>{0.1, 0.3, 0.2, 0.0}));
  CHECK_THROWS_AS(c.system.require_in_domain(std::vector<double>{0.1, 0.3, 0.2, 0.0}), DomainError);
  const Fixture p = elastic_pendulum();
  CHECK_FALSE(p.system.in_domain(std::vector<double>{3.0, 0.0, 0.0, 0.0}));
}

TEST_CASE("registry") {
  CHECK(list_fixtures() == std::vector<std::string>{"charged_particle", "elastic_pendulum", "quadratic_benchmark"});
  for (const auto& name : list_fixtures()) CHECK(get_fixture(name).name == name);
  CHECK_THROWS_AS(get_fixture("kepler"), NotFound);
  CHECK_THROWS_AS(get_fixture("elastic_pendulum", {{"B", 1.0}}), InvalidParameter);
  CHECK_THROWS_AS(get_fixture("elastic_pendulum", {{"Omega", -1.0}}), InvalidParameter);
  CHECK_THROWS_AS(get_fixture("charged_particle", {{"omega_scale", 0.0}}), InvalidParameter);
  const Fixture f = get_fixture("elastic_pendulum", {{"Omega", 2.0}, {"gamma", 0.3}});
  CHECK(f.params.at("Omega") == 2.0);
  CHECK(f.params.at("gamma") == 0.3);
  const Fixture s = get_fixture("charged_particle", {{"omega_scale", 2.0}});
  CHECK(s.system.frequency(s.default_point) == Approx(2.0 * charged_particle().system.frequency(s.default_point)));
}

TEST_CASE("analytic flows match numeric integration of the generator") {
  for (const auto& f : {elastic_pendulum(1.3, 0.7), charged_particle(1.2, 0.4), quadratic_benchmark()}) {
    const CircleAction an(f.system);
    const CircleAction nu(f.system, FlowMode::numeric);
    const auto m = f.default_point;
    const auto a = an.flow_at(1.9, m), b = nu.flow_at(1.9, m);
    for (std::size_t i = 0; i < 4; ++i) CHECK(a[i] == Approx(b[i]).epsilon(1e-9));
  }
}
