#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "slowfast/calculus.hpp"
#include "slowfast/circle_action.hpp"
#include "slowfast/errors.hpp"
#include "slowfast/fixtures.hpp"
#include "slowfast/invariants.hpp"

using namespace slowfast;
using doctest::Approx;

namespace {

// Pendulum with Omega = gamma = 1 at (p, q, y, x) = (1, 1, 1, 0).
struct Oracle {
  Fixture f = elastic_pendulum(1.0, 1.0);
  PhasePoint m = f.point(f.from_natural_order(std::vector<double>{1, 1, 1, 0}));
};

}  // namespace

TEST_CASE("variant names") {
  CHECK(to_string(F2Variant::ai3) == "ai3");
  CHECK(to_string(F2Variant::ty3) == "ty3");
  CHECK(parse_f2_variant("ty3") == F2Variant::ty3);
  CHECK_THROWS_AS(parse_f2_variant("xx"), InvalidParameter);
}

TEST_CASE("hypotheses hold on both fixtures") {
  for (const auto& f : {elastic_pendulum(1.0, 0.1), charged_particle(1.0, 0.3)}) {
    const CircleAction a(f.system);
    std::mt19937_64 rng(11);
    for (int i = 0; i < 10; ++i) {
      const PhasePoint m = f.point(f.random_point(rng));
      const HypothesisReport r = check_hypotheses(a, m);
      REQUIRE(r.items.size() == 4);
      for (const auto& it : r.items) {
        INFO(f.name << " " << it.name << " " << it.residual);
        CHECK(it.pass);
        CHECK(it.residual <= 1e-8);
      }
    }
  }
}

TEST_CASE("corrupted momentum map fails the momentum-map check") {
  Fixture f = elastic_pendulum(1.0, 0.5);
  f.system.momentum = ScalarField::lift([](auto m) { return 0.5 * (m[0] * m[0] + m[1] * m[1]) * 1.1; });
  const CircleAction a(f.system);
  const PhasePoint m = f.point(f.default_point);
  const auto r = check_hypotheses(a, m);
  CHECK_FALSE(r.item("momentum_map").pass);
  CHECK_FALSE(r.all_pass());
  CHECK_THROWS_AS(check_hypotheses(a, m, {}, true), HypothesisViolation);
}

TEST_CASE("slow gauge shift breaks only the adiabatic condition") {
  Fixture f = elastic_pendulum(1.0, 0.5);
  const ScalarField J = f.system.momentum;
  f.system.momentum = ScalarField::lift([J](auto m) { return J(m) + 0.3 * m[2] + 0.1 * m[3] * m[3]; });
  const CircleAction a(f.system);
  const auto r = check_hypotheses(a, f.point(f.default_point));
  CHECK(r.item("momentum_map").pass);
  CHECK(r.item("periodicity").pass);
  CHECK_FALSE(r.item("adiabatic").pass);
  CHECK(r.item("adiabatic").residual > 0.1);
}

TEST_CASE("frequency depending on fast energy breaks the period-energy relation") {
  Fixture f = elastic_pendulum(1.0, 0.0);
  f.system.frequency = ScalarField::lift([](auto m) { return 1.0 + 0.1 * m[1]; });
  CHECK(check_period_energy(f.system, f.point(f.default_point)) > 1e-3);
  CHECK(check_period_energy(elastic_pendulum().system, f.point(f.default_point)) <= 1e-12);
}

TEST_CASE("F1 and F2 at the pendulum oracle point") {
  const Oracle o;
  const CircleAction a(o.f.system);
  CHECK(o.f.system.momentum(o.m.coords()) == Approx(0.625));
  CHECK(F1(a, o.m) == Approx(1.0).epsilon(1e-8));
  CHECK(o.f.F1_closed(o.m.coords()) == Approx(1.0));
  const double ai3 = F2(a, o.m, F2Variant::ai3);
  const double ty3 = F2(a, o.m, F2Variant::ty3);
  CHECK(ai3 == Approx(-0.875).epsilon(1e-6));
  CHECK(0.5 * ai3 == Approx(-0.4375).epsilon(1e-6));
  CHECK(ty3 == Approx(0.4375).epsilon(1e-6));
  CHECK(o.f.F2_closed(o.m.coords()) == Approx(-0.875));
  const F2Result d = F2_detailed(a, o.m, F2Variant::ai3, {}, true);
  CHECK(d.value == Approx(ai3));
  CHECK(std::abs(d.solvability_residual) <= 1e-8);
  CHECK(d.fd_error_estimate < 1e-6);
  CHECK_FALSE(d.precision_warning);
}

TEST_CASE("F1 matches the closed forms at random points") {
  for (const auto& f : {elastic_pendulum(1.3, 0.4), charged_particle(1.0, 0.3)}) {
    const CircleAction a(f.system);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 10; ++i) {
      const PhasePoint m = f.point(f.random_point(rng));
      INFO(f.name);
      CHECK(std::abs(F1(a, m) - f.F1_closed(m.coords())) <= 1e-6);
    }
  }
}

TEST_CASE("connection form and K1") {
  const Oracle o;
  const CircleAction a(o.f.system);
  const auto theta = connection_form(a, o.m);
  REQUIRE(theta.size() == 2);
  const auto dH = partial_gradient(o.f.system.hamiltonian, o.m.coords(), 2, 2);
  CHECK(K1(a, o.m) == Approx(0.5 * (theta[0] * dH[1] - theta[1] * dH[0])));
}

TEST_CASE("homological residuals") {
  for (const auto& f : {elastic_pendulum(1.0, 0.5), charged_particle(1.0, 0.3)}) {
    const CircleAction a(f.system);
    const PhasePoint m = f.point(f.default_point);
    INFO(f.name);
    CHECK(std::abs(first_order_residual(a, m)) <= 1e-7);
    CHECK(std::abs(second_order_residual(a, m, F2Variant::ai3)) <= 1e-6);
    CHECK(std::abs(second_order_residual(a, m, F2Variant::ty3)) > 1e-4);
  }
}

TEST_CASE("series terms and combination") {
  const Oracle o;
  const CircleAction a(o.f.system);
  const InvariantSeries s0 = assemble(a, 0);
  const SeriesTerms t0 = s0.terms_at(o.m.coords());
  CHECK(t0.J == Approx(0.625));
  CHECK(t0.F1 == 0.0);
  CHECK(s0.evaluate(o.m, 0.1) == Approx(0.625));
  const InvariantSeries s2 = assemble(a, 2);
  const double eps = 0.1;
  CHECK(s2.evaluate(o.m, eps) == Approx(0.625 + eps * 1.0 - 0.5 * eps * eps * 0.875).epsilon(1e-7));
  SeriesTerms t{2.0, 3.0, 4.0};
  CHECK(InvariantSeries::combine(t, 0.5, 1) == Approx(3.5));
  CHECK(InvariantSeries::combine(t, 0.5, 2) == Approx(4.0));
  CHECK_THROWS_AS(assemble(a, 3), UnsupportedOrder);
  CHECK_THROWS_AS(assemble(a, -1), UnsupportedOrder);
}

TEST_CASE("checked evaluation rejects broken periodicity") {
  const Fixture broken = get_fixture("elastic_pendulum", {{"omega_scale", 2.0}});
  const CircleAction a(broken.system, FlowMode::numeric);
  const PhasePoint m = broken.point(broken.default_point);
  CHECK_THROWS_AS(F1(a, m), HypothesisViolation);
  CorrectionOptions lax;
  lax.strict = false;
  CHECK_NOTHROW(F1(a, m, lax));
}

TEST_CASE("series is an approximate first integral") {
  const Fixture f = elastic_pendulum(1.0, 0.5);
  const CircleAction a(f.system);
  const PhasePoint m = f.point(f.default_point);
  const InvariantSeries s(a, 1);
  auto rates = [&](double eps) {
    const ScalarField F = ScalarField::plain([&s, eps](std::span<const double> x) { return s.evaluate_at(x, eps); });
    const double dJ = std::abs(lie_derivative(f.system, f.system.momentum, m, eps, DiffEngine::finite_difference()));
    const double dF = std::abs(lie_derivative(f.system, F, m, eps, DiffEngine::finite_difference()));
    return std::pair{dJ, dF};
  };
  const auto [j1, f1] = rates(0.02);
  const auto [j2, f2] = rates(0.01);
  // O(eps) for J, O(eps^2) for J + eps F1.
  CHECK(j1 / j2 == Approx(2.0).epsilon(1e-3));
  CHECK(f1 / f2 == Approx(4.0).epsilon(1e-2));
}

TEST_CASE("momentum from the action primitive") {
  const Fixture f = elastic_pendulum(1.0, 0.0);
  const CircleAction a(f.system);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 5; ++i) {
    const PhasePoint m = f.point(f.random_point(rng));
    CHECK(momentum_from_action(a, m) == Approx(f.system.momentum(m.coords())).epsilon(1e-10));
  }
}
