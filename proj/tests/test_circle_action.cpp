#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "slowfast/calculus.hpp"
#include "slowfast/circle_action.hpp"
#include "slowfast/errors.hpp"
#include "slowfast/fixtures.hpp"
#include "slowfast/quadratic.hpp"

using namespace slowfast;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

// H = ½(y² + x²) + ½(p² + q²), unit frequency, rotation flow.
SlowFastSystem harmonic() {
  SlowFastSystem s;
  s.name = "harmonic";
  s.dims = Dims{1, 1};
  s.hamiltonian = ScalarField::lift([](auto m) { return 0.5 * (m[0] * m[0] + m[1] * m[1] + m[2] * m[2] + m[3] * m[3]); });
  s.frequency = ScalarField::lift([](auto m) { return 0.0 * m[0] + 1.0; });
  s.momentum = ScalarField::lift([](auto m) { return 0.5 * (m[0] * m[0] + m[1] * m[1]); });
  s.fast_flow = FlowMap::lift([](double t, auto m, auto out) {
    out[0] = std::cos(t) * m[0] - std::sin(t) * m[1];
    out[1] = std::sin(t) * m[0] + std::cos(t) * m[1];
    out[2] = m[2];
    out[3] = m[3];
  });
  s.domain = Box::unbounded(4);
  return s;
}

// A library of polynomial observables.
std::vector<Observable> observables() {
  return {
      [](std::span<const double> m) { return m[0]; },
      [](std::span<const double> m) { return m[0] * m[1] + m[2]; },
      [](std::span<const double> m) { return m[1] * m[1] * m[3] - m[0]; },
      [](std::span<const double> m) { return m[0] * m[0] * m[0] + m[1] * m[2] * m[3]; },
      [](std::span<const double> m) { return m[0] * m[0] * m[1] * m[1] + 0.3 * m[3]; },
  };
}

}  // namespace

TEST_CASE("flow at t = 0 is the identity and slow coordinates are preserved") {
  for (const auto& f : {elastic_pendulum(1.3, 0.4), charged_particle(1.0, 0.3)}) {
    const CircleAction a(f.system);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 10; ++i) {
      const PhasePoint m = f.point(f.random_point(rng));
      const PhasePoint z = a.flow(0.0, m);
      for (std::size_t j = 0; j < 4; ++j) CHECK(z[j] == Approx(m[j]));
      const PhasePoint w = a.flow(1.7, m);
      CHECK(w[2] == m[2]);
      CHECK(w[3] == m[3]);
    }
  }
}

TEST_CASE("charged particle flow at a quarter period") {
  const Fixture f = charged_particle(1.0, 0.0);
  const CircleAction a(f.system);
  const PhasePoint m = f.point(f.from_natural_order(std::vector<double>{0, 1, 1, 0}));
  const PhasePoint z = a.flow(kPi / 2, m);
  CHECK(std::abs(z[0]) < 1e-15);
  CHECK(z[1] == Approx(1.0));
}

TEST_CASE("quadratic family flow is the linear flow") {
  const Fixture f = quadratic_benchmark();
  const CircleAction a(f.system);
  const PhasePoint m(Dims{1, 1}, std::vector<double>{0.3, -0.7, 0.4, 0.1});
  const Mat2 A{0.0, std::exp(0.4), -std::exp(-0.4), 0.0};
  const auto expect = linear_flow(A, 0.9, m.fast());
  const PhasePoint z = a.flow(0.9, m);
  CHECK(z[0] == Approx(expect[0]));
  CHECK(z[1] == Approx(expect[1]));
  CHECK(a.check_periodicity(m, 1e-14).pass);
}

TEST_CASE("periodicity checks") {
  const Fixture p = elastic_pendulum(1.0, 0.5);
  const PhasePoint m = p.point(p.default_point);
  const CircleAction numeric(p.system, FlowMode::numeric, 64, 1e-11);
  const auto res = numeric.check_periodicity(m, 1e-9);
  CHECK(res.pass);
  CHECK(res.residual <= 1e-9);
  // omega <- 2 omega: the generator runs at half speed and misses closure.
  const Fixture broken = get_fixture("elastic_pendulum", {{"gamma", 0.5}, {"omega_scale", 2.0}});
  const CircleAction bad(broken.system, FlowMode::numeric, 64, 1e-11);
  const auto r2 = bad.check_periodicity(broken.point(broken.default_point), 1e-8);
  CHECK_FALSE(r2.pass);
  CHECK(r2.residual > 1e-2);
}

TEST_CASE("numeric and analytic flows agree") {
  const Fixture f = charged_particle(1.0, 0.3);
  const CircleAction an(f.system);
  const CircleAction nu(f.system, FlowMode::numeric);
  const auto m = f.default_point;
  const auto a = an.flow_at(2.1, m), b = nu.flow_at(2.1, m);
  for (std::size_t i = 0; i < 4; ++i) CHECK(a[i] == Approx(b[i]).epsilon(1e-9));
  CHECK(nu.average_at(f.system.hamiltonian, m) == Approx(an.average_at(f.system.hamiltonian, m)).epsilon(1e-10));
}

TEST_CASE("averages on the harmonic flow") {
  const SlowFastSystem s = harmonic();
  const CircleAction a(s);
  const PhasePoint m(Dims{1, 1}, std::vector<double>{0.8, -0.3, 1.0, 2.0});
  CHECK(a.average([](std::span<const double>) { return 3.0; }, m) == Approx(3.0));
  CHECK(a.average([](std::span<const double> x) { return x[0] * x[0]; }, m) == Approx((0.64 + 0.09) / 2));
  // profile of x along the orbit through (0, 0) scaled to cos t: y(t) = cos t for m = (1, 0).
  const PhasePoint e(Dims{1, 1}, std::vector<double>{1.0, 0.0, 0.0, 0.0});
  CHECK(std::abs(a.average([](std::span<const double> x) { return x[0]; }, e)) < 1e-15);
  // x(t) = sin t: S(sin) = -1; y(t) = cos t: S(cos) = 0.
  CHECK(a.integrate([](std::span<const double> x) { return x[1]; }, e) == Approx(-1.0));
  CHECK(std::abs(a.integrate([](std::span<const double> x) { return x[0]; }, e)) < 1e-14);
  CHECK(std::abs(a.integrate([](std::span<const double>) { return 2.0; }, e)) < 1e-15);
  CHECK(a.solve_homological([](std::span<const double> x) { return x[1]; }, e) == Approx(-1.0));
  CHECK(std::abs(a.solve_homological([](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; }, e)) < 1e-14);
}

TEST_CASE("slow one-forms") {
  const Fixture p = elastic_pendulum(1.0, 1.0);
  const CircleAction a(p.system);
  std::mt19937_64 rng(2);
  const VectorObservable constant = [](std::span<const double>) { return std::vector<double>{1.5, -2.0}; };
  const PhasePoint m0 = p.point(p.default_point);
  const auto avg = a.average_slow_oneform(constant, m0);
  CHECK(avg[0] == Approx(1.5));
  CHECK(avg[1] == Approx(-2.0));
  const auto s0 = a.integrate_slow_oneform(constant, m0);
  CHECK(std::abs(s0[0]) < 1e-14);
  for (const auto& f : {elastic_pendulum(1.0, 1.0), charged_particle(1.0, 0.3)}) {
    const CircleAction act(f.system);
    const VectorObservable dJ = [&f](std::span<const double> x) {
      return partial_gradient(f.system.momentum, x, 2, 2);
    };
    for (int i = 0; i < 10; ++i) {
      const PhasePoint m = f.point(f.random_point(rng));
      const auto v = act.average_slow_oneform(dJ, m);
      CHECK(std::hypot(v[0], v[1]) <= 1e-9);
      // Theta re-averaged over the orbit vanishes.
      const VectorObservable theta = [&](std::span<const double> x) {
        std::vector<double> out;
        for (int c = 0; c < 2; ++c)
          out.push_back(act.integrate_at([&](std::span<const double> u) { return dJ(u)[std::size_t(c)]; }, x));
        return out;
      };
      const auto tt = act.average_slow_oneform(theta, m);
      CHECK(std::hypot(tt[0], tt[1]) <= 1e-9);
    }
  }
}

TEST_CASE("operator identities on the fixtures") {
  const auto obs = observables();
  for (const auto& f : {elastic_pendulum(1.0, 1.0), charged_particle(1.0, 0.3)}) {
    const CircleAction a(f.system);
    std::mt19937_64 rng(4);
    for (int i = 0; i < 10; ++i) {
      const auto m = f.random_point(rng);
      for (const auto& g : obs) {
        const double mean = a.average_at(g, m);
        const Observable Sg = [&](std::span<const double> x) { return a.integrate_at(g, x); };
        const Observable Ag = [&](std::span<const double> x) { return a.average_at(g, x); };
        const double h = 1e-4;
        const double deriv = (Sg(a.flow_at(h, m)) - Sg(a.flow_at(-h, m))) / (2 * h);
        CHECK(std::abs(deriv - (g(m) - mean)) <= 1e-6);
        CHECK(std::abs(a.average_at(Sg, m)) <= 1e-10);
        CHECK(std::abs(a.average_at(Ag, m) - mean) <= 1e-10);
        CHECK(std::abs(Ag(a.flow_at(0.77, m)) - mean) <= 1e-9);
      }
    }
  }
}

TEST_CASE("quadrature is exact on trigonometric polynomials") {
  const SlowFastSystem s = harmonic();
  const CircleAction a(s, FlowMode::analytic, 8);
  const PhasePoint e(Dims{1, 1}, std::vector<double>{1.0, 0.0, 0.0, 0.0});
  // y(t)^3 = cos^3 t = (3 cos t + cos 3t)/4 has degree 3; N = 8 >= 2*3 + 2.
  CHECK(std::abs(a.average([](std::span<const double> x) { return x[0] * x[0] * x[0]; }, e)) < 1e-12);
  // x(t)^3 = sin^3 t = (3 sin t - sin 3t)/4; S = -(3/4) + (1/4)/3 = -2/3.
  CHECK(a.integrate([](std::span<const double> x) { return x[1] * x[1] * x[1]; }, e) == Approx(-2.0 / 3).epsilon(1e-12));
}

TEST_CASE("flow tangent is exact for liftable flows") {
  const Fixture f = charged_particle(1.0, 0.3);
  const CircleAction a(f.system);
  const CircleAction n(f.system, FlowMode::numeric);
  const auto m = f.default_point;
  const std::vector<double> v{0.2, -0.1, 0.3, 0.05};
  const auto ta = a.flow_tangent(1.3, m, v), tn = n.flow_tangent(1.3, m, v);
  for (std::size_t i = 0; i < 4; ++i) CHECK(ta[i] == Approx(tn[i]).epsilon(1e-5));
}

TEST_CASE("invalid construction") {
  SlowFastSystem s = harmonic();
  s.fast_flow.reset();
  CHECK_THROWS_AS(CircleAction(s, FlowMode::analytic), InvalidParameter);
  CHECK_THROWS_AS(CircleAction(harmonic(), FlowMode::analytic, 5), InvalidParameter);
  const Fixture c = charged_particle(1.0, 0.3);
  const CircleAction a(c.system);
  CHECK_THROWS_AS(a.flow(0.1, PhasePoint(Dims{1, 1}, std::vector<double>{0, 0, 0, 0.1})), DomainError);
}
