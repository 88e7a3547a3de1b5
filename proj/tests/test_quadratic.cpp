#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "slowfast/circle_action.hpp"
#include "slowfast/errors.hpp"
#include "slowfast/fixtures.hpp"
#include "slowfast/invariants.hpp"
#include "slowfast/quadratic.hpp"
#include "slowfast/spectral.hpp"

using namespace slowfast;
using doctest::Approx;

namespace {

Mat2 random_sl2(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.5, 1.5), pos(0.3, 2.0);
  const double a = u(rng);
  const double b = pos(rng) * (u(rng) < 0 ? -1.0 : 1.0);
  return {a, b, -(1.0 + a * a) / b, -a};
}

Mat2 random_mat(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {u(rng), u(rng), u(rng), u(rng)};
}

std::vector<double> orbit_values(const Mat2& A, const Mat2& S, std::span<const double> z, int n) {
  std::vector<double> v;
  for (int j = 0; j < n; ++j) v.push_back(Q(S, linear_flow(A, 2.0 * std::numbers::pi * j / n, z)));
  return v;
}

// a = 0.3 sin q + 0.2 p, b = e^{0.2p + 0.1q}, c = -(1 + a^2)/b.
QuadraticSystem prototype() {
  return QuadraticSystem(
      "prototype", 1, ScalarField::lift([](auto w) { return 0.5 * w[0] * w[0] + 0.3 * cos(w[1]); }),
      ScalarField::lift([](auto w) { return 1.0 + 0.2 * w[1] * w[1] + 0.1 * w[0]; }),
      Sl2Field::lift([](auto w) {
        using T = std::remove_cvref_t<decltype(w[0])>;
        const T a = 0.3 * sin(w[1]) + 0.2 * w[0];
        const T b = exp(0.2 * w[0] + 0.1 * w[1]);
        return std::array<T, 3>{a, b, -(1.0 + a * a) / b};
      }),
      Box({{-1.0, 1.0}, {-1.0, 1.0}}));
}

QuadraticSystem discrepancy_instance() {
  return QuadraticSystem(
      "discrepancy", 1, ScalarField::lift([](auto w) { return 0.5 * w[0] * w[0] + 0.5 * w[1] * w[1]; }),
      ScalarField::lift([](auto w) { return 0.0 * w[0] + 1.0; }),
      Sl2Field::lift([](auto w) {
        using T = std::remove_cvref_t<decltype(w[0])>;
        return std::array<T, 3>{T(0.0) * w[1], exp(w[1]), -exp(-w[1])};
      }));
}

}  // namespace

TEST_CASE("matrix helpers") {
  const Mat2 x{1, 2, 3, 4}, y{0, 1, -1, 0};
  CHECK(x.det() == -2);
  CHECK(x.trace() == 5);
  const Mat2 c = commutator(x, y);
  CHECK(c.a00 == Approx(-5.0));
  CHECK(c.a01 == Approx(-3.0));
  CHECK(c.a10 == Approx(-3.0));
  CHECK(c.a11 == Approx(5.0));
  // Q_A = -1/2 |z|^2 for the rotation generator.
  const std::vector<double> z{0.6, -0.8};
  CHECK(Q(y, z) == Approx(-0.5));
  CHECK(Q(Mat2{1, 0, 0, 1}, z) == Approx(0.0));
}

TEST_CASE("linear flow is 2pi periodic and has det 1") {
  std::mt19937_64 rng(9);
  const Mat2 A = random_sl2(rng);
  const std::vector<double> z{0.4, -1.1};
  const auto back = linear_flow(A, 2.0 * std::numbers::pi, z);
  CHECK(back[0] == Approx(z[0]));
  CHECK(back[1] == Approx(z[1]));
  CHECK((A * A).a00 == Approx(-1.0));
}

TEST_CASE("averaging and integrating identities on random instances") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const Mat2 A = random_sl2(rng);
    const Mat2 S = random_mat(rng);
    const std::vector<double> z{u(rng), u(rng)};
    const auto vals = orbit_values(A, S, z, 16);
    CHECK(std::abs(sample_mean(vals) - Q(avg_Q(A, S), z)) <= 1e-10);
    CHECK(std::abs(integrate_samples(vals) - Q(S_Q(A, S), z)) <= 1e-10);
  }
}

TEST_CASE("degenerate families are rejected") {
  const Sl2Field bad = Sl2Field::lift([](auto w) {
    using T = std::remove_cvref_t<decltype(w[0])>;
    return std::array<T, 3>{T(0.0) * w[0], T(1.0) + 0.0 * w[0], T(-1.0) + 0.5 * w[0]};
  });
  CHECK_THROWS_AS(bad.check_on_grid(Box({{-1.0, 1.0}, {-1.0, 1.0}})), DegenerateFamily);
  CHECK_THROWS_AS(QuadraticSystem("bad", 1, ScalarField::lift([](auto w) { return w[0]; }),
                                  ScalarField::lift([](auto w) { return 0.0 * w[0] + 1.0; }), bad,
                                  Box({{-1.0, 1.0}, {-1.0, 1.0}})),
                  DegenerateFamily);
  const QuadraticSystem ok = prototype();
  CHECK_NOTHROW(ok.require_nondegenerate(std::vector<double>{0.3, 0.5}));
}

TEST_CASE("quadratic system satisfies the hypotheses") {
  const QuadraticSystem qs = prototype();
  const CircleAction a(qs.system());
  const PhasePoint m(Dims{1, 1}, std::vector<double>{0.7, -0.4, 0.3, 0.5});
  const auto r = check_hypotheses(a, m);
  for (const auto& it : r.items) {
    INFO(it.name << " " << it.residual);
    CHECK(it.pass);
  }
}

TEST_CASE("derived closed-form F1 agrees with the quadrature engine") {
  const QuadraticSystem qs = prototype();
  const CircleAction a(qs.system());
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  std::vector<std::vector<double>> pts{{0.7, -0.4, 0.3, 0.5}};
  for (int i = 0; i < 5; ++i) pts.push_back({u(rng), u(rng), u(rng), u(rng)});
  for (const auto& p : pts) {
    const PhasePoint m(Dims{1, 1}, p);
    const double generic = F1(a, m);
    CHECK(qs.F1_closed(m) == Approx(generic).epsilon(1e-7));
  }
  const PhasePoint m0(Dims{1, 1}, pts[0]);
  CHECK(std::abs(qs.F1_closed(m0, ClosedFormReading::as_printed) - F1(a, m0)) > 1e-3);
}

TEST_CASE("printed closed-form F2 misses a term") {
  const QuadraticSystem qs = discrepancy_instance();
  const CircleAction a(qs.system());
  const PhasePoint m(Dims{1, 1}, std::vector<double>{0.6, -0.3, 0.2, 0.4});
  const double ai3 = F2(a, m, F2Variant::ai3);
  CHECK(ai3 == Approx(0.0070132).epsilon(1e-4));
  CHECK(qs.F2_closed(m) == Approx(0.0107051).epsilon(1e-4));
  CHECK(std::abs(second_order_residual(a, m, F2Variant::ai3)) <= 1e-6);
}

TEST_CASE("benchmark family has vanishing corrections") {
  const Fixture f = quadratic_benchmark();
  const CircleAction a(f.system);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  for (int i = 0; i < 5; ++i) {
    const PhasePoint m(Dims{1, 1}, std::vector<double>{u(rng), u(rng), u(rng), u(rng)});
    CHECK(std::abs(F1(a, m)) <= 1e-9);
    CHECK(std::abs(F2(a, m)) <= 1e-7);
  }
}

TEST_CASE("slow bracket matrix and derivatives") {
  const QuadraticSystem qs = discrepancy_instance();
  const std::vector<double> w{0.2, 0.4};
  const Mat2 dq = qs.dA_dq(w, 0);
  CHECK(dq.a01 == Approx(std::exp(0.4)));
  CHECK(dq.a10 == Approx(std::exp(-0.4)));
  const Mat2 dp = qs.dA_dp(w, 0);
  CHECK(std::abs(dp.a01) < 1e-14);
  // {h, A}_1 = h_p A_q - h_q A_p = p A_q.
  const Mat2 br = qs.slow_bracket_matrix(qs.h(), w);
  CHECK(br.a01 == Approx(0.2 * std::exp(0.4)));
}
