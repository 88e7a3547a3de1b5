#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "slowfast/errors.hpp"
#include "slowfast/experiments.hpp"

using namespace slowfast;
using doctest::Approx;

namespace {

DriftConfig quick(const std::string& fixture = "elastic_pendulum") {
  DriftConfig c;
  c.fixture = fixture;
  c.eps_grid = {0.2, 0.1, 0.05, 0.025};
  c.samples = 64;
  c.corrections.quad.outer = 32;
  c.corrections.quad.inner = 16;
  c.variant_points = 2;
  return c;
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("exact invariant does not drift") {
  DriftConfig c = quick();
  c.params = {{"gamma", 0.0}};
  const DriftRow r = measure_drift(c, 0.1, 0);
  CHECK(r.drift < 1e-9);
  CHECK(r.horizon == Approx(10.0));
  CHECK(r.samples == 64);
}

TEST_CASE("higher orders drift less") {
  const DriftConfig c = quick();
  const Fixture f = get_fixture(c.fixture, c.params);
  const DriftTrace t = trace_drift(c, f, 0.05, 2);
  CHECK(t.times.size() == 65);
  CHECK(t.terms.size() == 65);
  const double d0 = measure_drift(c, 0.05, 0).drift;
  const double d1 = measure_drift(c, 0.05, 1).drift;
  const double d2 = measure_drift(c, 0.05, 2).drift;
  CHECK(d1 < d0);
  CHECK(d2 < d1);
}

TEST_CASE("slope fitting") {
  const std::vector<double> eps{0.2, 0.1, 0.05, 0.025, 0.0125};
  std::vector<double> d;
  for (double e : eps) d.push_back(3.0 * e * e);
  const SlopeFit s = fit_order(eps, d, 1);
  CHECK(s.slope == Approx(2.0));
  CHECK(s.points == 5);
  CHECK_FALSE(s.excluded_largest);
  d[0] = 1.0;  // outlier at the largest eps
  const SlopeFit o = fit_order(eps, d, 1);
  CHECK(o.excluded_largest);
  CHECK(o.points == 4);
  CHECK(o.slope == Approx(2.0));
  CHECK_THROWS_AS(fit_order({0.1, 0.05, 0.025}, {1e-2, 2.5e-3, 6e-4}, 1), SlopeUndefined);
}

TEST_CASE("config validation") {
  DriftConfig c = quick();
  c.eps_grid = {0.1};
  CHECK_THROWS_AS(order_sweep(c), SlopeUndefined);
  c = quick();
  c.orders = {0, 3};
  CHECK_THROWS_AS(c.validate(), UnsupportedOrder);
  c = quick();
  c.eps_grid = {0.2, 0.1, -0.05, 0.025};
  CHECK_THROWS_AS(c.validate(), InvalidParameter);
}

TEST_CASE("sweep, contract and reports") {
  DriftConfig c = quick();
  c.workers = 1;
  const DriftReport a = order_sweep(c);
  CHECK(a.rows.size() == 12);
  CHECK(a.rows.front().eps == 0.2);
  CHECK(a.rows.front().order == 0);
  for (const auto& r : a.rows) CHECK(r.valid);
  CHECK(a.fit(0).slope == Approx(1.0).epsilon(0.3));
  CHECK(a.fit(1).slope == Approx(2.0).epsilon(0.15));
  const std::string csv = drift_csv(a);
  CHECK(csv.rfind("eps,order,drift,horizon,samples\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 13);

  c.workers = 3;
  const DriftReport b = order_sweep(c);
  CHECK(drift_csv(b) == csv);
  const auto cmp = compare_variants(c, false);
  CHECK(drift_json(a, &cmp, "x") == drift_json(b, &cmp, "x"));

  const auto j = nlohmann::json::parse(drift_json(a, &cmp, "[fixture]\nname = elastic_pendulum\n"));
  CHECK(j["rows"].size() == 12);
  CHECK(j["config_ini"] == "[fixture]\nname = elastic_pendulum\n");
  CHECK(j.contains("variant_comparison"));

  const auto dir = std::filesystem::temp_directory_path() / "slowfast_test_emit";
  std::filesystem::remove_all(dir);
  const auto paths = emit(a, &cmp, "x", OutputFormat::both, dir.string());
  REQUIRE(paths.size() == 2);
  CHECK(slurp((dir / "drift.csv").string()) == csv);
  CHECK(emit(a, nullptr, "x", OutputFormat::csv, dir.string(), "only").size() == 1);
  std::filesystem::remove_all(dir);
}

TEST_CASE("variant comparison picks ai3") {
  for (const std::string name : {"elastic_pendulum", "charged_particle"}) {
    const VariantComparison v = compare_variants(quick(name), false);
    REQUIRE(v.default_variant.has_value());
    CHECK(*v.default_variant == F2Variant::ai3);
    CHECK(v.get(F2Variant::ai3).pass);
    CHECK_FALSE(v.get(F2Variant::ty3).pass);
    CHECK(v.get(F2Variant::ty3).homological_residual > 1e-4);
    CHECK_FALSE(v.indistinguishable);
    CHECK_FALSE(v.no_variant_passes);
    if (name == "elastic_pendulum") {
      REQUIRE(v.get(F2Variant::ai3).closed_form_error.has_value());
      CHECK(*v.get(F2Variant::ai3).closed_form_error < 1e-4);
    }
  }
}

TEST_CASE("formatting and helpers") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-20) == "1e-20");
  CHECK(parse_output_format("json") == OutputFormat::json);
  CHECK_THROWS_AS(parse_output_format("xml"), InvalidParameter);
  std::atomic<int> sum{0};
  parallel_for(100, 4, [&](int i) { sum += i; });
  CHECK(sum == 4950);
  try {
    parallel_for(10, 3, [](int i) {
      if (i == 7 || i == 4) throw std::runtime_error(std::to_string(i));
    });
    FAIL("no exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "4");
  }
}
