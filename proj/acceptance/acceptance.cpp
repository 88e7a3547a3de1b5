// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "slowfast/calculus.hpp"
#include "slowfast/circle_action.hpp"
#include "slowfast/experiments.hpp"
#include "slowfast/fixtures.hpp"
#include "slowfast/invariants.hpp"
#include "slowfast/quadratic.hpp"
#include "slowfast/spectral.hpp"

using namespace slowfast;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::vector<Observable> observables() {
  return {
      [](std::span<const double> m) { return m[0]; },
      [](std::span<const double> m) { return m[1] * m[1]; },
      [](std::span<const double> m) { return m[0] * m[1] + m[2]; },
      [](std::span<const double> m) { return m[1] * m[1] * m[3] - m[0]; },
      [](std::span<const double> m) { return m[0] * m[0] * m[0] + m[1] * m[2] * m[3]; },
      [](std::span<const double> m) { return m[0] * m[0] * m[1] * m[1] + 0.3 * m[3]; },
  };
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Outcome operator_identities() {
  const auto obs = observables();
  double r_lie = 0, r_avgS = 0, r_avgavg = 0;
  for (const auto& f : {elastic_pendulum(1.0, 0.1), charged_particle(1.0, 0.3)}) {
    const CircleAction a(f.system);
    std::mt19937_64 rng(101);
    for (int i = 0; i < 100; ++i) {
      const auto m = f.random_point(rng);
      for (const auto& g : obs) {
        const double mean = a.average_at(g, m);
        const Observable Sg = [&](std::span<const double> x) { return a.integrate_at(g, x); };
        const Observable Ag = [&](std::span<const double> x) { return a.average_at(g, x); };
        const double h = 1e-4;
        const double lie = (Sg(a.flow_at(h, m)) - Sg(a.flow_at(-h, m))) / (2 * h);
        r_lie = std::max(r_lie, std::abs(lie - (g(m) - mean)));
        r_avgS = std::max(r_avgS, std::abs(a.average_at(Sg, m)));
        r_avgavg = std::max(r_avgavg, std::abs(a.average_at(Ag, m) - mean));
      }
    }
  }
  return {r_lie <= 1e-6 && r_avgS <= 1e-10 && r_avgavg <= 1e-10,
          "max |L S f - (f - <f>)| = " + sci(r_lie) + ", max |<S f>| = " + sci(r_avgS) +
              ", max |<<f>> - <f>| = " + sci(r_avgavg)};
}

Outcome quadratic_identities() {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.3, 2.0);
  double r_avg = 0, r_int = 0;
  const int n = 16;
  for (int i = 0; i < 200; ++i) {
    const double a = 1.5 * u(rng);
    const double b = pos(rng) * (u(rng) < 0 ? -1.0 : 1.0);
    const Mat2 A{a, b, -(1.0 + a * a) / b, -a};
    const Mat2 S{u(rng), u(rng), u(rng), u(rng)};
    const std::vector<double> z{u(rng), u(rng)};
    std::vector<double> vals;
    for (int j = 0; j < n; ++j) vals.push_back(Q(S, linear_flow(A, 2.0 * std::numbers::pi * j / n, z)));
    r_avg = std::max(r_avg, std::abs(sample_mean(vals) - Q(avg_Q(A, S), z)));
    r_int = std::max(r_int, std::abs(integrate_samples(vals) - Q(S_Q(A, S), z)));
  }
  return {r_avg <= 1e-10 && r_int <= 1e-10,
          "max avg error " + sci(r_avg) + ", max integral error " + sci(r_int) + " (200 cases, N = 16)"};
}

Outcome hypothesis_suite() {
  bool ok = true;
  std::string detail;
  for (const auto& f : {elastic_pendulum(1.0, 0.1), charged_particle(1.0, 0.3)}) {
    const CircleAction a(f.system);
    std::mt19937_64 rng(303);
    std::vector<double> worst(4, 0.0);
    std::vector<std::string> names;
    for (int i = 0; i < 100; ++i) {
      const HypothesisReport r = check_hypotheses(a, f.point(f.random_point(rng)));
      names.clear();
      for (std::size_t k = 0; k < r.items.size(); ++k) {
        worst[k] = std::max(worst[k], r.items[k].residual);
        names.push_back(r.items[k].name);
        ok = ok && r.items[k].pass && r.items[k].residual <= 1e-8;
      }
    }
    detail += f.name + ":";
    for (std::size_t k = 0; k < names.size(); ++k) detail += " " + names[k] + " " + sci(worst[k]);
    detail += "; ";
  }
  return {ok, detail};
}

Outcome f1_oracle() {
  CorrectionOptions opt;
  opt.quad.outer = 64;
  opt.quad.inner = 32;
  std::string detail;
  bool ok = true;
  for (const auto& f : {elastic_pendulum(1.0, 0.1), charged_particle(1.0, 0.3)}) {
    const CircleAction a(f.system);
    std::mt19937_64 rng(404);
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
      const PhasePoint m = f.point(f.random_point(rng));
      worst = std::max(worst, std::abs(F1(a, m, opt) - f.F1_closed(m.coords())));
    }
    ok = ok && worst <= 1e-6;
    detail += f.name + " max error " + sci(worst) + "; ";
  }
  return {ok, detail};
}

Outcome f2_adjudication() {
  const Fixture f = elastic_pendulum(1.0, 1.0);
  DriftConfig c;
  c.fixture = "elastic_pendulum";
  c.params = {{"Omega", 1.0}, {"gamma", 1.0}};
  c.m0 = f.from_natural_order(std::vector<double>{1, 1, 1, 0});
  const VariantComparison cmp = compare_variants(c, false);
  const CircleAction a(f.system);
  const PhasePoint m = f.point(c.m0);
  int matching = 0;
  std::optional<F2Variant> winner;
  std::string detail;
  for (F2Variant v : {F2Variant::ai3, F2Variant::ty3}) {
    const double coeff = 0.5 * F2(a, m, v);
    const VariantSummary& s = cmp.get(v);
    const bool match = std::abs(coeff + 0.4375) <= 1e-4 && s.homological_residual <= 1e-4;
    if (match) {
      ++matching;
      winner = v;
    }
    detail += to_string(v) + ": eps^2/2 coefficient " + sci(coeff) + ", residual " + sci(s.homological_residual) +
              (s.closed_form_error ? ", closed-form error " + sci(*s.closed_form_error) : "") + "; ";
  }
  const bool ok = matching == 1 && cmp.default_variant == winner && cmp.variants.size() == 2;
  if (cmp.default_variant) detail += "default " + to_string(*cmp.default_variant);
  return {ok, detail};
}

Outcome drift_study() {
  bool ok = true;
  std::string detail;
  const std::vector<std::pair<std::string, std::vector<double>>> cases = {
      {"elastic_pendulum", {0.1, 1.0, 0.5, 0.0}},
      {"charged_particle", {0.2, 1.0, 0.1, 0.3}},
  };
  for (const auto& [name, natural_point] : cases) {
    DriftConfig c;
    c.fixture = name;
    c.params = name == "elastic_pendulum" ? ParamMap{{"Omega", 1.0}, {"gamma", 0.1}}
                                          : ParamMap{{"B", 1.0}, {"lambda", 0.3}};
    const Fixture f = get_fixture(name, c.params);
    c.m0 = f.from_natural_order(natural_point);
    c.eps_grid = {0.2, 0.1, 0.05, 0.025, 0.0125};
    c.horizon = 1.0;
    c.integrator.rtol = 1e-11;
    c.workers = int(std::max(1u, std::thread::hardware_concurrency()));
    const DriftReport rep = order_sweep(c);
    const ContractCheck cc = slope_contract(rep);
    ok = ok && cc.met;
    detail += name + " s0 " + sci(rep.fit(0).slope) + " s1 " + sci(rep.fit(1).slope) + " s2 " +
              sci(rep.fit(2).slope);
    for (const auto& msg : cc.failures) detail += " [" + msg + "]";
    detail += "; ";
  }
  return {ok, detail};
}

Outcome exact_action() {
  const Fixture f = elastic_pendulum(1.0, 0.1);
  const CircleAction a(f.system);
  std::mt19937_64 rng(707);
  double worst = 0;
  for (int i = 0; i < 50; ++i) {
    const auto m = f.random_point(rng);
    const auto dJ = partial_gradient(f.system.momentum, m, 0, 2);
    for (int k = 0; k < 2; ++k) {
      const double h = 1e-5;
      auto mp = m, mm = m;
      mp[std::size_t(k)] += h;
      mm[std::size_t(k)] -= h;
      const double d = (momentum_from_action(a, f.point(mp)) - momentum_from_action(a, f.point(mm))) / (2 * h);
      worst = std::max(worst, std::abs(d - dJ[std::size_t(k)]));
    }
  }
  return {worst <= 1e-6, "max fast-gradient error " + sci(worst) + " at 50 points"};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + SLOWFAST_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "slowfast_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path cfg = root / "run.ini";
  std::ofstream(cfg, std::ios::binary) << "[fixture]\nname = charged_particle\n\n[output]\nformat = both\n";
  const std::vector<std::pair<std::string, int>> runs = {{"a", 1}, {"b", 1}, {"c", 4}};
  std::vector<std::string> csv, json;
  std::string detail;
  for (const auto& [dir, workers] : runs) {
    const int code = run_cli("--config " + cfg.string() + " --out " + (root / dir).string() + " --workers " +
                             std::to_string(workers) + " drift");
    detail += "run " + dir + " (workers " + std::to_string(workers) + ") exit " + std::to_string(code) + "; ";
    csv.push_back(slurp(root / dir / "drift.csv"));
    json.push_back(slurp(root / dir / "drift.json"));
  }
  bool ok = !csv[0].empty() && !json[0].empty();
  for (std::size_t i = 1; i < csv.size(); ++i) ok = ok && csv[i] == csv[0] && json[i] == json[0];
  detail += ok ? "CSV and JSON byte-identical" : "reports differ";
  return {ok, detail};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> fn;
  };
  const std::vector<Criterion> all = {
      {1, "operator identities", 10, operator_identities},
      {2, "quadratic identities", 5, quadratic_identities},
      {3, "hypothesis suite", 30, hypothesis_suite},
      {4, "closed-form F1", 120, f1_oracle},
      {5, "F2 adjudication", 300, f2_adjudication},
      {6, "drift-order study", 900, drift_study},
      {7, "exact-case action", 60, exact_action},
      {8, "determinism", 900, determinism},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = s <= c.budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("criterion %d %s: %s (%.1f s of %.0f s) %s%s\n", c.id, c.name, pass ? "PASS" : "FAIL", s,
                c.budget_s, o.detail.c_str(), in_time ? "" : " [over time budget]");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
