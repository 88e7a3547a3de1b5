// slowfast: hypothesis checks, invariant evaluation, simulation and drift
// studies for the built-in slow-fast fixtures.
//
//   slowfast check     --config run.ini
//   slowfast invariant --config run.ini --point 1,1,1,0 --order 2 --eps 0.1
//   slowfast simulate  --config run.ini --out results/
//   slowfast drift     --config run.ini --workers 4 --format both
//
// Exit status: 0 success, 1 check or contract failure, 2 usage/config error.

#include <CLI11.hpp>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <json.hpp>

#include "slowfast/calculus.hpp"
#include "slowfast/circle_action.hpp"
#include "slowfast/config.hpp"
#include "slowfast/errors.hpp"
#include "slowfast/experiments.hpp"
#include "slowfast/invariants.hpp"

using namespace slowfast;

namespace {

struct Flags {
  std::string config;
  std::string out;
  int workers = 0;
  bool strict = false;
  std::string variant;
  std::string format;
  // invariant
  std::string point;
  int order = -1;
  double eps = -1.0;
};

std::string sig12(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  return std::string(buf, r.ptr);
}

RunConfig effective_config(const Flags& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : load_config(f.config);
  if (!f.out.empty()) c.out_dir = f.out;
  if (f.strict) c.strict = true;
  if (!f.variant.empty()) c.variant = f.variant;
  if (!f.format.empty()) c.format = f.format;
  if (!f.point.empty()) {
    RunConfig tmp = parse_config("[fixture]\npoint = " + f.point + "\n");
    c.point = tmp.point;
  }
  if (f.order >= 0) c.order = f.order;
  if (f.eps >= 0.0) c.eps = f.eps;
  c.validate();
  return c;
}

int worker_count(const Flags& f) {
  if (f.workers > 0) return f.workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

F2Variant resolve_variant(const RunConfig& c, const Fixture& fx, int workers) {
  if (c.variant != "auto") return parse_f2_variant(c.variant);
  const VariantComparison cmp = compare_variants(c.drift_config(fx, workers), false);
  if (!cmp.default_variant) throw HypothesisViolation("no F2 variant passes the comparison");
  return *cmp.default_variant;
}

int cmd_check(const Flags& f) {
  const RunConfig c = effective_config(f);
  const Fixture fx = c.make_fixture();
  const PhasePoint m = fx.point(c.library_point(fx));
  fx.system.require_in_domain(m.coords());
  const CircleAction action(fx.system);
  const HypothesisReport rep = check_hypotheses(action, m, {}, c.strict);
  if (c.format == "json") {
    nlohmann::ordered_json j;
    j["fixture"] = fx.name;
    j["point"] = fx.to_natural_order(m.coords());
    nlohmann::ordered_json items = nlohmann::ordered_json::array();
    for (const auto& i : rep.items)
      items.push_back({{"name", i.name}, {"residual", i.residual}, {"tolerance", i.tolerance}, {"pass", i.pass}});
    j["items"] = items;
    j["all_pass"] = rep.all_pass();
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "fixture " << fx.name << "\n";
    for (const auto& i : rep.items) {
      std::cout << "  " << i.name << "  residual " << format_double(i.residual) << "  tol "
                << format_double(i.tolerance) << "  " << (i.pass ? "PASS" : "FAIL") << "\n";
    }
  }
  if (!rep.all_pass()) {
    for (const auto& i : rep.items) {
      if (!i.pass) std::cerr << "hypothesis failed: " << i.name << "\n";
    }
    return 1;
  }
  return 0;
}

int cmd_invariant(const Flags& f) {
  const RunConfig c = effective_config(f);
  const Fixture fx = c.make_fixture();
  const PhasePoint m = fx.point(c.library_point(fx));
  fx.system.require_in_domain(m.coords());
  const CircleAction action(fx.system);
  const F2Variant v = resolve_variant(c, fx, worker_count(f));
  const InvariantSeries series = assemble(action, c.order, v, c.corrections());
  const PhasePoint& pt = m;
  if (c.strict) check_hypotheses(action, pt, {}, true);
  const SeriesTerms t = series.terms_at(pt.coords());
  std::cout << "J  = " << sig12(t.J) << "\n";
  if (c.order >= 1) std::cout << "F1 = " << sig12(t.F1) << "\n";
  if (c.order >= 2) std::cout << "F2 = " << sig12(t.F2) << "  (" << to_string(v) << ")\n";
  std::cout << "F  = " << sig12(InvariantSeries::combine(t, c.eps, c.order)) << "  (order " << c.order
            << ", eps " << format_double(c.eps) << ")\n";
  return 0;
}

int cmd_simulate(const Flags& f) {
  const RunConfig c = effective_config(f);
  const Fixture fx = c.make_fixture();
  const std::vector<double> m0 = c.library_point(fx);
  fx.system.require_in_domain(m0);
  const CircleAction action(fx.system);
  if (c.strict) check_hypotheses(action, fx.point(m0), {}, true);
  const F2Variant v = resolve_variant(c, fx, worker_count(f));
  double T = c.t_end;
  if (T == 0.0) {
    if (c.eps == 0.0) throw ConfigError("experiment.t_end is required when eps = 0");
    T = c.horizon / c.eps;
  }
  const InvariantSeries series(action, 2, v, c.corrections());
  const Dims d = fx.system.dims;
  std::filesystem::create_directories(c.out_dir);
  const std::string path = (std::filesystem::path(c.out_dir) / "simulate.csv").string();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path);
  os << "t";
  for (int i = 0; i < d.r; ++i) os << ",y" << i + 1;
  for (int i = 0; i < d.r; ++i) os << ",x" << i + 1;
  for (int i = 0; i < d.k; ++i) os << ",p" << i + 1;
  for (int i = 0; i < d.k; ++i) os << ",q" << i + 1;
  os << ",H,F0,F1s,F2s\n";
  auto row = [&](double t, std::span<const double> y) {
    const SeriesTerms terms = series.terms_at(y);
    std::string line = format_double(t);
    for (double x : y) line += "," + format_double(x);
    line += "," + format_double(fx.system.hamiltonian(y));
    for (int k = 0; k <= 2; ++k) line += "," + format_double(InvariantSeries::combine(terms, c.eps, k));
    os << line << "\n";
    os.flush();
  };
  const SlowFastSystem& sys = fx.system;
  const double eps = c.eps;
  const VectorField field = [&sys, eps](double, std::span<const double> y, std::span<double> dy) {
    field_full_at(sys, y, eps, dy);
  };
  std::vector<double> times;
  for (int i = 1; i <= c.samples; ++i) times.push_back(T * double(i) / double(c.samples));
  row(0.0, m0);
  slowfast::integrate(field, m0, 0.0, times, c.integrator(), row);
  std::cout << "wrote " << path << " (" << c.samples + 1 << " rows)\n";
  return 0;
}

int cmd_drift(const Flags& f) {
  const RunConfig c = effective_config(f);
  const Fixture fx = c.make_fixture();
  const int workers = worker_count(f);
  DriftConfig dc = c.drift_config(fx, workers);
  fx.system.require_in_domain(dc.m0);
  if (dc.eps_grid.size() < 4) {
    throw SlopeUndefined("drift study needs at least 4 eps values, got " + std::to_string(dc.eps_grid.size()));
  }
  const CircleAction action(fx.system);
  const HypothesisReport hyp = check_hypotheses(action, fx.point(dc.m0), {}, c.strict);
  const VariantComparison cmp = compare_variants(dc);
  if (c.variant == "auto") {
    if (cmp.default_variant) dc.variant = *cmp.default_variant;
  }
  const DriftReport rep = order_sweep(dc);
  const auto written =
      emit(rep, &cmp, serialize_config(c, false), parse_output_format(c.format), c.out_dir);

  std::cout << "eps        order  drift\n";
  for (const auto& r : rep.rows) {
    std::printf("%-10s %-6d %s%s\n", format_double(r.eps).c_str(), r.order, format_double(r.drift).c_str(),
                r.valid ? "" : "  (invalid: integrator drift)");
  }
  for (const auto& s : rep.fits) {
    std::cout << "s" << s.order << " = " << sig12(s.slope) << (s.excluded_largest ? "  (largest eps excluded)" : "")
              << "\n";
  }
  for (const auto& v : cmp.variants) {
    std::cout << "variant " << to_string(v.variant) << ": residual " << format_double(v.homological_residual);
    if (v.closed_form_error) std::cout << ", closed-form error " << format_double(*v.closed_form_error);
    std::cout << (v.pass ? "  pass" : "  fail") << "\n";
  }
  for (const auto& w : written) std::cout << "wrote " << w << "\n";

  int status = 0;
  const ContractCheck cc = slope_contract(rep);
  for (const auto& msg : cc.failures) std::cerr << "contract: " << msg << "\n";
  if (!cc.met) status = 1;
  if (!cmp.get(dc.variant).pass) {
    std::cerr << "variant " << to_string(dc.variant) << " fails the F2 comparison\n";
    status = 1;
  }
  if (!hyp.all_pass()) {
    std::cerr << "hypothesis checks fail at m0\n";
    status = 1;
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"slow-fast adiabatic invariant toolkit"};
  Flags f;
  app.add_option("--config", f.config, "INI run configuration");
  app.add_option("--out", f.out, "output directory");
  app.add_option("--workers", f.workers, "worker threads (default: logical cores)")->check(CLI::PositiveNumber);
  app.add_flag("--strict", f.strict, "fail on hypothesis violations");
  app.add_option("--variant", f.variant, "F2 variant")->check(CLI::IsMember({"ai3", "ty3", "auto"}));
  app.add_option("--format", f.format, "report format")->check(CLI::IsMember({"csv", "json", "both"}));
  app.require_subcommand(1);

  auto* check = app.add_subcommand("check", "hypothesis checks at the configured point");
  auto* inv = app.add_subcommand("invariant", "J, F1, F2 and the series value at a point");
  inv->add_option("--point", f.point, "point in the fixture's natural order, comma separated");
  inv->add_option("--order", f.order, "series order");
  inv->add_option("--eps", f.eps, "perturbation parameter");
  auto* sim = app.add_subcommand("simulate", "trajectory CSV with series values");
  auto* drift = app.add_subcommand("drift", "drift-order study and F2 variant comparison");
  for (auto* sub : {check, inv, sim, drift}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*check) return cmd_check(f);
    if (*inv) return cmd_invariant(f);
    if (*sim) return cmd_simulate(f);
    if (*drift) return cmd_drift(f);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidParameter& e) {
    std::cerr << "invalid parameter: " << e.what() << "\n";
    return 2;
  } catch (const UnsupportedOrder& e) {
    std::cerr << "unsupported order: " << e.what() << "\n";
    return 2;
  } catch (const SlopeUndefined& e) {
    std::cerr << "slope undefined: " << e.what() << "\n";
    return 2;
  } catch (const NotFound& e) {
    std::cerr << "not found: " << e.what() << "\n";
    return 2;
  } catch (const HypothesisViolation& e) {
    std::cerr << "hypothesis violation: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
