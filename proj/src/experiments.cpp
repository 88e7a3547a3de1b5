#include "slowfast/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "slowfast/calculus.hpp"
#include "slowfast/circle_action.hpp"
#include "slowfast/errors.hpp"
#include "slowfast/fit.hpp"

namespace slowfast {

IntegratorConfig DriftConfig::default_integrator() {
  IntegratorConfig c;
  c.method = IntegratorMethod::dopri5;
  c.rtol = 1e-11;
  c.atol = 1e-13;
  return c;
}

void DriftConfig::validate() const {
  if (eps_grid.empty()) throw InvalidParameter("eps grid is empty");
  std::set<double> seen;
  for (double e : eps_grid) {
    if (!(e > 0.0 && e < 1.0)) throw InvalidParameter("eps values must lie in (0, 1)");
    if (!seen.insert(e).second) throw InvalidParameter("eps values must be distinct");
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InvalidParameter("horizon constant must be positive");
  if (samples < 1) throw InvalidParameter("samples must be >= 1");
  if (orders.empty()) throw InvalidParameter("no orders requested");
  for (int k : orders) {
    if (k < 0 || k > 2) {
      std::ostringstream os;
      os << "order " << k << " is not available (supported: 0, 1, 2)";
      throw UnsupportedOrder(os.str());
    }
  }
  integrator.validate();
  require_node_count(corrections.quad.outer);
  require_node_count(corrections.quad.inner);
  if (variant_points < 0) throw InvalidParameter("variant_points must be >= 0");
}

const DriftRow& DriftReport::row(double eps, int order) const {
  for (const auto& r : rows) {
    if (r.eps == eps && r.order == order) return r;
  }
  throw NotFound("no drift row for the requested (eps, order)");
}

const SlopeFit& DriftReport::fit(int order) const {
  for (const auto& f : fits) {
    if (f.order == order) return f;
  }
  throw NotFound("no slope fit for the requested order");
}

const VariantSummary& VariantComparison::get(F2Variant v) const {
  for (const auto& s : variants) {
    if (s.variant == v) return s;
  }
  throw NotFound("variant not compared");
}

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex mu;
  int failed_index = n;
  std::exception_ptr failure;
  auto run = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

std::vector<double> initial_point(const DriftConfig& config, const Fixture& f) {
  std::vector<double> m0 = config.m0.empty() ? f.default_point : config.m0;
  f.system.require_in_domain(m0);
  return m0;
}

int max_order(const std::vector<int>& orders) { return *std::max_element(orders.begin(), orders.end()); }

double order_value(const SeriesTerms& t, double eps, int order) {
  return InvariantSeries::combine(t, eps, order);
}

std::vector<SeriesTerms> evaluate_terms(const InvariantSeries& series,
                                        const std::vector<std::vector<double>>& states, int workers) {
  std::vector<SeriesTerms> out(states.size());
  parallel_for(int(states.size()), workers,
               [&](int i) { out[std::size_t(i)] = series.terms_at(states[std::size_t(i)]); });
  return out;
}

std::vector<DriftRow> rows_from_trace(const DriftTrace& tr, const std::vector<int>& orders, int samples) {
  std::vector<int> sorted = orders;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  double edrift = 0.0;
  for (double h : tr.energy) edrift = std::max(edrift, std::abs(h - tr.energy.front()));
  std::vector<DriftRow> rows;
  for (int k : sorted) {
    DriftRow r;
    r.eps = tr.eps;
    r.order = k;
    r.horizon = tr.horizon;
    r.samples = samples;
    r.energy_drift = edrift;
    const double f0 = order_value(tr.terms.front(), tr.eps, k);
    for (const auto& t : tr.terms) r.drift = std::max(r.drift, std::abs(order_value(t, tr.eps, k) - f0));
    r.valid = edrift < 0.1 * r.drift;
    rows.push_back(r);
  }
  return rows;
}

std::vector<std::vector<double>> integrate_states(const Fixture& f, std::span<const double> m0,
                                                  double eps, double T, int samples,
                                                  const IntegratorConfig& cfg,
                                                  std::vector<double>& times_out) {
  const SlowFastSystem& sys = f.system;
  const VectorField field = [&sys, eps](double, std::span<const double> y, std::span<double> dy) {
    field_full_at(sys, y, eps, dy);
  };
  std::vector<double> times(static_cast<std::size_t>(samples));
  for (int i = 1; i <= samples; ++i) times[std::size_t(i - 1)] = T * double(i) / double(samples);
  std::vector<std::vector<double>> states;
  states.reserve(std::size_t(samples) + 1);
  states.emplace_back(m0.begin(), m0.end());
  times_out.assign(1, 0.0);
  slowfast::integrate(field, m0, 0.0, times, cfg, [&](double t, std::span<const double> y) {
    times_out.push_back(t);
    states.emplace_back(y.begin(), y.end());
  });
  return states;
}

}  // namespace

DriftTrace trace_drift(const DriftConfig& config, const Fixture& fixture, double eps, int max_ord) {
  const std::vector<double> m0 = initial_point(config, fixture);
  DriftTrace tr;
  tr.eps = eps;
  tr.horizon = config.horizon / eps;
  tr.states = integrate_states(fixture, m0, eps, tr.horizon, config.samples, config.integrator, tr.times);
  const CircleAction action(fixture.system, FlowMode::analytic);
  const InvariantSeries series(action, max_ord, config.variant, config.corrections);
  tr.terms = evaluate_terms(series, tr.states, config.workers);
  tr.energy.reserve(tr.states.size());
  for (const auto& s : tr.states) tr.energy.push_back(fixture.system.hamiltonian(s));
  return tr;
}

DriftRow measure_drift(const DriftConfig& config, double eps, int order) {
  DriftConfig c = config;
  c.orders = {order};
  c.eps_grid = {eps};
  c.validate();
  const Fixture f = get_fixture(c.fixture, c.params);
  const DriftTrace tr = trace_drift(c, f, eps, order);
  return rows_from_trace(tr, c.orders, c.samples).front();
}

constexpr double kMinOutlierResidual = 0.02;

SlopeFit fit_order(const std::vector<double>& eps, const std::vector<double>& drift, int order) {
  if (eps.size() < 4) {
    std::ostringstream os;
    os << "slope fit needs at least 4 grid points, got " << eps.size();
    throw SlopeUndefined(os.str());
  }
  SlopeFit out;
  out.order = order;
  LogLogFit fit = fit_loglog(eps, drift);
  out.points = int(eps.size());
  if (eps.size() >= 5) {
    const std::size_t big = std::size_t(std::max_element(eps.begin(), eps.end()) - eps.begin());
    std::vector<double> e2, d2;
    for (std::size_t i = 0; i < eps.size(); ++i) {
      if (i == big) continue;
      e2.push_back(eps[i]);
      d2.push_back(drift[i]);
    }
    const LogLogFit rest = fit_loglog(e2, d2);
    double others = 0.0;
    for (double r : rest.residuals) others = std::max(others, std::abs(r));
    // residual of the largest eps against the line through the others
    const double r_big = std::log(drift[big]) - (rest.intercept + rest.slope * std::log(eps[big]));
    if (std::abs(r_big) > 3.0 * std::max(others, kMinOutlierResidual)) {
      fit = rest;
      out.points = int(e2.size());
      out.excluded_largest = true;
    }
  }
  out.slope = fit.slope;
  out.intercept = fit.intercept;
  out.rms_residual = fit.rms_residual;
  out.residuals = fit.residuals;
  return out;
}

DriftReport order_sweep(const DriftConfig& config) {
  config.validate();
  if (config.eps_grid.size() < 4) {
    std::ostringstream os;
    os << "order sweep needs at least 4 eps values, got " << config.eps_grid.size();
    throw SlopeUndefined(os.str());
  }
  const Fixture f = get_fixture(config.fixture, config.params);
  const std::vector<double> m0 = initial_point(config, f);
  std::vector<double> grid = config.eps_grid;
  std::sort(grid.begin(), grid.end(), std::greater<>());
  const int top = max_order(config.orders);

  std::vector<DriftTrace> traces(grid.size());
  parallel_for(int(grid.size()), config.workers, [&](int i) {
    DriftTrace& tr = traces[std::size_t(i)];
    tr.eps = grid[std::size_t(i)];
    tr.horizon = config.horizon / tr.eps;
    tr.states = integrate_states(f, m0, tr.eps, tr.horizon, config.samples, config.integrator, tr.times);
  });
  // Series terms on every (eps, sample) pair as one flat job list.
  const CircleAction action(f.system, FlowMode::analytic);
  const InvariantSeries series(action, top, config.variant, config.corrections);
  std::vector<std::pair<int, int>> jobs;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    traces[i].terms.resize(traces[i].states.size());
    for (std::size_t j = 0; j < traces[i].states.size(); ++j) jobs.emplace_back(int(i), int(j));
  }
  parallel_for(int(jobs.size()), config.workers, [&](int n) {
    auto [i, j] = jobs[std::size_t(n)];
    auto& tr = traces[std::size_t(i)];
    tr.terms[std::size_t(j)] = series.terms_at(tr.states[std::size_t(j)]);
  });

  DriftReport rep;
  rep.config = config;
  rep.config.m0 = m0;
  for (auto& tr : traces) {
    for (const auto& s : tr.states) tr.energy.push_back(f.system.hamiltonian(s));
    const auto rows = rows_from_trace(tr, config.orders, config.samples);
    rep.rows.insert(rep.rows.end(), rows.begin(), rows.end());
  }
  std::vector<int> orders = config.orders;
  std::sort(orders.begin(), orders.end());
  orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
  for (int k : orders) {
    std::vector<double> d;
    for (double e : grid) d.push_back(rep.row(e, k).drift);
    rep.fits.push_back(fit_order(grid, d, k));
  }
  return rep;
}

ContractCheck slope_contract(const DriftReport& report) {
  ContractCheck c;
  auto fail = [&](const std::string& s) {
    c.met = false;
    c.failures.push_back(s);
  };
  auto slope_of = [&](int k) -> std::optional<double> {
    for (const auto& f : report.fits) {
      if (f.order == k) return f.slope;
    }
    return std::nullopt;
  };
  if (auto s = slope_of(0); s && !(*s >= 0.7 && *s <= 1.3)) fail("s0 = " + format_double(*s) + " outside [0.7, 1.3]");
  if (auto s = slope_of(1); s && !(*s >= 1.7 && *s <= 2.3)) fail("s1 = " + format_double(*s) + " outside [1.7, 2.3]");
  if (auto s = slope_of(2); s && !(*s >= 1.7)) fail("s2 = " + format_double(*s) + " below 1.7");
  std::vector<double> grid = report.config.eps_grid;
  std::sort(grid.begin(), grid.end());
  const std::size_t n = std::min<std::size_t>(3, grid.size());
  const bool all_orders = slope_of(0) && slope_of(1) && slope_of(2);
  if (all_orders) {
    for (std::size_t i = 0; i < n; ++i) {
      const double e = grid[i];
      const double d0 = report.row(e, 0).drift, d1 = report.row(e, 1).drift, d2 = report.row(e, 2).drift;
      if (!(d2 < d1 && d1 < d0)) fail("drift ordering d2 < d1 < d0 violated at eps = " + format_double(e));
    }
  }
  for (const auto& r : report.rows) {
    if (!r.valid)
      fail("integrator energy drift too large at eps = " + format_double(r.eps) +
           ", order " + std::to_string(r.order));
  }
  return c;
}

VariantComparison compare_variants(const DriftConfig& config, bool with_drift) {
  config.validate();
  const Fixture f = get_fixture(config.fixture, config.params);
  const std::vector<double> m0 = initial_point(config, f);
  const CircleAction action(f.system, FlowMode::analytic);

  std::vector<std::vector<double>> probes{m0};
  std::mt19937_64 rng(config.seed);
  for (int i = 0; i < config.variant_points; ++i) probes.push_back(f.random_point(rng));

  VariantComparison cmp;
  // Trajectories do not depend on the variant; integrate once.
  std::vector<double> grid = config.eps_grid;
  std::sort(grid.begin(), grid.end(), std::greater<>());
  std::vector<std::vector<std::vector<double>>> states(with_drift ? grid.size() : 0);
  if (with_drift) {
    parallel_for(int(grid.size()), config.workers, [&](int i) {
      std::vector<double> times;
      states[std::size_t(i)] = integrate_states(f, m0, grid[std::size_t(i)], config.horizon / grid[std::size_t(i)],
                                                config.samples, config.integrator, times);
    });
  }
  for (F2Variant v : {F2Variant::ai3, F2Variant::ty3}) {
    VariantSummary s;
    s.variant = v;
    std::vector<double> closed(probes.size(), 0.0), resid(probes.size(), 0.0);
    parallel_for(int(probes.size()), config.workers, [&](int i) {
      const PhasePoint p = f.point(probes[std::size_t(i)]);
      if (f.has_F2_closed()) closed[std::size_t(i)] = std::abs(F2(action, p, v, config.corrections) - f.F2_closed(p.coords()));
      resid[std::size_t(i)] = std::abs(second_order_residual(action, p, v, config.corrections));
    });
    if (f.has_F2_closed()) s.closed_form_error = *std::max_element(closed.begin(), closed.end());
    s.homological_residual = *std::max_element(resid.begin(), resid.end());
    s.pass = s.homological_residual <= cmp.tolerance &&
             (!s.closed_form_error || *s.closed_form_error <= cmp.tolerance);
    if (with_drift) {
      const InvariantSeries series(action, 2, v, config.corrections);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto terms = evaluate_terms(series, states[i], config.workers);
        const double f0 = order_value(terms.front(), grid[i], 2);
        double d = 0.0;
        for (const auto& t : terms) d = std::max(d, std::abs(order_value(t, grid[i], 2) - f0));
        s.drift2.push_back(d);
      }
    }
    cmp.variants.push_back(std::move(s));
  }
  const bool a = cmp.get(F2Variant::ai3).pass, t = cmp.get(F2Variant::ty3).pass;
  if (a && t) {
    cmp.indistinguishable = true;
    cmp.default_variant = F2Variant::ai3;
  } else if (a) {
    cmp.default_variant = F2Variant::ai3;
  } else if (t) {
    cmp.default_variant = F2Variant::ty3;
  } else {
    cmp.no_variant_passes = true;
  }
  return cmp;
}

OutputFormat parse_output_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  if (s == "both") return OutputFormat::both;
  throw InvalidParameter("unknown output format '" + s + "'");
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string drift_csv(const DriftReport& report) {
  std::string out = "eps,order,drift,horizon,samples\n";
  for (const auto& r : report.rows) {
    out += format_double(r.eps) + "," + std::to_string(r.order) + "," + format_double(r.drift) + "," +
           format_double(r.horizon) + "," + std::to_string(r.samples) + "\n";
  }
  return out;
}

std::string drift_json(const DriftReport& report, const VariantComparison* variants,
                       const std::string& config_ini) {
  using nlohmann::ordered_json;
  const DriftConfig& c = report.config;
  ordered_json j;
  j["fixture"] = c.fixture;
  ordered_json params = ordered_json::object();
  for (const auto& [k, v] : c.params) params[k] = v;
  j["params"] = params;
  j["m0"] = c.m0;
  j["eps_grid"] = c.eps_grid;
  j["horizon_constant"] = c.horizon;
  j["samples"] = c.samples;
  j["integrator"] = {{"method", c.integrator.method == IntegratorMethod::dopri5 ? "dopri5" : "rk4"},
                     {"dt", c.integrator.dt},
                     {"rtol", c.integrator.rtol},
                     {"atol", c.integrator.atol},
                     {"max_steps", c.integrator.max_steps}};
  j["quadrature"] = {{"outer", c.corrections.quad.outer},
                     {"inner", c.corrections.quad.inner},
                     {"fd_step", c.corrections.fd_rel_step}};
  j["variant"] = to_string(c.variant);
  j["seed"] = c.seed;
  ordered_json rows = ordered_json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"eps", r.eps},
                    {"order", r.order},
                    {"drift", r.drift},
                    {"horizon", r.horizon},
                    {"samples", r.samples},
                    {"energy_drift", r.energy_drift},
                    {"valid", r.valid}});
  }
  j["rows"] = rows;
  ordered_json fits = ordered_json::array();
  for (const auto& f : report.fits) {
    fits.push_back({{"order", f.order},
                    {"slope", f.slope},
                    {"intercept", f.intercept},
                    {"rms_residual", f.rms_residual},
                    {"residuals", f.residuals},
                    {"points", f.points},
                    {"excluded_largest_eps", f.excluded_largest}});
  }
  j["fits"] = fits;
  const ContractCheck cc = slope_contract(report);
  j["contract"] = {{"met", cc.met}, {"failures", cc.failures}};
  if (variants) {
    ordered_json v;
    ordered_json list = ordered_json::array();
    for (const auto& s : variants->variants) {
      ordered_json e;
      e["variant"] = to_string(s.variant);
      e["closed_form_error"] = s.closed_form_error ? ordered_json(*s.closed_form_error) : ordered_json(nullptr);
      e["homological_residual"] = s.homological_residual;
      e["drift2"] = s.drift2;
      e["pass"] = s.pass;
      list.push_back(e);
    }
    v["tolerance"] = variants->tolerance;
    v["variants"] = list;
    v["default"] = variants->default_variant ? ordered_json(to_string(*variants->default_variant)) : ordered_json(nullptr);
    v["indistinguishable"] = variants->indistinguishable;
    v["no_variant_passes"] = variants->no_variant_passes;
    j["variant_comparison"] = v;
  }
  j["config_ini"] = config_ini;
  return j.dump(2) + "\n";
}

std::vector<std::string> emit(const DriftReport& report, const VariantComparison* variants,
                              const std::string& config_ini, OutputFormat format,
                              const std::string& dir, const std::string& stem) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<std::string> written;
  auto write = [&](const std::string& name, const std::string& body) {
    const fs::path p = fs::path(dir) / name;
    std::ofstream os(p, std::ios::binary);
    if (!os) throw Error("cannot open " + p.string() + " for writing");
    os << body;
    written.push_back(p.string());
  };
  if (format != OutputFormat::json) write(stem + ".csv", drift_csv(report));
  if (format != OutputFormat::csv) write(stem + ".json", drift_json(report, variants, config_ini));
  return written;
}

}  // namespace slowfast
