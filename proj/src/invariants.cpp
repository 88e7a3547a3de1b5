#include "slowfast/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "slowfast/calculus.hpp"
#include "slowfast/errors.hpp"
#include "slowfast/spectral.hpp"

namespace slowfast {

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}


double frequency_at(const SlowFastSystem& sys, std::span<const double> m) {
  const double w = sys.frequency(m);
  if (!(w > 0.0) || !std::isfinite(w)) throw NumericalError("frequency must be positive and finite");
  return w;
}

void enforce_periodicity(const CircleAction& action, const PhasePoint& m,
                         const CorrectionOptions& opt) {
  if (!opt.strict) return;
  const auto res = action.check_periodicity(m, opt.periodicity_tol);
  if (!res.pass) {
    std::ostringstream os;
    os << "periodicity hypothesis fails at the evaluation point (residual " << res.residual << ")";
    throw HypothesisViolation(os.str());
  }
}

// Theta at every node of an outer grid, component-major: out[i][j].
std::vector<std::vector<double>> connection_on_grid(const CircleAction& action,
                                                    std::span<const double> m, int inner,
                                                    int outer, const DiffEngine& diff) {
  const SlowFastSystem& sys = action.system();
  const Dims& d = sys.dims;
  const OrbitSamples orbit = action.sample(m, inner);
  std::vector<std::vector<double>> coeff(std::size_t(d.slow()), std::vector<double>(std::size_t(inner)));
  for (int j = 0; j < inner; ++j) {
    const auto dj = partial_gradient(sys.momentum, orbit.point(j), d.slow_begin(), d.slow(), diff);
    for (int i = 0; i < d.slow(); ++i) coeff[std::size_t(i)][std::size_t(j)] = dj[std::size_t(i)];
  }
  std::vector<std::vector<double>> out;
  out.reserve(coeff.size());
  for (const auto& c : coeff) out.push_back(TrigSeries::from_samples(c).integrated_on_grid(outer));
  return out;
}

}  // namespace

std::string to_string(F2Variant v) { return v == F2Variant::ai3 ? "ai3" : "ty3"; }

F2Variant parse_f2_variant(const std::string& s) {
  if (s == "ai3") return F2Variant::ai3;
  if (s == "ty3") return F2Variant::ty3;
  throw InvalidParameter("unknown F2 variant '" + s + "'");
}

bool HypothesisReport::all_pass() const {
  return std::all_of(items.begin(), items.end(), [](const HypothesisItem& i) { return i.pass; });
}

const HypothesisItem& HypothesisReport::item(const std::string& name) const {
  for (const auto& i : items) {
    if (i.name == name) return i;
  }
  throw NotFound("no hypothesis item named " + name);
}

double check_momentum_map(const CircleAction& action, const PhasePoint& m, const DiffEngine& diff) {
  const SlowFastSystem& sys = action.system();
  const auto dj = grad_fast(sys, sys.momentum, m, diff);
  const auto dh = grad_fast(sys, sys.hamiltonian, m, diff);
  const double w = frequency_at(sys, m.coords());
  double s = 0.0;
  for (std::size_t i = 0; i < dj.size(); ++i) s += (dj[i] - dh[i] / w) * (dj[i] - dh[i] / w);
  return std::sqrt(s);
}

double check_adiabatic(const CircleAction& action, const PhasePoint& m, const DiffEngine& diff) {
  const SlowFastSystem& sys = action.system();
  const Dims d = sys.dims;
  const auto avg = action.average_slow_oneform(
      [&](std::span<const double> x) {
        return partial_gradient(sys.momentum, x, d.slow_begin(), d.slow(), diff);
      },
      m);
  return norm2(avg);
}

double check_period_energy(const SlowFastSystem& system, const PhasePoint& m,
                           const DiffEngine& diff) {
  const auto dh = grad_fast(system, system.hamiltonian, m, diff);
  const auto dw = grad_fast(system, system.frequency, m, diff);
  double worst = 0.0;
  for (std::size_t i = 0; i < dh.size(); ++i) {
    for (std::size_t j = i + 1; j < dh.size(); ++j)
      worst = std::max(worst, std::abs(dh[i] * dw[j] - dh[j] * dw[i]));
  }
  return worst;
}

HypothesisReport check_hypotheses(const CircleAction& action, const PhasePoint& m,
                                  const HypothesisTolerances& tol, bool strict) {
  HypothesisReport rep;
  auto add = [&](std::string name, double residual, double t) {
    rep.items.push_back({std::move(name), residual, t, residual <= t});
  };
  add("periodicity", action.check_periodicity(m, tol.periodicity).residual, tol.periodicity);
  add("momentum_map", check_momentum_map(action, m), tol.momentum_map);
  add("adiabatic", check_adiabatic(action, m), tol.adiabatic);
  add("period_energy", check_period_energy(action.system(), m), tol.period_energy);
  if (strict) {
    for (const auto& i : rep.items) {
      if (!i.pass) {
        std::ostringstream os;
        os << "hypothesis '" << i.name << "' fails: residual " << i.residual << " > " << i.tolerance;
        throw HypothesisViolation(os.str());
      }
    }
  }
  return rep;
}

double momentum_from_action(const CircleAction& action, const PhasePoint& m) {
  const SlowFastSystem& sys = action.system();
  sys.require_in_domain(m.coords());
  const Dims& d = sys.dims;
  const auto xm = m.coords();
  // X_H^(0)(m) in the full layout.
  std::vector<double> x0 = action.generator(xm);
  const double w = frequency_at(sys, xm);
  for (double& c : x0) c *= w;
  const int n = action.nodes();
  std::vector<double> vals(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double t = 2.0 * std::numbers::pi * j / n;
    const auto pt = action.flow_at(t, xm);
    const auto tangent = action.flow_tangent(t, xm, x0);
    double s = 0.0;
    for (int i = 0; i < d.r; ++i) s += pt[std::size_t(d.y(i))] * tangent[std::size_t(d.x(i))];
    vals[std::size_t(j)] = s;
  }
  return sample_mean(vals) / w;
}

std::vector<double> connection_form(const CircleAction& action, const PhasePoint& m,
                                    const CorrectionOptions& opt) {
  const SlowFastSystem& sys = action.system();
  sys.require_in_domain(m.coords());
  const Dims d = sys.dims;
  const auto orbit = action.sample(m.coords(), opt.quad.inner);
  const auto& w = integrating_weights(orbit.nodes());
  std::vector<double> theta(std::size_t(d.slow()), 0.0);
  for (int j = 0; j < orbit.nodes(); ++j) {
    const auto dj = partial_gradient(sys.momentum, orbit.point(j), d.slow_begin(), d.slow(), opt.diff);
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] += w[std::size_t(j)] * dj[i];
  }
  return theta;
}

double K1(const CircleAction& action, const PhasePoint& m, const CorrectionOptions& opt) {
  const SlowFastSystem& sys = action.system();
  const auto theta = connection_form(action, m, opt);
  const auto dh = partial_gradient(sys.hamiltonian, m.coords(), sys.dims.slow_begin(),
                                   sys.dims.slow(), opt.diff);
  return 0.5 * symplectic_pairing(theta, dh);
}

double F1_at(const CircleAction& action, std::span<const double> m, const CorrectionOptions& opt) {
  const SlowFastSystem& sys = action.system();
  const Dims& d = sys.dims;
  const int outer = opt.quad.outer;
  const OrbitSamples orbit = action.sample(m, outer);
  const auto theta = connection_on_grid(action, m, opt.quad.inner, outer, opt.diff);
  std::vector<double> hj(static_cast<std::size_t>(outer));
  double k1_sum = 0.0;
  std::vector<double> th(static_cast<std::size_t>(d.slow()));
  for (int j = 0; j < outer; ++j) {
    const auto pt = orbit.point(j);
    const auto dh = partial_gradient(sys.hamiltonian, pt, d.slow_begin(), d.slow(), opt.diff);
    const auto dj = partial_gradient(sys.momentum, pt, d.slow_begin(), d.slow(), opt.diff);
    hj[std::size_t(j)] = symplectic_pairing(dh, dj);
    for (std::size_t i = 0; i < th.size(); ++i) th[i] = theta[i][std::size_t(j)];
    k1_sum += 0.5 * symplectic_pairing(th, dh);
  }
  const double avg_k1 = k1_sum / outer;
  const double value = -(integrate_samples(hj) + avg_k1) / frequency_at(sys, m);
  if (!std::isfinite(value)) throw NumericalError("non-finite F1");
  return value;
}

double F1(const CircleAction& action, const PhasePoint& m, const CorrectionOptions& opt) {
  action.system().require_in_domain(m.coords());
  enforce_periodicity(action, m, opt);
  return F1_at(action, m.coords(), opt);
}

namespace {

std::vector<double> slow_gradient_F1(const CircleAction& action, std::span<const double> m,
                                     const CorrectionOptions& opt, double rel_step) {
  const Dims& d = action.system().dims;
  std::vector<double> probe(m.begin(), m.end());
  std::vector<double> g(static_cast<std::size_t>(d.slow()));
  for (int i = 0; i < d.slow(); ++i) {
    const std::size_t c = std::size_t(d.slow_begin() + i);
    const double x = m[c];
    const double h = rel_step * std::max(1.0, std::abs(x));
    probe[c] = x + h;
    const double fp = F1_at(action, probe, opt);
    probe[c] = x - h;
    const double fm = F1_at(action, probe, opt);
    probe[c] = x;
    g[std::size_t(i)] = (fp - fm) / (2.0 * h);
  }
  return g;
}

struct F2Core {
  double value;
  double mean_bracket;
};

F2Core f2_core(const CircleAction& action, std::span<const double> m, F2Variant variant,
               const CorrectionOptions& opt, double rel_step) {
  const SlowFastSystem& sys = action.system();
  const Dims& d = sys.dims;
  const OrbitSamples orbit = action.sample(m, opt.quad.outer);
  std::vector<double> g(static_cast<std::size_t>(orbit.nodes()));
  for (int j = 0; j < orbit.nodes(); ++j) {
    const auto pt = orbit.point(j);
    const auto dh = partial_gradient(sys.hamiltonian, pt, d.slow_begin(), d.slow(), opt.diff);
    const auto df1 = slow_gradient_F1(action, pt, opt, rel_step);
    g[std::size_t(j)] = symplectic_pairing(dh, df1);
  }
  const double s = integrate_samples(g);
  const double w = frequency_at(sys, m);
  const double value = (variant == F2Variant::ai3) ? -2.0 * s / w : s / w;
  if (!std::isfinite(value)) throw NumericalError("non-finite F2");
  return {value, sample_mean(g)};
}

}  // namespace

double bracket_H_F1_at(const CircleAction& action, std::span<const double> m,
                       const CorrectionOptions& opt) {
  const SlowFastSystem& sys = action.system();
  const auto dh = partial_gradient(sys.hamiltonian, m, sys.dims.slow_begin(), sys.dims.slow(), opt.diff);
  return symplectic_pairing(dh, slow_gradient_F1(action, m, opt, opt.fd_rel_step));
}

double F2_at(const CircleAction& action, std::span<const double> m, F2Variant variant,
             const CorrectionOptions& opt) {
  return f2_core(action, m, variant, opt, opt.fd_rel_step).value;
}

double F2(const CircleAction& action, const PhasePoint& m, F2Variant variant,
          const CorrectionOptions& opt) {
  action.system().require_in_domain(m.coords());
  enforce_periodicity(action, m, opt);
  return F2_at(action, m.coords(), variant, opt);
}

F2Result F2_detailed(const CircleAction& action, const PhasePoint& m, F2Variant variant,
                     const CorrectionOptions& opt, bool estimate_error) {
  action.system().require_in_domain(m.coords());
  enforce_periodicity(action, m, opt);
  const F2Core core = f2_core(action, m.coords(), variant, opt, opt.fd_rel_step);
  F2Result res;
  res.value = core.value;
  res.solvability_residual = core.mean_bracket;
  if (estimate_error) {
    const F2Core coarse = f2_core(action, m.coords(), variant, opt, 2.0 * opt.fd_rel_step);
    // Central differences are second order: the h-error is a third of the h/2h gap.
    res.fd_error_estimate = std::abs(coarse.value - core.value) / 3.0;
    res.precision_warning = res.fd_error_estimate > 1e-6 * std::max(1.0, std::abs(core.value));
  }
  return res;
}

double lie_along_generator(const CircleAction& action, const Observable& u,
                           std::span<const double> m, double step) {
  const double up1 = u(action.flow_at(step, m));
  const double um1 = u(action.flow_at(-step, m));
  const double up2 = u(action.flow_at(2.0 * step, m));
  const double um2 = u(action.flow_at(-2.0 * step, m));
  return (-up2 + 8.0 * up1 - 8.0 * um1 + um2) / (12.0 * step);
}

double first_order_residual(const CircleAction& action, const PhasePoint& m,
                            const CorrectionOptions& opt) {
  const SlowFastSystem& sys = action.system();
  sys.require_in_domain(m.coords());
  const double lie = lie_along_generator(
      action, [&](std::span<const double> x) { return F1_at(action, x, opt); }, m.coords());
  const double hj = bracket1_at(sys.dims, sys.hamiltonian, sys.momentum, m.coords(), opt.diff);
  return lie + hj / frequency_at(sys, m.coords());
}

double second_order_residual(const CircleAction& action, const PhasePoint& m, F2Variant variant,
                             const CorrectionOptions& opt) {
  const SlowFastSystem& sys = action.system();
  sys.require_in_domain(m.coords());
  const double lie = lie_along_generator(
      action, [&](std::span<const double> x) { return F2_at(action, x, variant, opt); }, m.coords());
  const double hf = bracket_H_F1_at(action, m.coords(), opt);
  return lie + 2.0 * hf / frequency_at(sys, m.coords());
}

InvariantSeries::InvariantSeries(const CircleAction& action, int order, F2Variant variant,
                                 CorrectionOptions opt)
    : action_(&action), order_(order), variant_(variant), opt_(opt) {
  if (order < 0 || order > 2) {
    std::ostringstream os;
    os << "invariant series of order " << order << " is not available (supported: 0, 1, 2)";
    throw UnsupportedOrder(os.str());
  }
}

SeriesTerms InvariantSeries::terms_at(std::span<const double> m) const {
  SeriesTerms t;
  t.J = action_->system().momentum(m);
  if (order_ >= 1) t.F1 = F1_at(*action_, m, opt_);
  if (order_ >= 2) t.F2 = F2_at(*action_, m, variant_, opt_);
  return t;
}

double InvariantSeries::combine(const SeriesTerms& t, double eps, int order) {
  double v = t.J;
  if (order >= 1) v += eps * t.F1;
  if (order >= 2) v += 0.5 * eps * eps * t.F2;
  return v;
}

double InvariantSeries::evaluate_at(std::span<const double> m, double eps) const {
  return combine(terms_at(m), eps, order_);
}

double InvariantSeries::evaluate(const PhasePoint& m, double eps) const {
  action_->system().require_in_domain(m.coords());
  enforce_periodicity(*action_, m, opt_);
  return evaluate_at(m.coords(), eps);
}

InvariantSeries assemble(const CircleAction& action, int order, F2Variant variant,
                         CorrectionOptions opt) {
  return InvariantSeries(action, order, variant, opt);
}

double lie_derivative(const SlowFastSystem& system, const ScalarField& F, const PhasePoint& m,
                      double eps, const DiffEngine& diff) {
  system.require_in_domain(m.coords());
  const auto g = gradient(F, m.coords(), diff);
  std::vector<double> v(g.size());
  field_full_at(system, m.coords(), eps, v);
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g[i] * v[i];
  if (!std::isfinite(s)) throw NumericalError("non-finite Lie derivative");
  return s;
}

}  // namespace slowfast
