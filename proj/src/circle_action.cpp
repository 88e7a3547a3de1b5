#include "slowfast/circle_action.hpp"

#include <cmath>
#include <numbers>

#include "slowfast/calculus.hpp"
#include "slowfast/errors.hpp"

namespace slowfast {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

OrbitSamples::OrbitSamples(std::vector<double> base, int nodes, std::vector<double> points)
    : base_(std::move(base)), nodes_(nodes), points_(std::move(points)) {
  if (points_.size() != std::size_t(nodes_) * base_.size())
    throw InvalidParameter("orbit sample buffer has the wrong size");
}

std::vector<double> OrbitSamples::values(const Observable& f) const {
  std::vector<double> v(static_cast<std::size_t>(nodes_));
  for (int j = 0; j < nodes_; ++j) v[std::size_t(j)] = f(point(j));
  return v;
}

CircleAction::CircleAction(const SlowFastSystem& system, FlowMode mode, int nodes, double rtol)
    : system_(&system), mode_(mode), nodes_(nodes), rtol_(rtol) {
  require_node_count(nodes);
  if (!(rtol > 0.0)) throw InvalidParameter("flow tolerance must be positive");
  if (mode == FlowMode::analytic && !system.fast_flow)
    throw InvalidParameter("analytic flow mode requested but " + system.name + " has no flow oracle");
}

std::vector<double> CircleAction::generator(std::span<const double> m) const {
  const SlowFastSystem& sys = *system_;
  std::vector<double> v(m.size(), 0.0);
  const auto dh = partial_gradient(sys.hamiltonian, m, 0, sys.dims.fast());
  const double w = sys.frequency(m);
  if (!(w > 0.0)) throw NumericalError("frequency function must be positive");
  const int r = sys.dims.r;
  for (int i = 0; i < r; ++i) {
    v[std::size_t(i)] = -dh[std::size_t(r + i)] / w;
    v[std::size_t(r + i)] = dh[std::size_t(i)] / w;
  }
  return v;
}

void CircleAction::numeric_flow(std::span<const double> m, std::span<const double> times,
                                const SampleSink& sink) const {
  IntegratorConfig cfg;
  cfg.rtol = rtol_;
  cfg.atol = rtol_ * 1e-2;
  const VectorField field = [this](double, std::span<const double> y, std::span<double> dy) {
    const auto g = generator(y);
    std::copy(g.begin(), g.end(), dy.begin());
  };
  slowfast::integrate(field, m, 0.0, times, cfg, sink);
}

std::vector<double> CircleAction::flow_at(double t, std::span<const double> m) const {
  std::vector<double> out(m.size());
  if (mode_ == FlowMode::analytic) {
    (*system_->fast_flow)(t, m, out);
  } else {
    const double times[1] = {t};
    numeric_flow(m, times, [&](double, std::span<const double> y) { out.assign(y.begin(), y.end()); });
  }
  for (double c : out) {
    if (!std::isfinite(c)) throw NumericalError("flow produced a non-finite point");
  }
  return out;
}

PhasePoint CircleAction::flow(double t, const PhasePoint& m) const {
  system_->require_in_domain(m.coords());
  return PhasePoint(m.dims(), flow_at(t, m.coords()));
}

std::vector<double> CircleAction::flow_tangent(double t, std::span<const double> m,
                                               std::span<const double> v) const {
  const std::size_t n = m.size();
  std::vector<double> out(n);
  if (mode_ == FlowMode::analytic && system_->fast_flow->has_dual()) {
    std::vector<dual> md(n), od(n);
    for (std::size_t i = 0; i < n; ++i) md[i] = dual(m[i], v[i]);
    (*system_->fast_flow)(t, std::span<const dual>(md), std::span<dual>(od));
    for (std::size_t i = 0; i < n; ++i) out[i] = od[i].d;
    return out;
  }
  double vn = norm2(v);
  if (vn == 0.0) return out;
  const double h = 1e-5 * std::max(1.0, norm2(m)) / vn;
  std::vector<double> mp(m.begin(), m.end()), mm(m.begin(), m.end());
  for (std::size_t i = 0; i < n; ++i) {
    mp[i] += h * v[i];
    mm[i] -= h * v[i];
  }
  const auto fp = flow_at(t, mp);
  const auto fm = flow_at(t, mm);
  for (std::size_t i = 0; i < n; ++i) out[i] = (fp[i] - fm[i]) / (2.0 * h);
  return out;
}

OrbitSamples CircleAction::sample(std::span<const double> m, int nodes) const {
  if (nodes == 0) nodes = nodes_;
  require_node_count(nodes);
  const std::size_t dim = m.size();
  std::vector<double> pts(std::size_t(nodes) * dim);
  if (mode_ == FlowMode::analytic) {
    for (int j = 0; j < nodes; ++j) {
      const double t = kTwoPi * double(j) / double(nodes);
      (*system_->fast_flow)(t, m, std::span<double>(pts.data() + std::size_t(j) * dim, dim));
    }
  } else {
    // One integration over the period serves every node.
    std::vector<double> times(static_cast<std::size_t>(nodes - 1));
    for (int j = 1; j < nodes; ++j) times[std::size_t(j - 1)] = kTwoPi * double(j) / double(nodes);
    std::copy(m.begin(), m.end(), pts.begin());
    int j = 1;
    numeric_flow(m, times, [&](double, std::span<const double> y) {
      std::copy(y.begin(), y.end(), pts.begin() + std::ptrdiff_t(std::size_t(j) * dim));
      ++j;
    });
  }
  for (double c : pts) {
    if (!std::isfinite(c)) throw NumericalError("orbit sample is non-finite");
  }
  return OrbitSamples(std::vector<double>(m.begin(), m.end()), nodes, std::move(pts));
}

PeriodicityResult CircleAction::check_periodicity(const PhasePoint& m, double tol) const {
  system_->require_in_domain(m.coords());
  const auto end = flow_at(kTwoPi, m.coords());
  double s = 0.0;
  for (std::size_t i = 0; i < end.size(); ++i) s += (end[i] - m[i]) * (end[i] - m[i]);
  PeriodicityResult res;
  res.residual = std::sqrt(s);
  res.pass = res.residual <= tol;
  return res;
}

double CircleAction::average_at(const Observable& f, std::span<const double> m, int nodes) const {
  return sample_mean(sample(m, nodes).values(f));
}

double CircleAction::integrate_at(const Observable& f, std::span<const double> m, int nodes) const {
  return integrate_samples(sample(m, nodes).values(f));
}

double CircleAction::average(const Observable& f, const PhasePoint& m) const {
  system_->require_in_domain(m.coords());
  return average_at(f, m.coords());
}

double CircleAction::integrate(const Observable& f, const PhasePoint& m) const {
  system_->require_in_domain(m.coords());
  return integrate_at(f, m.coords());
}

double CircleAction::solve_homological(const Observable& g, const PhasePoint& m) const {
  return integrate(g, m);
}

std::vector<double> CircleAction::average_slow_oneform(const VectorObservable& coeffs,
                                                       const PhasePoint& m) const {
  system_->require_in_domain(m.coords());
  const OrbitSamples orbit = sample(m.coords());
  const std::size_t width = std::size_t(system_->dims.slow());
  std::vector<double> acc(width, 0.0);
  for (int j = 0; j < orbit.nodes(); ++j) {
    const auto c = coeffs(orbit.point(j));
    if (c.size() != width) throw InvalidParameter("slow 1-form must have 2k coefficients");
    for (std::size_t i = 0; i < width; ++i) acc[i] += c[i];
  }
  for (double& a : acc) {
    a /= double(orbit.nodes());
    if (!std::isfinite(a)) throw NumericalError("non-finite 1-form average");
  }
  return acc;
}

std::vector<double> CircleAction::integrate_slow_oneform(const VectorObservable& coeffs,
                                                         const PhasePoint& m) const {
  system_->require_in_domain(m.coords());
  const OrbitSamples orbit = sample(m.coords());
  const std::size_t width = std::size_t(system_->dims.slow());
  const auto& w = integrating_weights(orbit.nodes());
  std::vector<double> acc(width, 0.0);
  for (int j = 0; j < orbit.nodes(); ++j) {
    const auto c = coeffs(orbit.point(j));
    if (c.size() != width) throw InvalidParameter("slow 1-form must have 2k coefficients");
    for (std::size_t i = 0; i < width; ++i) acc[i] += w[std::size_t(j)] * c[i];
  }
  for (double a : acc) {
    if (!std::isfinite(a)) throw NumericalError("non-finite 1-form integral");
  }
  return acc;
}

}  // namespace slowfast
