#include "slowfast/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "slowfast/errors.hpp"

namespace slowfast {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// cos(n t_j), sin(n t_j) for n = 0..N/2-1 and t_j = 2 pi j / N, row-major in n.
struct Table {
  int n = 0;
  std::vector<double> c;
  std::vector<double> s;
  std::vector<double> weights;
};

const Table& table_for(int n) {
  thread_local std::unordered_map<int, Table> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Table t;
  t.n = n;
  const int modes = n / 2;
  t.c.resize(std::size_t(modes * n));
  t.s.resize(std::size_t(modes * n));
  for (int m = 0; m < modes; ++m) {
    for (int j = 0; j < n; ++j) {
      // Reduce the angle exactly in integers before calling sin/cos.
      const double ang = kTwoPi * double((m * j) % n) / double(n);
      t.c[std::size_t(m * n + j)] = std::cos(ang);
      t.s[std::size_t(m * n + j)] = std::sin(ang);
    }
  }
  t.weights.assign(std::size_t(n), 0.0);
  for (int j = 0; j < n; ++j) {
    double w = 0.0;
    for (int m = 1; m < modes; ++m) w += t.s[std::size_t(m * n + j)] / double(m);
    t.weights[std::size_t(j)] = -2.0 * w / double(n);
  }
  return cache.emplace(n, std::move(t)).first->second;
}

}  // namespace

void require_node_count(int n) {
  if (n < 4 || n % 2 != 0) throw InvalidParameter("quadrature node count must be even and >= 4");
}

TrigSeries TrigSeries::from_samples(std::span<const double> samples) {
  const int n = int(samples.size());
  require_node_count(n);
  const Table& t = table_for(n);
  const int modes = n / 2;
  TrigSeries ts;
  ts.a_.assign(std::size_t(modes), 0.0);
  ts.b_.assign(std::size_t(modes), 0.0);
  for (int m = 0; m < modes; ++m) {
    double ac = 0.0;
    double bs = 0.0;
    const double* crow = &t.c[std::size_t(m * n)];
    const double* srow = &t.s[std::size_t(m * n)];
    for (int j = 0; j < n; ++j) {
      ac += samples[std::size_t(j)] * crow[j];
      bs += samples[std::size_t(j)] * srow[j];
    }
    const double scale = (m == 0) ? 1.0 / n : 2.0 / n;
    ts.a_[std::size_t(m)] = ac * scale;
    ts.b_[std::size_t(m)] = bs * scale;
  }
  for (double v : ts.a_) {
    if (!std::isfinite(v)) throw NumericalError("non-finite Fourier coefficient");
  }
  for (double v : ts.b_) {
    if (!std::isfinite(v)) throw NumericalError("non-finite Fourier coefficient");
  }
  return ts;
}

double TrigSeries::operator()(double s) const {
  double v = a_[0];
  for (std::size_t m = 1; m < a_.size(); ++m) {
    const double ms = double(m) * s;
    v += a_[m] * std::cos(ms) + b_[m] * std::sin(ms);
  }
  return v;
}

double TrigSeries::integrated(double s) const {
  double v = 0.0;
  for (std::size_t m = 1; m < a_.size(); ++m) {
    const double ms = double(m) * s;
    v += (a_[m] * std::sin(ms) - b_[m] * std::cos(ms)) / double(m);
  }
  return v;
}

std::vector<double> TrigSeries::integrated_on_grid(int n) const {
  require_node_count(n);
  const Table& t = table_for(n);
  const int modes = std::min<int>(int(a_.size()), n / 2);
  std::vector<double> out(std::size_t(n), 0.0);
  for (int m = 1; m < modes; ++m) {
    const double am = a_[std::size_t(m)] / m;
    const double bm = b_[std::size_t(m)] / m;
    const double* crow = &t.c[std::size_t(m * n)];
    const double* srow = &t.s[std::size_t(m * n)];
    for (int j = 0; j < n; ++j) out[std::size_t(j)] += am * srow[j] - bm * crow[j];
  }
  // Modes above the target grid's Nyquist limit cannot come from the table.
  for (int m = modes; m < int(a_.size()); ++m) {
    for (int j = 0; j < n; ++j) {
      const double s = kTwoPi * j / n;
      out[std::size_t(j)] +=
          (a_[std::size_t(m)] * std::sin(m * s) - b_[std::size_t(m)] * std::cos(m * s)) / m;
    }
  }
  return out;
}

double sample_mean(std::span<const double> samples) {
  double s = 0.0;
  for (double v : samples) s += v;
  const double mean = s / double(samples.size());
  if (!std::isfinite(mean)) throw NumericalError("non-finite orbit average");
  return mean;
}

const std::vector<double>& integrating_weights(int n) {
  require_node_count(n);
  return table_for(n).weights;
}

double integrate_samples(std::span<const double> samples) {
  const auto& w = integrating_weights(int(samples.size()));
  double s = 0.0;
  for (std::size_t j = 0; j < samples.size(); ++j) s += w[j] * samples[j];
  if (!std::isfinite(s)) throw NumericalError("non-finite integrating-operator value");
  return s;
}

}  // namespace slowfast
