#include "slowfast/calculus.hpp"

#include <algorithm>
#include <cmath>

#include "slowfast/errors.hpp"

namespace slowfast {

namespace {

void check_finite(std::span<const double> v, const char* what) {
  for (double c : v) {
    if (!std::isfinite(c)) throw NumericalError(std::string("non-finite ") + what);
  }
}

}  // namespace

std::vector<double> partial_gradient(const ScalarField& f, std::span<const double> m, int begin,
                                     int count, const DiffEngine& engine) {
  std::vector<double> g(std::size_t(count), 0.0);
  if (engine.mode == DiffMode::forward_dual && f.has_dual()) {
    std::vector<dual> lifted(m.begin(), m.end());
    for (int i = 0; i < count; ++i) {
      lifted[std::size_t(begin + i)].d = 1.0;
      g[std::size_t(i)] = f(std::span<const dual>(lifted)).d;
      lifted[std::size_t(begin + i)].d = 0.0;
    }
  } else {
    const double rel = engine.relative_step();
    std::vector<double> probe(m.begin(), m.end());
    for (int i = 0; i < count; ++i) {
      const std::size_t j = std::size_t(begin + i);
      const double c = m[j];
      const double h = rel * std::max(1.0, std::abs(c));
      probe[j] = c + h;
      const double fp = f(probe);
      probe[j] = c - h;
      const double fm = f(probe);
      probe[j] = c;
      g[std::size_t(i)] = (fp - fm) / (2.0 * h);
    }
  }
  check_finite(g, "derivative");
  return g;
}

std::vector<double> gradient(const ScalarField& f, std::span<const double> m,
                             const DiffEngine& engine) {
  return partial_gradient(f, m, 0, int(m.size()), engine);
}

std::vector<double> grad_fast(const SlowFastSystem& sys, const ScalarField& f,
                              const PhasePoint& m, const DiffEngine& engine) {
  sys.require_in_domain(m.coords());
  return partial_gradient(f, m.coords(), 0, sys.dims.fast(), engine);
}

std::vector<double> grad_slow(const SlowFastSystem& sys, const ScalarField& f,
                              const PhasePoint& m, const DiffEngine& engine) {
  sys.require_in_domain(m.coords());
  return partial_gradient(f, m.coords(), sys.dims.slow_begin(), sys.dims.slow(), engine);
}

double symplectic_pairing(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size() / 2;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[n + i] - a[n + i] * b[i];
  return s;
}

double bracket0_at(const Dims& dims, const ScalarField& f, const ScalarField& g,
                   std::span<const double> m, const DiffEngine& engine) {
  const auto df = partial_gradient(f, m, 0, dims.fast(), engine);
  const auto dg = partial_gradient(g, m, 0, dims.fast(), engine);
  const double b = symplectic_pairing(df, dg);
  if (!std::isfinite(b)) throw NumericalError("non-finite fast bracket");
  return b;
}

double bracket1_at(const Dims& dims, const ScalarField& f, const ScalarField& g,
                   std::span<const double> m, const DiffEngine& engine) {
  const auto df = partial_gradient(f, m, dims.slow_begin(), dims.slow(), engine);
  const auto dg = partial_gradient(g, m, dims.slow_begin(), dims.slow(), engine);
  const double b = symplectic_pairing(df, dg);
  if (!std::isfinite(b)) throw NumericalError("non-finite slow bracket");
  return b;
}

double bracket0(const SlowFastSystem& sys, const ScalarField& f, const ScalarField& g,
                const PhasePoint& m, const DiffEngine& engine) {
  sys.require_in_domain(m.coords());
  return bracket0_at(sys.dims, f, g, m.coords(), engine);
}

double bracket1(const SlowFastSystem& sys, const ScalarField& f, const ScalarField& g,
                const PhasePoint& m, const DiffEngine& engine) {
  sys.require_in_domain(m.coords());
  return bracket1_at(sys.dims, f, g, m.coords(), engine);
}

void field_full_at(const SlowFastSystem& sys, std::span<const double> m, double eps,
                   std::span<double> out, const DiffEngine& engine) {
  const Dims& d = sys.dims;
  const auto dh = gradient(sys.hamiltonian, m, engine);
  for (int i = 0; i < d.r; ++i) {
    out[std::size_t(d.y(i))] = -dh[std::size_t(d.x(i))];
    out[std::size_t(d.x(i))] = dh[std::size_t(d.y(i))];
  }
  for (int i = 0; i < d.k; ++i) {
    out[std::size_t(d.p(i))] = -eps * dh[std::size_t(d.q(i))];
    out[std::size_t(d.q(i))] = eps * dh[std::size_t(d.p(i))];
  }
}

std::vector<double> field_fast(const SlowFastSystem& sys, const PhasePoint& m,
                               const DiffEngine& engine) {
  sys.require_in_domain(m.coords());
  const int r = sys.dims.r;
  const auto dh = partial_gradient(sys.hamiltonian, m.coords(), 0, sys.dims.fast(), engine);
  std::vector<double> v(static_cast<std::size_t>(2 * r));
  for (int i = 0; i < r; ++i) {
    v[std::size_t(i)] = -dh[std::size_t(r + i)];
    v[std::size_t(r + i)] = dh[std::size_t(i)];
  }
  return v;
}

std::vector<double> field_slow(const SlowFastSystem& sys, const PhasePoint& m,
                               const DiffEngine& engine) {
  sys.require_in_domain(m.coords());
  const int k = sys.dims.k;
  const auto dh = partial_gradient(sys.hamiltonian, m.coords(), sys.dims.slow_begin(),
                                   sys.dims.slow(), engine);
  std::vector<double> v(static_cast<std::size_t>(2 * k));
  for (int i = 0; i < k; ++i) {
    v[std::size_t(i)] = -dh[std::size_t(k + i)];
    v[std::size_t(k + i)] = dh[std::size_t(i)];
  }
  return v;
}

std::vector<double> field_full(const SlowFastSystem& sys, const PhasePoint& m, double eps,
                               const DiffEngine& engine) {
  sys.require_in_domain(m.coords());
  std::vector<double> v(m.coords().size());
  field_full_at(sys, m.coords(), eps, v, engine);
  return v;
}

}  // namespace slowfast
