#include "slowfast/quadratic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "slowfast/calculus.hpp"
#include "slowfast/errors.hpp"

namespace slowfast {

double Q(const Mat2& s, std::span<const double> z) {
  if (z.size() != 2) throw InvalidParameter("Q expects a fast vector of length 2");
  return quad_form(s, z[0], z[1]);
}

Mat2 avg_Q(const Mat2& a, const Mat2& s) { return 0.5 * (s - a * s * a); }

Mat2 S_Q(const Mat2& a, const Mat2& s) { return 0.25 * commutator(a, s); }

std::vector<double> linear_flow(const Mat2& a, double t, std::span<const double> z) {
  if (z.size() != 2) throw InvalidParameter("linear_flow expects a fast vector of length 2");
  const double c = std::cos(t), s = std::sin(t);
  return {c * z[0] + s * (a.a00 * z[0] + a.a01 * z[1]), c * z[1] + s * (a.a10 * z[0] + a.a11 * z[1])};
}

void Sl2Field::check_on_grid(const Box& slow_box, int per_axis, double tol) const {
  const auto& b = slow_box.bounds();
  if (b.empty()) return;
  const std::size_t dim = b.size();
  for (const auto& [lo, hi] : b) {
    if (!std::isfinite(lo) || !std::isfinite(hi)) return;
  }
  std::vector<int> idx(dim, 0);
  std::vector<double> w(dim);
  while (true) {
    for (std::size_t i = 0; i < dim; ++i) {
      const double f = per_axis > 1 ? double(idx[i]) / (per_axis - 1) : 0.5;
      w[i] = b[i].first + f * (b[i].second - b[i].first);
    }
    const double det = (*this)(w).det();
    if (!(std::abs(det - 1.0) <= tol)) {
      std::ostringstream os;
      os << "det A = " << det << " at a grid point of the slow domain (expected 1)";
      throw DegenerateFamily(os.str());
    }
    std::size_t i = 0;
    while (i < dim && ++idx[i] == per_axis) idx[i++] = 0;
    if (i == dim) break;
  }
}

QuadraticSystem::QuadraticSystem(std::string name, int k, ScalarField h, ScalarField omega,
                                 Sl2Field a, Box slow_box)
    : k_(k), h_(std::move(h)), omega_(std::move(omega)), a_(std::move(a)) {
  if (k < 1) throw InvalidParameter("quadratic family needs k >= 1");
  a_.check_on_grid(slow_box);
  system_.name = std::move(name);
  system_.dims = Dims{1, k};
  const ScalarField hh = h_, ww = omega_;
  const Sl2Field aa = a_;
  system_.hamiltonian = ScalarField::lift([hh, ww, aa](auto m) {
    const auto w = m.subspan(2);
    return hh(w) + ww(w) * quad_form(aa.at(w), m[0], m[1]);
  });
  system_.frequency = ScalarField::lift([ww](auto m) { return ww(m.subspan(2)); });
  system_.momentum = ScalarField::lift([aa](auto m) { return quad_form(aa.at(m.subspan(2)), m[0], m[1]); });
  system_.fast_flow = FlowMap::lift([aa](double t, auto m, auto out) {
    const auto w = m.subspan(2);
    const auto A = aa.at(w);
    const double c = std::cos(t), s = std::sin(t);
    const auto y = m[0];
    const auto x = m[1];
    out[0] = c * y + s * (A.a00 * y + A.a01 * x);
    out[1] = c * x + s * (A.a10 * y + A.a11 * x);
    for (std::size_t i = 2; i < m.size(); ++i) out[i] = m[i];
  });
  Box full = Box::unbounded(system_.dims.total());
  if (!slow_box.bounds().empty()) {
    if (int(slow_box.size()) != 2 * k) throw InvalidParameter("slow domain box must have 2k intervals");
    auto bounds = full.bounds();
    std::copy(slow_box.bounds().begin(), slow_box.bounds().end(), bounds.begin() + 2);
    full = Box(bounds);
  }
  system_.domain = full;
}

namespace {

Mat2 entry_gradient(const Sl2Field& a, std::span<const double> w, int coord) {
  const int n = int(w.size());
  const auto ga = partial_gradient(a.a(), w, 0, n);
  const auto gb = partial_gradient(a.b(), w, 0, n);
  const auto gc = partial_gradient(a.c(), w, 0, n);
  const auto c = std::size_t(coord);
  return {ga[c], gb[c], gc[c], -ga[c]};
}

}  // namespace

Mat2 QuadraticSystem::dA_dp(std::span<const double> w, int i) const { return entry_gradient(a_, w, i); }

Mat2 QuadraticSystem::dA_dq(std::span<const double> w, int i) const {
  return entry_gradient(a_, w, k_ + i);
}

Mat2 QuadraticSystem::slow_bracket_matrix(const ScalarField& f, std::span<const double> w) const {
  const auto gf = partial_gradient(f, w, 0, 2 * k_);
  Mat2 out{};
  for (int i = 0; i < k_; ++i) {
    out = out + (gf[std::size_t(i)] * dA_dq(w, i)) - (gf[std::size_t(k_ + i)] * dA_dp(w, i));
  }
  return out;
}

double QuadraticSystem::Qhat(std::span<const double> w, std::span<const double> z) const {
  const Mat2 A = a_(w);
  double s = 0.0;
  for (int i = 0; i < k_; ++i) {
    const Mat2 dp = dA_dp(w, i), dq = dA_dq(w, i);
    s += Q(A * dp, z) * Q(dq, z) - Q(A * dq, z) * Q(dp, z);
  }
  return s;
}

void QuadraticSystem::require_nondegenerate(std::span<const double> w) const {
  const double det = a_(w).det();
  if (!(std::abs(det - 1.0) <= 1e-8)) {
    std::ostringstream os;
    os << "det A = " << det << " at the slow point (expected 1)";
    throw DegenerateFamily(os.str());
  }
}

double QuadraticSystem::F1_closed(const PhasePoint& m, ClosedFormReading reading) const {
  system_.require_in_domain(m.coords());
  const auto w = m.slow();
  const auto z = m.fast();
  require_nondegenerate(w);
  const Mat2 A = a_(w);
  const Mat2 B = slow_bracket_matrix(h_, w);
  const Mat2 C = slow_bracket_matrix(omega_, w);
  const double om = omega_(w);
  const double base = -(Q(commutator(A, B), z) + Q(A, z) * Q(commutator(A, C), z)) / (4.0 * om);
  const double qh = Qhat(w, z);
  return reading == ClosedFormReading::derived ? base - 0.25 * qh : base + 0.25 * om * qh;
}

Mat2 QuadraticSystem::m_matrix(std::span<const double> w, std::span<const double> z) const {
  const Mat2 A = a_(w);
  const Mat2 B = slow_bracket_matrix(h_, w);
  const Mat2 C = slow_bracket_matrix(omega_, w);
  const double om = omega_(w);
  return (1.0 / (4.0 * om)) * (commutator(A, B) + Q(A, z) * commutator(A, C));
}

double QuadraticSystem::F2_closed(const PhasePoint& m) const {
  system_.require_in_domain(m.coords());
  const auto w = m.slow();
  const auto z = m.fast();
  require_nondegenerate(w);
  const auto gh = partial_gradient(h_, w, 0, 2 * k_);
  // Slow derivatives of M at fixed z, central differences.
  std::vector<double> probe(w.begin(), w.end());
  auto dM = [&](int c) {
    const double x = probe[std::size_t(c)];
    const double step = 1e-4 * std::max(1.0, std::abs(x));
    probe[std::size_t(c)] = x + step;
    const Mat2 mp = m_matrix(probe, z);
    probe[std::size_t(c)] = x - step;
    const Mat2 mm = m_matrix(probe, z);
    probe[std::size_t(c)] = x;
    return (1.0 / (2.0 * step)) * (mp - mm);
  };
  Mat2 hM{};
  for (int i = 0; i < k_; ++i) {
    hM = hM + (gh[std::size_t(i)] * dM(k_ + i)) - (gh[std::size_t(k_ + i)] * dM(i));
  }
  return Q(commutator(a_(w), hM), z) / (2.0 * omega_(w));
}

}  // namespace slowfast
