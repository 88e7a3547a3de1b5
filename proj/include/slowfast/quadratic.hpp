#pragma once

#include <span>
#include <string>
#include <vector>

#include "slowfast/phase.hpp"

namespace slowfast {

/// 2x2 matrix, row-major [[a00, a01], [a10, a11]].
template <class T>
struct Mat2T {
  T a00{}, a01{}, a10{}, a11{};

  friend Mat2T operator+(const Mat2T& x, const Mat2T& y) {
    return {x.a00 + y.a00, x.a01 + y.a01, x.a10 + y.a10, x.a11 + y.a11};
  }
  friend Mat2T operator-(const Mat2T& x, const Mat2T& y) {
    return {x.a00 - y.a00, x.a01 - y.a01, x.a10 - y.a10, x.a11 - y.a11};
  }
  friend Mat2T operator*(const Mat2T& x, const Mat2T& y) {
    return {x.a00 * y.a00 + x.a01 * y.a10, x.a00 * y.a01 + x.a01 * y.a11,
            x.a10 * y.a00 + x.a11 * y.a10, x.a10 * y.a01 + x.a11 * y.a11};
  }
  friend Mat2T operator*(const T& s, const Mat2T& x) {
    return {s * x.a00, s * x.a01, s * x.a10, s * x.a11};
  }
  T det() const { return a00 * a11 - a01 * a10; }
  T trace() const { return a00 + a11; }
};

using Mat2 = Mat2T<double>;

template <class T>
Mat2T<T> commutator(const Mat2T<T>& x, const Mat2T<T>& y) {
  return x * y - y * x;
}

/// Q_S(z) = -1/2 J S z . z, J = [[0,-1],[1,0]], z = (y, x).
template <class T, class Z>
auto quad_form(const Mat2T<T>& s, const Z& y, const Z& x) {
  // J S z = (-(s10 y + s11 x), s00 y + s01 x)
  return -0.5 * (y * (-(s.a10 * y + s.a11 * x)) + x * (s.a00 * y + s.a01 * x));
}

double Q(const Mat2& s, std::span<const double> z);

/// ½(S - A S A); <Q_S> = Q of this matrix.
Mat2 avg_Q(const Mat2& a, const Mat2& s);
/// ¼[A, S]; S(Q_S) = Q of this matrix.
Mat2 S_Q(const Mat2& a, const Mat2& s);
/// (cos t I + sin t A) z.
std::vector<double> linear_flow(const Mat2& a, double t, std::span<const double> z);

/// Traceless matrix field A(w) = [[a, b], [c, -a]] over slow points w.
/// Entry oracles are ScalarFields on the 2k slow coordinates.
class Sl2Field {
 public:
  Sl2Field() = default;
  Sl2Field(ScalarField a, ScalarField b, ScalarField c)
      : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {}

  /// Builds the field from one generic callable returning {a, b, c}.
  template <class F>
  static Sl2Field lift(F f) {
    return Sl2Field(ScalarField::lift([f](auto w) { return f(w)[0]; }),
                    ScalarField::lift([f](auto w) { return f(w)[1]; }),
                    ScalarField::lift([f](auto w) { return f(w)[2]; }));
  }

  template <class T>
  Mat2T<T> at(std::span<const T> w) const {
    const T a = a_(w);
    return {a, b_(w), c_(w), -a};
  }
  Mat2 operator()(std::span<const double> w) const { return at<double>(w); }

  const ScalarField& a() const { return a_; }
  const ScalarField& b() const { return b_; }
  const ScalarField& c() const { return c_; }

  /// Throws DegenerateFamily if |det A - 1| > tol on a grid of `per_axis`
  /// points per slow coordinate inside `slow_box`.
  void check_on_grid(const Box& slow_box, int per_axis = 5, double tol = 1e-10) const;

 private:
  ScalarField a_, b_, c_;
};

/// Reading of the closed-form F1.
///
/// derived: -(1/4w)(Q_[A,B] + Q_A Q_[A,C]) - 1/4 Qhat(A), agrees with the
///          quadrature engine.
/// as_printed: same first part with +w/4 Qhat(A).
enum class ClosedFormReading { derived, as_printed };

/// H = h + omega Q_A with r = 1 and k slow pairs.
class QuadraticSystem {
 public:
  QuadraticSystem(std::string name, int k, ScalarField h, ScalarField omega, Sl2Field a,
                  Box slow_box = {});

  const SlowFastSystem& system() const { return system_; }
  int k() const { return k_; }
  const ScalarField& h() const { return h_; }
  const ScalarField& omega() const { return omega_; }
  const Sl2Field& A() const { return a_; }

  /// Entrywise {f, A}_1 at w for a slow scalar f.
  Mat2 slow_bracket_matrix(const ScalarField& f, std::span<const double> w) const;
  /// dA/dp_i and dA/dq_i at w.
  Mat2 dA_dp(std::span<const double> w, int i) const;
  Mat2 dA_dq(std::span<const double> w, int i) const;

  /// sum_i (Q_{A dA/dp_i} Q_{dA/dq_i} - Q_{A dA/dq_i} Q_{dA/dp_i}) at (w, z).
  double Qhat(std::span<const double> w, std::span<const double> z) const;

  double F1_closed(const PhasePoint& m, ClosedFormReading reading = ClosedFormReading::derived) const;
  /// (1/2w) Q_[A, {h, M}_1] with M = (1/4w)([A,B] + Q_A [A,C]); scalar
  /// multiples of I inside a Q subscript contribute nothing, so the Qhat
  /// part of the printed M drops out.
  double F2_closed(const PhasePoint& m) const;

  /// Throws DegenerateFamily when |det A(w) - 1| > 1e-8.
  void require_nondegenerate(std::span<const double> w) const;

 private:
  Mat2 m_matrix(std::span<const double> w, std::span<const double> z) const;

  int k_;
  ScalarField h_, omega_;
  Sl2Field a_;
  SlowFastSystem system_;
};

}  // namespace slowfast
