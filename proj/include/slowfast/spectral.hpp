#pragma once

#include <span>
#include <vector>

namespace slowfast {

/// Real trigonometric interpolant of N equispaced samples on [0, 2pi):
///   f(t) ~ a_0 + sum_{n=1}^{N/2-1} (a_n cos nt + b_n sin nt).
///
/// The Nyquist mode is dropped; for orbit profiles that are trigonometric
/// polynomials of degree < N/2 the representation is exact.
///
/// The integrating operator acts diagonally on this basis: the zero-mean
/// antiderivative of cos nt is sin(nt)/n and of sin nt is -cos(nt)/n, which is
/// the same as (1/2pi) int_0^{2pi} (t - pi) f(t + s) dt evaluated at shift s.
class TrigSeries {
 public:
  /// N must be even and >= 4.
  static TrigSeries from_samples(std::span<const double> samples);

  double mean() const { return a_[0]; }
  int degree() const { return int(a_.size()) - 1; }
  /// Interpolant value at angle s.
  double operator()(double s) const;
  /// Value at s of the zero-mean solution u of u' = f - mean(f).
  double integrated(double s) const;
  /// Same as integrated(s) at every node of an equispaced grid of size n.
  std::vector<double> integrated_on_grid(int n) const;
  const std::vector<double>& cos_coeffs() const { return a_; }
  const std::vector<double>& sin_coeffs() const { return b_; }

 private:
  std::vector<double> a_;
  std::vector<double> b_;
};

double sample_mean(std::span<const double> samples);

/// Integrating operator at the base point, sum_j w_j f_j, with weights
/// w_j = -(2/N) sum_{n=1}^{N/2-1} sin(n t_j) / n.
double integrate_samples(std::span<const double> samples);

/// Cached weights of integrate_samples for a grid of size n.
const std::vector<double>& integrating_weights(int n);

/// Validates a node count: even, >= 4.
void require_node_count(int n);

}  // namespace slowfast
