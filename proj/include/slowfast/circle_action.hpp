#pragma once

#include <functional>
#include <span>
#include <vector>

#include "slowfast/integrators.hpp"
#include "slowfast/phase.hpp"
#include "slowfast/spectral.hpp"

namespace slowfast {

enum class FlowMode { analytic, numeric };

/// Plain-valued observable evaluated on raw coordinates.
using Observable = std::function<double(std::span<const double>)>;
/// Observable with several components (e.g. the slow coefficients of a 1-form).
using VectorObservable = std::function<std::vector<double>(std::span<const double>)>;

/// Equispaced samples of an orbit of the circle action:
/// point j is Fl^{2 pi j / N}(m), stored row-major.
class OrbitSamples {
 public:
  OrbitSamples(std::vector<double> base, int nodes, std::vector<double> points);

  int nodes() const { return nodes_; }
  int dim() const { return int(base_.size()); }
  std::span<const double> base() const { return base_; }
  std::span<const double> point(int j) const {
    return {points_.data() + std::size_t(j) * base_.size(), base_.size()};
  }
  std::vector<double> values(const Observable& f) const;

 private:
  std::vector<double> base_;
  int nodes_;
  std::vector<double> points_;
};

struct PeriodicityResult {
  bool pass = false;
  double residual = 0.0;
};

/// The S^1-action generated by X_H^(0)/omega.
///
/// Averaging and the integrating operator are computed from N equispaced
/// orbit samples through their discrete Fourier coefficients, which is
/// spectrally accurate for smooth observables. Numeric mode integrates the
/// generator with the adaptive integrator; analytic mode uses the system's
/// flow oracle.
class CircleAction {
 public:
  CircleAction(const SlowFastSystem& system, FlowMode mode = FlowMode::analytic, int nodes = 64,
               double rtol = 1e-11);

  const SlowFastSystem& system() const { return *system_; }
  FlowMode mode() const { return mode_; }
  int nodes() const { return nodes_; }
  double rtol() const { return rtol_; }

  /// Fl^t_Upsilon(m); checks m against the domain.
  PhasePoint flow(double t, const PhasePoint& m) const;
  /// Unchecked flow on raw coordinates.
  std::vector<double> flow_at(double t, std::span<const double> m) const;
  /// Directional derivative d/ds Fl^t(m + s v) at s = 0. Exact in analytic
  /// mode when the flow oracle is dual-liftable, central differences otherwise.
  std::vector<double> flow_tangent(double t, std::span<const double> m,
                                   std::span<const double> v) const;

  /// The generator Upsilon = X_H^(0)/omega at m (full-length vector, slow block zero).
  std::vector<double> generator(std::span<const double> m) const;

  OrbitSamples sample(std::span<const double> m, int nodes = 0) const;

  PeriodicityResult check_periodicity(const PhasePoint& m, double tol) const;

  /// <f>(m).
  double average(const Observable& f, const PhasePoint& m) const;
  /// S(f)(m).
  double integrate(const Observable& f, const PhasePoint& m) const;
  /// Componentwise <.> of a slow-component 1-form given by its 2k coefficients.
  std::vector<double> average_slow_oneform(const VectorObservable& coeffs,
                                           const PhasePoint& m) const;
  /// Componentwise S(.) of a slow-component 1-form.
  std::vector<double> integrate_slow_oneform(const VectorObservable& coeffs,
                                             const PhasePoint& m) const;
  /// u = S(g), the zero-mean solution of L_Upsilon u = g - <g>.
  double solve_homological(const Observable& g, const PhasePoint& m) const;

  /// Unchecked operator forms on raw coordinates, with explicit node count.
  double average_at(const Observable& f, std::span<const double> m, int nodes = 0) const;
  double integrate_at(const Observable& f, std::span<const double> m, int nodes = 0) const;

 private:
  void numeric_flow(std::span<const double> m, std::span<const double> times,
                    const SampleSink& sink) const;

  const SlowFastSystem* system_;
  FlowMode mode_;
  int nodes_;
  double rtol_;
};

}  // namespace slowfast
