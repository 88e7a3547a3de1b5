#pragma once

#include <functional>
#include <span>
#include <vector>

namespace slowfast {

/// Right-hand side dy/dt = f(t, y) written into dydt.
using VectorField = std::function<void(double, std::span<const double>, std::span<double>)>;

/// Receives each requested sample (t, y) in order.
using SampleSink = std::function<void(double, std::span<const double>)>;

enum class IntegratorMethod { rk4_fixed, dopri5 };

struct IntegratorConfig {
  IntegratorMethod method = IntegratorMethod::dopri5;
  /// Step for rk4_fixed.
  double dt = 1e-2;
  double rtol = 1e-10;
  double atol = 1e-12;
  long max_steps = 50'000'000;
  /// Initial step for dopri5; zero picks one automatically.
  double h_init = 0.0;

  void validate() const;
};

struct IntegrationStats {
  long accepted = 0;
  long rejected = 0;
  long evaluations = 0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  IntegrationStats stats;
};

/// One classical four-stage Runge-Kutta step.
std::vector<double> step_rk4(const VectorField& f, double t, std::span<const double> y, double dt);

/// Integrates from t0 through the monotone sequence `sample_times` (all on
/// the same side of t0) and hands every sample to `sink`. Adaptive runs hit
/// sample times by dense interpolation, so the output grid never depends on
/// the step history.
///
/// Throws MaxStepsExceeded or StepSizeUnderflow; samples delivered before the
/// failure remain valid.
IntegrationStats integrate(const VectorField& f, std::span<const double> y0, double t0,
                           std::span<const double> sample_times, const IntegratorConfig& config,
                           const SampleSink& sink);

/// Convenience wrapper: `samples` equal intervals on [0, t_end], endpoints
/// included (samples + 1 states).
Trajectory integrate(const VectorField& f, std::span<const double> y0, double t_end,
                     const IntegratorConfig& config, int samples);

/// End state only.
std::vector<double> integrate_to(const VectorField& f, std::span<const double> y0, double t0,
                                 double t_end, const IntegratorConfig& config);

using Stepper =
    std::function<std::vector<double>(const VectorField&, double, std::span<const double>, double)>;

struct ConvergenceResult {
  double order = 0.0;
  /// True when every error vanished (e.g. a zero field) and no slope exists.
  bool degenerate = false;
  std::vector<double> errors;
};

/// Fixed-step convergence study: end-state error for each dt against a
/// reference run at min(dt)/16, then the log-log slope.
ConvergenceResult convergence_order(const VectorField& f, std::span<const double> y0,
                                    double t_end, std::span<const double> dt_list,
                                    const Stepper& stepper = step_rk4);

}  // namespace slowfast
