#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "slowfast/experiments.hpp"
#include "slowfast/fixtures.hpp"

namespace slowfast {

/// Run configuration, read from an INI file with the sections
/// [fixture], [integrator], [quadrature], [experiment] and [output].
///
///   [fixture]     name, point (natural order, comma separated), and the
///                 fixture parameters (Omega, gamma, B, lambda, omega_scale)
///   [integrator]  method (dopri5 | rk4), dt, rtol, atol, max_steps
///   [quadrature]  outer, inner, fd_step
///   [experiment]  eps, eps_grid, horizon, t_end, samples, orders, order,
///                 variant (ai3 | ty3 | auto), strict, seed, variant_points
///   [output]      dir, format (csv | json | both)
///
/// Unknown sections or keys raise ConfigError.
struct RunConfig {
  std::string fixture = "elastic_pendulum";
  ParamMap params;
  std::vector<double> point;

  std::string method = "dopri5";
  double dt = 1e-2;
  double rtol = 1e-11;
  double atol = 1e-13;
  long max_steps = 50'000'000;

  int outer = 64;
  int inner = 32;
  double fd_step = 1e-5;

  double eps = 0.1;
  std::vector<double> eps_grid = {0.2, 0.1, 0.05, 0.025, 0.0125};
  double horizon = 1.0;
  /// Simulation end time; zero means horizon / eps.
  double t_end = 0.0;
  int samples = 512;
  std::vector<int> orders = {0, 1, 2};
  int order = 2;
  std::string variant = "ai3";
  bool strict = false;
  std::uint64_t seed = 20240601;
  int variant_points = 8;

  std::string out_dir = "out";
  std::string format = "both";

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  Fixture make_fixture() const;
  /// Initial point in library layout (fixture default when `point` is empty).
  std::vector<double> library_point(const Fixture& f) const;
  IntegratorConfig integrator() const;
  CorrectionOptions corrections() const;
  DriftConfig drift_config(const Fixture& f, int workers) const;
  /// Checks value ranges and that the fixture accepts the parameters.
  void validate() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
/// with_output_dir = false leaves out [output] dir, so reports written to
/// different directories embed the same text.
std::string serialize_config(const RunConfig& c, bool with_output_dir = true);

}  // namespace slowfast
