#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "slowfast/fixtures.hpp"
#include "slowfast/integrators.hpp"
#include "slowfast/invariants.hpp"

namespace slowfast {

struct DriftConfig {
  std::string fixture = "elastic_pendulum";
  ParamMap params;
  /// Initial point in library layout; empty selects the fixture default.
  std::vector<double> m0;
  std::vector<double> eps_grid = {0.2, 0.1, 0.05, 0.025, 0.0125};
  /// Horizon constant c, T = c / eps.
  double horizon = 1.0;
  int samples = 512;
  IntegratorConfig integrator = default_integrator();
  std::vector<int> orders = {0, 1, 2};
  F2Variant variant = F2Variant::ai3;
  CorrectionOptions corrections;
  /// Extra points used by compare_variants besides m0.
  int variant_points = 8;
  std::uint64_t seed = 20240601;
  int workers = 1;

  static IntegratorConfig default_integrator();
  void validate() const;
};

/// One trajectory of X_H at a single eps with the series terms on every sample.
struct DriftTrace {
  double eps = 0.0;
  double horizon = 0.0;
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::vector<SeriesTerms> terms;
  std::vector<double> energy;
};

struct DriftRow {
  double eps = 0.0;
  int order = 0;
  double drift = 0.0;
  double horizon = 0.0;
  int samples = 0;
  /// max |H(x(t)) - H(x0)| along the same trajectory.
  double energy_drift = 0.0;
  /// False when the energy drift is at least 10% of the invariant drift.
  bool valid = true;
};

struct SlopeFit {
  int order = 0;
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
  std::vector<double> residuals;
  int points = 0;
  bool excluded_largest = false;
};

struct DriftReport {
  DriftConfig config;
  std::vector<DriftRow> rows;  // eps descending, order ascending
  std::vector<SlopeFit> fits;
  const DriftRow& row(double eps, int order) const;
  const SlopeFit& fit(int order) const;
};

/// Max over samples of |F_k(x(t)) - F_k(x0)| for each order k.
DriftRow measure_drift(const DriftConfig& config, double eps, int order);

/// Integrates X_H at eps from m0 and evaluates the series terms up to
/// max_order at every sample.
DriftTrace trace_drift(const DriftConfig& config, const Fixture& fixture, double eps, int max_order);

/// Least-squares slope per order over the eps grid. With five or more points
/// the largest eps is dropped when its residual against the line through the
/// other points exceeds 3x their largest residual (and 0.02 in log units).
SlopeFit fit_order(const std::vector<double>& eps, const std::vector<double>& drift, int order);

DriftReport order_sweep(const DriftConfig& config);

struct ContractCheck {
  bool met = true;
  std::vector<std::string> failures;
};
/// s0 in [0.7, 1.3], s1 in [1.7, 2.3], s2 >= 1.7; drift_2 < drift_1 < drift_0
/// at the three smallest eps; every row valid.
ContractCheck slope_contract(const DriftReport& report);

struct VariantSummary {
  F2Variant variant = F2Variant::ai3;
  /// max |F2 - F2_closed| over the probe points; absent without a closed form.
  std::optional<double> closed_form_error;
  /// max |L_Upsilon F2 + (2/omega){H,F1}_1| over the probe points.
  double homological_residual = 0.0;
  /// drift of the order-2 series per eps, grid order.
  std::vector<double> drift2;
  bool pass = false;
};

struct VariantComparison {
  std::vector<VariantSummary> variants;  // ai3, ty3
  std::optional<F2Variant> default_variant;
  bool indistinguishable = false;
  bool no_variant_passes = false;
  double tolerance = 1e-4;
  const VariantSummary& get(F2Variant v) const;
};

VariantComparison compare_variants(const DriftConfig& config, bool with_drift = true);

enum class OutputFormat { csv, json, both };
OutputFormat parse_output_format(const std::string& s);

std::string drift_csv(const DriftReport& report);
/// `config_ini` is embedded verbatim so the report can be re-run.
std::string drift_json(const DriftReport& report, const VariantComparison* variants,
                       const std::string& config_ini);
/// Writes <dir>/<stem>.csv and/or <dir>/<stem>.json; returns the written paths.
std::vector<std::string> emit(const DriftReport& report, const VariantComparison* variants,
                              const std::string& config_ini, OutputFormat format,
                              const std::string& dir, const std::string& stem = "drift");

/// Shortest round-trip decimal, locale independent.
std::string format_double(double v);

/// Runs fn(i) for i in [0, n) on up to `workers` threads. The exception of
/// the lowest failing index is rethrown.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

}  // namespace slowfast
