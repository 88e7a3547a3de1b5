#pragma once

#include <span>
#include <string>
#include <vector>

#include "slowfast/circle_action.hpp"
#include "slowfast/phase.hpp"

namespace slowfast {

/// Second-order correction formula.
///
/// ai3: F2 = -(2/omega) S({H, F1}_1), the theorem's closed expression with
///      the 1/omega factor applied to both inner terms (equal to -F1 inside
///      the bracket).
/// ty3: F2 = (1/omega) S({H, F1}_1), the "particular solution" form.
enum class F2Variant { ai3, ty3 };

std::string to_string(F2Variant v);
F2Variant parse_f2_variant(const std::string& s);

struct QuadratureConfig {
  /// Nodes on the orbit of the evaluation point.
  int outer = 64;
  /// Nodes used for the connection form Theta = S(d_1 J) inside F1.
  int inner = 32;
};

struct CorrectionOptions {
  QuadratureConfig quad;
  /// Relative central-difference step for slow gradients of F1.
  double fd_rel_step = 1e-5;
  /// Checked entry points (F1, F2, evaluate) raise HypothesisViolation when
  /// the periodicity check fails at the point.
  bool strict = true;
  double periodicity_tol = 1e-8;
  DiffEngine diff;
};

struct HypothesisTolerances {
  double periodicity = 1e-8;
  double momentum_map = 1e-8;
  double adiabatic = 1e-8;
  double period_energy = 1e-8;
};

struct HypothesisItem {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct HypothesisReport {
  std::vector<HypothesisItem> items;  // periodicity, momentum_map, adiabatic, period_energy
  bool all_pass() const;
  const HypothesisItem& item(const std::string& name) const;
};

/// || d_0 J - d_0 H / omega || over the 2r fast components.
double check_momentum_map(const CircleAction& action, const PhasePoint& m,
                          const DiffEngine& diff = {});
/// || <d_1 J> (m) ||.
double check_adiabatic(const CircleAction& action, const PhasePoint& m, const DiffEngine& diff = {});
/// max_{i<j} |(d_0 H)_i (d_0 omega)_j - (d_0 H)_j (d_0 omega)_i|.
double check_period_energy(const SlowFastSystem& system, const PhasePoint& m,
                           const DiffEngine& diff = {});

/// All four checks at m. With strict = true a failing item raises
/// HypothesisViolation naming it.
HypothesisReport check_hypotheses(const CircleAction& action, const PhasePoint& m,
                                  const HypothesisTolerances& tol = {}, bool strict = false);

/// Momentum map from the primitive y dx of the fast symplectic form:
/// J = (1/omega) <(Fl^t)^* (y dx)>(X_H^(0)).
double momentum_from_action(const CircleAction& action, const PhasePoint& m);

/// Theta = S(d_1 J) at m (2k slow components).
std::vector<double> connection_form(const CircleAction& action, const PhasePoint& m,
                                    const CorrectionOptions& opt = {});

/// K1 = 1/2 sum_i (Theta_{p_i} dH/dq_i - Theta_{q_i} dH/dp_i).
double K1(const CircleAction& action, const PhasePoint& m, const CorrectionOptions& opt = {});

/// F1 = -(1/omega) (S({H,J}_1) + <K1>).
double F1(const CircleAction& action, const PhasePoint& m, const CorrectionOptions& opt = {});

struct F2Result {
  double value = 0.0;
  /// <{H, F1}_1>; zero when the second-order homological equation is solvable.
  double solvability_residual = 0.0;
  /// |F2(h) - F2(2h)| over the finite-difference step; filled when requested.
  double fd_error_estimate = 0.0;
  bool precision_warning = false;
};

double F2(const CircleAction& action, const PhasePoint& m, F2Variant variant = F2Variant::ai3,
          const CorrectionOptions& opt = {});
/// F2 with diagnostics; estimate_error doubles the cost.
F2Result F2_detailed(const CircleAction& action, const PhasePoint& m, F2Variant variant,
                     const CorrectionOptions& opt = {}, bool estimate_error = false);

/// Unchecked raw-coordinate forms used inside quadrature loops.
double F1_at(const CircleAction& action, std::span<const double> m, const CorrectionOptions& opt);
double F2_at(const CircleAction& action, std::span<const double> m, F2Variant variant,
             const CorrectionOptions& opt);
/// {H, F1}_1 at m, slow gradient of F1 by central differences.
double bracket_H_F1_at(const CircleAction& action, std::span<const double> m,
                       const CorrectionOptions& opt);

/// L_Upsilon u at m by a fourth-order central difference along the flow.
double lie_along_generator(const CircleAction& action, const Observable& u,
                           std::span<const double> m, double step = 1e-2);

/// Residual of the first-order homological equation:
/// L_Upsilon F1 + (1/omega) {H, J}_1.
double first_order_residual(const CircleAction& action, const PhasePoint& m,
                            const CorrectionOptions& opt = {});
/// Residual of the second-order homological equation for F = J + eps F1 + eps^2/2 F2:
/// L_Upsilon F2 + (2/omega) {H, F1}_1.
double second_order_residual(const CircleAction& action, const PhasePoint& m, F2Variant variant,
                             const CorrectionOptions& opt = {});

struct SeriesTerms {
  double J = 0.0;
  double F1 = 0.0;
  double F2 = 0.0;
};

/// F = J + eps F1 + eps^2/2 F2, truncated at `order` (0, 1 or 2).
class InvariantSeries {
 public:
  InvariantSeries(const CircleAction& action, int order, F2Variant variant = F2Variant::ai3,
                  CorrectionOptions opt = {});

  int order() const { return order_; }
  F2Variant variant() const { return variant_; }
  const CorrectionOptions& options() const { return opt_; }
  const CircleAction& action() const { return *action_; }

  /// Terms up to the series order; higher terms are left at zero.
  SeriesTerms terms_at(std::span<const double> m) const;
  double evaluate_at(std::span<const double> m, double eps) const;
  double evaluate(const PhasePoint& m, double eps) const;
  static double combine(const SeriesTerms& t, double eps, int order);

 private:
  const CircleAction* action_;
  int order_;
  F2Variant variant_;
  CorrectionOptions opt_;
};

/// Throws UnsupportedOrder for orders outside {0, 1, 2}.
InvariantSeries assemble(const CircleAction& action, int order, F2Variant variant = F2Variant::ai3,
                         CorrectionOptions opt = {});

/// L_{X_H} F = grad F . (X_H^(0) + eps X_H^(1)) at m.
double lie_derivative(const SlowFastSystem& system, const ScalarField& F, const PhasePoint& m,
                      double eps, const DiffEngine& diff = {});

}  // namespace slowfast
