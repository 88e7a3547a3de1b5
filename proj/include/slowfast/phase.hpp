#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "slowfast/dual.hpp"

namespace slowfast {

/// Degree counts: r fast pairs (y, x) and k slow pairs (p, q).
///
/// Every coordinate vector in the library uses the block layout
///   [ y_1..y_r | x_1..x_r | p_1..p_k | q_1..q_k ]
/// with the offsets below.
struct Dims {
  int r = 1;
  int k = 1;

  int fast() const { return 2 * r; }
  int slow() const { return 2 * k; }
  int total() const { return 2 * r + 2 * k; }
  int y(int i) const { return i; }
  int x(int i) const { return r + i; }
  int p(int i) const { return 2 * r + i; }
  int q(int i) const { return 2 * r + k + i; }
  int slow_begin() const { return 2 * r; }

  friend bool operator==(const Dims&, const Dims&) = default;
};

class PhasePoint {
 public:
  PhasePoint(Dims dims, std::vector<double> coords);
  PhasePoint(Dims dims, std::span<const double> fast, std::span<const double> slow);

  const Dims& dims() const { return dims_; }
  std::span<const double> coords() const { return coords_; }
  std::span<const double> fast() const { return {coords_.data(), std::size_t(dims_.fast())}; }
  std::span<const double> slow() const {
    return {coords_.data() + dims_.fast(), std::size_t(dims_.slow())};
  }
  double operator[](std::size_t i) const { return coords_[i]; }
  const std::vector<double>& vec() const { return coords_; }

 private:
  Dims dims_;
  std::vector<double> coords_;
};

/// Axis-aligned validity box, one closed interval per coordinate.
class Box {
 public:
  Box() = default;
  explicit Box(std::vector<std::pair<double, double>> bounds) : bounds_(std::move(bounds)) {}

  static Box unbounded(int dim);

  bool contains(std::span<const double> m) const;
  const std::vector<std::pair<double, double>>& bounds() const { return bounds_; }
  std::size_t size() const { return bounds_.size(); }

 private:
  std::vector<std::pair<double, double>> bounds_;
};

/// Scalar oracle on phase space with an optional dual-number lift.
///
/// Built from a generic callable `f(std::span<const T>) -> T` via lift(), so
/// one expression serves plain, dual and second-order dual evaluation.
/// Fields built with plain() have no lift and differentiate by finite
/// differences.
class ScalarField {
 public:
  using PlainFn = std::function<double(std::span<const double>)>;
  using DualFn = std::function<dual(std::span<const dual>)>;
  using Dual2Fn = std::function<dual2(std::span<const dual2>)>;

  ScalarField() = default;

  template <class F>
  static ScalarField lift(F f) {
    ScalarField s;
    s.plain_ = [f](std::span<const double> m) { return f(m); };
    s.dual_ = [f](std::span<const dual> m) { return f(m); };
    s.dual2_ = [f](std::span<const dual2> m) { return f(m); };
    return s;
  }

  static ScalarField plain(PlainFn fn) {
    ScalarField s;
    s.plain_ = std::move(fn);
    return s;
  }

  double operator()(std::span<const double> m) const { return plain_(m); }
  dual operator()(std::span<const dual> m) const { return dual_(m); }
  dual2 operator()(std::span<const dual2> m) const { return dual2_(m); }

  bool has_dual() const { return static_cast<bool>(dual_); }
  bool has_dual2() const { return static_cast<bool>(dual2_); }
  explicit operator bool() const { return static_cast<bool>(plain_); }

 private:
  PlainFn plain_;
  DualFn dual_;
  Dual2Fn dual2_;
};

/// Flow oracle (t, m) -> Fl^t(m); the dual lift lets directional
/// derivatives of the flow map be taken exactly.
class FlowMap {
 public:
  using PlainFn = std::function<void(double, std::span<const double>, std::span<double>)>;
  using DualFn = std::function<void(double, std::span<const dual>, std::span<dual>)>;

  FlowMap() = default;

  template <class F>
  static FlowMap lift(F f) {
    FlowMap fm;
    fm.plain_ = [f](double t, std::span<const double> m, std::span<double> out) { f(t, m, out); };
    fm.dual_ = [f](double t, std::span<const dual> m, std::span<dual> out) { f(t, m, out); };
    return fm;
  }

  void operator()(double t, std::span<const double> m, std::span<double> out) const {
    plain_(t, m, out);
  }
  void operator()(double t, std::span<const dual> m, std::span<dual> out) const {
    dual_(t, m, out);
  }
  bool has_dual() const { return static_cast<bool>(dual_); }

 private:
  PlainFn plain_;
  DualFn dual_;
};

/// A slow-fast Hamiltonian system on R^{2r} x R^{2k} with canonical brackets.
///
/// `fast_flow`, when present, is the 2pi-periodic flow of X_H^(0)/omega.
/// The perturbation parameter is never stored here; dynamics take it as an
/// argument so one instance serves an entire epsilon sweep.
struct SlowFastSystem {
  std::string name;
  Dims dims;
  ScalarField hamiltonian;
  ScalarField frequency;
  ScalarField momentum;
  std::optional<FlowMap> fast_flow;
  Box domain;

  bool in_domain(std::span<const double> m) const { return domain.contains(m); }
  /// Throws DomainError unless m has the right length, finite entries and
  /// lies inside the domain box.
  void require_in_domain(std::span<const double> m) const;
};

enum class DiffMode { forward_dual, central_difference };

struct DiffEngine {
  DiffMode mode = DiffMode::forward_dual;
  /// Relative step for central differences; the absolute step is
  /// fd_step * max(1, |coordinate|). Zero selects eps^(1/3).
  double fd_step = 0.0;

  static DiffEngine dual_mode() { return {}; }
  static DiffEngine finite_difference(double step = 0.0) {
    return {DiffMode::central_difference, step};
  }
  double relative_step() const;
};

}  // namespace slowfast
