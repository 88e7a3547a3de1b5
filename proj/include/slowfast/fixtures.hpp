#pragma once

#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "slowfast/phase.hpp"

namespace slowfast {

using ParamMap = std::map<std::string, double>;

/// A built-in system with its known closed forms.
///
/// Coordinates are stored in the library layout (y, x, p, q). Each fixture
/// also has a natural order for user-facing points; `natural_labels` names
/// it and from_natural_order / to_natural_order convert.
struct Fixture {
  std::string name;
  ParamMap params;
  SlowFastSystem system;
  /// Closed-form first- and second-order corrections, when known. Empty otherwise.
  ScalarField F1_closed;
  ScalarField F2_closed;
  std::vector<double> eps_grid;
  /// Default initial point m0, library layout.
  std::vector<double> default_point;
  std::vector<std::string> natural_labels;
  /// natural_index[i] = library index of the i-th coordinate in natural order.
  std::vector<int> natural_index;

  bool has_F1_closed() const { return static_cast<bool>(F1_closed); }
  bool has_F2_closed() const { return static_cast<bool>(F2_closed); }
  std::vector<double> from_natural_order(std::span<const double> v) const;
  std::vector<double> to_natural_order(std::span<const double> v) const;
  PhasePoint point(std::span<const double> library_coords) const {
    return PhasePoint(system.dims, std::vector<double>(library_coords.begin(), library_coords.end()));
  }
  /// Uniform random point inside the domain box (all box bounds finite).
  template <class Rng>
  std::vector<double> random_point(Rng& rng) const;
};

/// Elastic pendulum H = ½(p²+q²) + ½(y² + Ω²x² + γq²x).
/// Natural order (p, q, y, x). Default box: every coordinate in [-2, 2].
Fixture elastic_pendulum(double Omega = 1.0, double gamma = 0.1);

/// Charged particle in the force-free plasmoid field,
/// H = ½[p₂² + p₃²(B²q₂² + λ²/q₂²) + 2λp₂p₃/q₂ + q₃²/q₂²].
/// Fast pair (y, x) = (p₃, q₃), slow pair (p, q) = (p₂, q₂); natural order
/// (p₂, q₂, p₃, q₃). Default box: q₂ in [0.5, 2], |p₂|, |p₃|, |q₃| <= 1.
Fixture charged_particle(double B = 1.0, double lambda = 0.3);

/// H = h + Q_A with h = ½p², A(p) = [[0, e^p], [-e^{-p}, 0]], omega = 1.
/// Every slow bracket with A vanishes, so F1 = F2 = 0.
Fixture quadratic_benchmark();

/// |J - v⊥²/(2|B|)|, with v⊥² = 2(H(m) - H(c)), c the guiding centre (orbit
/// mean of the fast coordinates) and |B| = omega(m).
double verify_transverse_momentum(const Fixture& fixture, const PhasePoint& m);

std::vector<std::string> list_fixtures();
/// Parameters not named by the fixture raise InvalidParameter. Every
/// fixture also accepts `omega_scale` (default 1), which multiplies the
/// declared frequency and exists to exercise hypothesis failures.
Fixture get_fixture(const std::string& name, const ParamMap& params = {});

template <class Rng>
std::vector<double> Fixture::random_point(Rng& rng) const {
  std::vector<double> out;
  for (const auto& [lo, hi] : system.domain.bounds()) {
    std::uniform_real_distribution<double> u(lo, hi);
    out.push_back(u(rng));
  }
  return out;
}

}  // namespace slowfast
