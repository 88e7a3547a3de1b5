#include "slowfast/phase.hpp"

#include <cmath>
#include <sstream>

#include "slowfast/errors.hpp"

namespace slowfast {

namespace {

void require_finite(std::span<const double> v) {
  for (double c : v) {
    if (!std::isfinite(c)) throw DomainError("phase point has non-finite coordinate");
  }
}

}  // namespace

PhasePoint::PhasePoint(Dims dims, std::vector<double> coords)
    : dims_(dims), coords_(std::move(coords)) {
  if (dims_.r < 1 || dims_.k < 1) throw InvalidParameter("degree counts must be positive");
  if (int(coords_.size()) != dims_.total()) {
    std::ostringstream os;
    os << "phase point length " << coords_.size() << " does not match 2r+2k = " << dims_.total();
    throw DomainError(os.str());
  }
  require_finite(coords_);
}

PhasePoint::PhasePoint(Dims dims, std::span<const double> fast, std::span<const double> slow)
    : dims_(dims) {
  if (int(fast.size()) != dims.fast() || int(slow.size()) != dims.slow())
    throw DomainError("fast/slow block lengths do not match (r, k)");
  coords_.assign(fast.begin(), fast.end());
  coords_.insert(coords_.end(), slow.begin(), slow.end());
  require_finite(coords_);
}

Box Box::unbounded(int dim) {
  const double inf = std::numeric_limits<double>::infinity();
  return Box(std::vector<std::pair<double, double>>(std::size_t(dim), {-inf, inf}));
}

bool Box::contains(std::span<const double> m) const {
  if (bounds_.empty()) return true;
  if (m.size() != bounds_.size()) return false;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!(m[i] >= bounds_[i].first && m[i] <= bounds_[i].second)) return false;
  }
  return true;
}

void SlowFastSystem::require_in_domain(std::span<const double> m) const {
  if (int(m.size()) != dims.total()) throw DomainError("point dimension mismatch for " + name);
  require_finite(m);
  if (!domain.contains(m)) {
    std::ostringstream os;
    os << "point (";
    for (std::size_t i = 0; i < m.size(); ++i) os << (i ? ", " : "") << m[i];
    os << ") outside the domain of " << name;
    throw DomainError(os.str());
  }
}

double DiffEngine::relative_step() const {
  if (fd_step > 0.0) return fd_step;
  if (fd_step < 0.0) throw InvalidParameter("finite-difference step must be positive");
  return std::cbrt(std::numeric_limits<double>::epsilon());
}

}  // namespace slowfast
