#include "slowfast/fixtures.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "slowfast/circle_action.hpp"
#include "slowfast/errors.hpp"
#include "slowfast/quadratic.hpp"

namespace slowfast {

namespace {

const std::vector<double> kDefaultEpsGrid = {0.2, 0.1, 0.05, 0.025, 0.0125};

double take(ParamMap& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  if (it == p.end()) return fallback;
  const double v = it->second;
  p.erase(it);
  return v;
}

void scale_frequency(Fixture& f, double scale) {
  if (scale == 1.0) return;
  if (!(scale > 0.0)) throw InvalidParameter("omega_scale must be positive");
  const ScalarField w = f.system.frequency;
  f.system.frequency = ScalarField::lift([w, scale](auto m) { return scale * w(m); });
  f.params["omega_scale"] = scale;
}

}  // namespace

std::vector<double> Fixture::from_natural_order(std::span<const double> v) const {
  if (v.size() != natural_index.size()) throw DomainError("point has the wrong number of coordinates");
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[std::size_t(natural_index[i])] = v[i];
  return out;
}

std::vector<double> Fixture::to_natural_order(std::span<const double> v) const {
  if (v.size() != natural_index.size()) throw DomainError("point has the wrong number of coordinates");
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[std::size_t(natural_index[i])];
  return out;
}

Fixture elastic_pendulum(double Omega, double gamma) {
  if (!(Omega > 0.0) || !std::isfinite(Omega)) throw InvalidParameter("elastic pendulum needs Omega > 0");
  if (!std::isfinite(gamma)) throw InvalidParameter("elastic pendulum needs a finite gamma");
  Fixture f;
  f.name = "elastic_pendulum";
  f.params = {{"Omega", Omega}, {"gamma", gamma}};
  SlowFastSystem& s = f.system;
  s.name = f.name;
  s.dims = Dims{1, 1};
  const double W = Omega, g = gamma;
  // layout: m[0]=y, m[1]=x, m[2]=p, m[3]=q
  s.hamiltonian = ScalarField::lift([W, g](auto m) {
    const auto &y = m[0], &x = m[1], &p = m[2], &q = m[3];
    return 0.5 * (p * p + q * q) + 0.5 * (y * y + W * W * x * x + g * q * q * x);
  });
  s.frequency = ScalarField::lift([W](auto m) { return 0.0 * m[0] + W; });
  s.momentum = ScalarField::lift([W, g](auto m) {
    const auto xi = m[1] + g / (2.0 * W * W) * m[3] * m[3];
    return 0.5 * W * xi * xi + m[0] * m[0] / (2.0 * W);
  });
  s.fast_flow = FlowMap::lift([W, g](double t, auto m, auto out) {
    const auto x0 = -g / (2.0 * W * W) * m[3] * m[3];
    const auto xi = m[1] - x0;
    const double c = std::cos(t), sn = std::sin(t);
    out[0] = m[0] * c - W * xi * sn;
    out[1] = x0 + xi * c + m[0] / W * sn;
    out[2] = m[2];
    out[3] = m[3];
  });
  s.domain = Box({{-2.0, 2.0}, {-2.0, 2.0}, {-2.0, 2.0}, {-2.0, 2.0}});
  f.F1_closed = ScalarField::lift([W, g](auto m) { return g / (W * W * W) * m[2] * m[3] * m[0]; });
  f.F2_closed = ScalarField::lift([W, g](auto m) {
    const auto &y = m[0], &x = m[1], &p = m[2], &q = m[3];
    const auto q2 = q * q;
    const auto xi = x + g / (2.0 * W * W) * q2;
    const auto bracket = g * q2 * xi * (x - 3.0 * g / (2.0 * W * W) * q2) +
                         4.0 * (q2 - p * p) * xi - g / (W * W) * q2 * y * y;
    return g / (2.0 * W * W * W) * bracket;
  });
  f.eps_grid = kDefaultEpsGrid;
  f.default_point = {0.5, 0.0, 0.1, 1.0};
  f.natural_labels = {"p", "q", "y", "x"};
  f.natural_index = {2, 3, 0, 1};
  return f;
}

Fixture charged_particle(double B, double lambda) {
  if (!(B > 0.0) || !std::isfinite(B)) throw InvalidParameter("charged particle needs B > 0");
  if (!std::isfinite(lambda)) throw InvalidParameter("charged particle needs a finite lambda");
  Fixture f;
  f.name = "charged_particle";
  f.params = {{"B", B}, {"lambda", lambda}};
  SlowFastSystem& s = f.system;
  s.name = f.name;
  s.dims = Dims{1, 1};
  const double b = B, l = lambda;
  // layout: m[0]=p3, m[1]=q3, m[2]=p2, m[3]=q2
  auto omega = [b, l](const auto& q2) { return sqrt(b * b * q2 * q2 * q2 * q2 + l * l) / (q2 * q2); };
  s.hamiltonian = ScalarField::lift([b, l](auto m) {
    const auto &p3 = m[0], &q3 = m[1], &p2 = m[2], &q2 = m[3];
    return 0.5 * (p2 * p2 + p3 * p3 * (b * b * q2 * q2 + l * l / (q2 * q2)) +
                  2.0 * l * p2 * p3 / q2 + q3 * q3 / (q2 * q2));
  });
  s.frequency = ScalarField::lift([omega](auto m) { return omega(m[3]); });
  s.momentum = ScalarField::lift([omega, l](auto m) {
    const auto &p3 = m[0], &q3 = m[1], &p2 = m[2], &q2 = m[3];
    const auto w = omega(q2);
    const auto u = w * q2 * p3 + l * p2 / (w * q2 * q2);
    return (q3 * q3 / (q2 * q2) + u * u) / (2.0 * w);
  });
  s.fast_flow = FlowMap::lift([omega, l](double t, auto m, auto out) {
    const auto &p3 = m[0], &q3 = m[1], &p2 = m[2], &q2 = m[3];
    const auto w = omega(q2);
    const auto shift = l * p2 / (w * w * q2 * q2 * q2);
    const double c = std::cos(t), sn = std::sin(t);
    out[0] = (p3 + shift) * c - q3 / (w * q2 * q2) * sn - shift;
    out[1] = (w * q2 * q2 * p3 + l * p2 / (w * q2)) * sn + q3 * c;
    out[2] = p2;
    out[3] = q2;
  });
  s.domain = Box({{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}, {0.5, 2.0}});
  f.F1_closed = ScalarField::lift([omega, b, l](auto m) {
    const auto &p3 = m[0], &q3 = m[1], &p2 = m[2], &q2 = m[3];
    const auto w = omega(q2);
    const auto q2sq = q2 * q2;
    const auto q2p4 = q2sq * q2sq;
    const auto q2p9 = q2p4 * q2p4 * q2;
    const auto w2 = w * w;
    const auto pl = p2 * q2 + l * p3;
    const auto inner = p2 * p3 * q2p9 * (b * b * b * b) +
                       l * q2p4 * (l * l * p3 * p3 - 2.0 * p2 * p2 * q2sq) * (b * b) +
                       l * l * l * (q3 * q3 + pl * pl);
    return -q3 / (q2p9 * q2 * w2 * w2 * w) * inner;
  });
  f.eps_grid = kDefaultEpsGrid;
  f.default_point = {0.1, 0.3, 0.2, 1.0};
  f.natural_labels = {"p2", "q2", "p3", "q3"};
  f.natural_index = {2, 3, 0, 1};
  return f;
}

Fixture quadratic_benchmark() {
  const Box slow_box({{-1.0, 1.0}, {-1.0, 1.0}});
  QuadraticSystem qs(
      "quadratic_benchmark", 1, ScalarField::lift([](auto w) { return 0.5 * w[0] * w[0]; }),
      ScalarField::lift([](auto w) { return 0.0 * w[0] + 1.0; }),
      Sl2Field::lift([](auto w) {
        using T = std::remove_cvref_t<decltype(w[0])>;
        return std::array<T, 3>{T(0.0) * w[0], exp(w[0]), -exp(-w[0])};
      }),
      slow_box);
  Fixture f;
  f.name = "quadratic_benchmark";
  f.system = qs.system();
  f.F1_closed = ScalarField::lift([](auto m) { return 0.0 * m[0]; });
  f.F2_closed = f.F1_closed;
  f.eps_grid = kDefaultEpsGrid;
  f.default_point = {1.0, 0.0, 0.0, 0.0};
  f.natural_labels = {"p", "q", "y", "x"};
  f.natural_index = {2, 3, 0, 1};
  return f;
}

double verify_transverse_momentum(const Fixture& fixture, const PhasePoint& m) {
  const SlowFastSystem& s = fixture.system;
  s.require_in_domain(m.coords());
  const CircleAction action(s, s.fast_flow ? FlowMode::analytic : FlowMode::numeric, 16);
  const OrbitSamples orbit = action.sample(m.coords());
  std::vector<double> centre(m.vec());
  const int r2 = s.dims.fast();
  for (int i = 0; i < r2; ++i) {
    double acc = 0.0;
    for (int j = 0; j < orbit.nodes(); ++j) acc += orbit.point(j)[std::size_t(i)];
    centre[std::size_t(i)] = acc / orbit.nodes();
  }
  const double vperp2 = 2.0 * (s.hamiltonian(m.coords()) - s.hamiltonian(centre));
  const double field = s.frequency(m.coords());
  return std::abs(s.momentum(m.coords()) - vperp2 / (2.0 * field));
}

std::vector<std::string> list_fixtures() {
  return {"charged_particle", "elastic_pendulum", "quadratic_benchmark"};
}

Fixture get_fixture(const std::string& name, const ParamMap& params) {
  ParamMap p = params;
  const double scale = take(p, "omega_scale", 1.0);
  Fixture f;
  if (name == "elastic_pendulum") {
    const double W = take(p, "Omega", 1.0);
    const double g = take(p, "gamma", 0.1);
    f = elastic_pendulum(W, g);
  } else if (name == "charged_particle") {
    const double B = take(p, "B", 1.0);
    const double l = take(p, "lambda", 0.3);
    f = charged_particle(B, l);
  } else if (name == "quadratic_benchmark") {
    f = quadratic_benchmark();
  } else {
    throw NotFound("unknown fixture '" + name + "'");
  }
  if (!p.empty()) {
    std::ostringstream os;
    os << "fixture " << name << " has no parameter '" << p.begin()->first << "'";
    throw InvalidParameter(os.str());
  }
  scale_frequency(f, scale);
  return f;
}

}  // namespace slowfast
