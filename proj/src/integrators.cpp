#include "slowfast/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "slowfast/errors.hpp"
#include "slowfast/fit.hpp"

namespace slowfast {

namespace {

// Dormand-Prince 5(4) tableau with Hairer's continuous extension.
constexpr double c2 = 0.2, c3 = 0.3, c4 = 0.8, c5 = 8.0 / 9.0;
constexpr double a21 = 0.2;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

using Vec = std::vector<double>;

class Dopri5 {
 public:
  Dopri5(const VectorField& f, std::size_t n, const IntegratorConfig& cfg)
      : f_(f), cfg_(cfg), k1_(n), k2_(n), k3_(n), k4_(n), k5_(n), k6_(n), k7_(n), ys_(n),
        y1_(n), r1_(n), r2_(n), r3_(n), r4_(n), r5_(n) {}

  IntegrationStats run(std::span<const double> y0, double t0,
                       std::span<const double> sample_times, const SampleSink& sink) {
    const std::size_t n = y0.size();
    Vec y(y0.begin(), y0.end());
    double t = t0;
    const double t_final = sample_times.back();
    const double dir = (t_final >= t0) ? 1.0 : -1.0;
    std::size_t next = 0;
    while (next < sample_times.size() && sample_times[next] == t0) {
      sink(t0, y);
      ++next;
    }
    if (next == sample_times.size()) return stats_;

    eval(t, y, k1_);
    double h = cfg_.h_init > 0.0 ? dir * cfg_.h_init : dir * initial_step(t, y);
    const double h_max = std::abs(t_final - t0);
    double fac_old = 1e-4;
    bool last_rejected = false;

    while (true) {
      if (stats_.accepted + stats_.rejected >= cfg_.max_steps) {
        std::ostringstream os;
        os << "integrator exceeded " << cfg_.max_steps << " steps at t = " << t;
        throw MaxStepsExceeded(os.str(), t);
      }
      if (std::abs(h) > h_max) h = dir * h_max;
      if (dir * (t + h - t_final) > 0.0) h = t_final - t;
      const double h_floor = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
      if (std::abs(h) < h_floor) {
        std::ostringstream os;
        os << "step size underflow at t = " << t;
        throw StepSizeUnderflow(os.str(), t);
      }

      const double err = attempt(t, y, h);
      if (!std::isfinite(err)) {
        ++stats_.rejected;
        h *= 0.1;
        last_rejected = true;
        continue;
      }
      // PI step-size control (Hairer & Wanner, beta = 0.04).
      const double fac11 = std::pow(std::max(err, 1e-300), 0.2 - 0.04 * 0.75);
      double fac = fac11 / std::pow(fac_old, 0.04);
      fac = std::clamp(fac / 0.9, 1.0 / 10.0, 1.0 / 0.2);
      if (err <= 1.0) {
        ++stats_.accepted;
        fac_old = std::max(err, 1e-4);
        // Dense-output coefficients for the accepted step; k7 is f(t+h, y1).
        for (std::size_t i = 0; i < n; ++i) {
          const double dy = y1_[i] - y[i];
          const double bspl = h * k1_[i] - dy;
          r1_[i] = y[i];
          r2_[i] = dy;
          r3_[i] = bspl;
          r4_[i] = dy - h * k7_[i] - bspl;
          r5_[i] = h * (d1 * k1_[i] + d3 * k3_[i] + d4 * k4_[i] + d5 * k5_[i] + d6 * k6_[i] +
                        d7 * k7_[i]);
        }
        const double t_new = (t + h == t_final || dir * (t + h - t_final) >= 0.0) ? t_final : t + h;
        while (next < sample_times.size() && dir * (sample_times[next] - t_new) <= 0.0) {
          const double ts = sample_times[next];
          if (ts == t_new) {
            sink(ts, y1_);
          } else {
            const double theta = (ts - t) / h;
            const double theta1 = 1.0 - theta;
            for (std::size_t i = 0; i < n; ++i)
              ys_[i] = r1_[i] + theta * (r2_[i] + theta1 * (r3_[i] + theta * (r4_[i] + theta1 * r5_[i])));
            sink(ts, ys_);
          }
          ++next;
        }
        y.swap(y1_);
        k1_.swap(k7_);
        t = t_new;
        if (next == sample_times.size()) break;
        double h_new = h / fac;
        if (last_rejected) h_new = dir * std::min(std::abs(h_new), std::abs(h));
        last_rejected = false;
        h = h_new;
      } else {
        ++stats_.rejected;
        h /= std::min(1.0 / 0.2, fac11 / 0.9);
        last_rejected = true;
      }
    }
    return stats_;
  }

 private:
  void eval(double t, std::span<const double> y, Vec& out) {
    f_(t, y, out);
    ++stats_.evaluations;
  }

  double initial_step(double t, const Vec& y) {
    const std::size_t n = y.size();
    double dnf = 0.0, dny = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sk = cfg_.atol + cfg_.rtol * std::abs(y[i]);
      dnf += (k1_[i] / sk) * (k1_[i] / sk);
      dny += (y[i] / sk) * (y[i] / sk);
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
    for (std::size_t i = 0; i < n; ++i) y1_[i] = y[i] + h * k1_[i];
    eval(t + h, y1_, k2_);
    double der2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sk = cfg_.atol + cfg_.rtol * std::abs(y[i]);
      der2 += ((k2_[i] - k1_[i]) / sk) * ((k2_[i] - k1_[i]) / sk);
    }
    der2 = std::sqrt(der2) / h;
    const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, std::abs(h) * 1e-3)
                                     : std::pow(0.01 / der12, 0.2);
    return std::min(100.0 * h, h1);
  }

  // Computes y1_ and k2_..k7_ for a trial step; returns the scaled error norm.
  double attempt(double t, const Vec& y, double h) {
    const std::size_t n = y.size();
    for (std::size_t i = 0; i < n; ++i) y1_[i] = y[i] + h * a21 * k1_[i];
    eval(t + c2 * h, y1_, k2_);
    for (std::size_t i = 0; i < n; ++i) y1_[i] = y[i] + h * (a31 * k1_[i] + a32 * k2_[i]);
    eval(t + c3 * h, y1_, k3_);
    for (std::size_t i = 0; i < n; ++i)
      y1_[i] = y[i] + h * (a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]);
    eval(t + c4 * h, y1_, k4_);
    for (std::size_t i = 0; i < n; ++i)
      y1_[i] = y[i] + h * (a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
    eval(t + c5 * h, y1_, k5_);
    for (std::size_t i = 0; i < n; ++i)
      ys_[i] = y[i] + h * (a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] + a65 * k5_[i]);
    eval(t + h, ys_, k6_);
    for (std::size_t i = 0; i < n; ++i)
      y1_[i] = y[i] + h * (a71 * k1_[i] + a73 * k3_[i] + a74 * k4_[i] + a75 * k5_[i] + a76 * k6_[i]);
    eval(t + h, y1_, k7_);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] + e6 * k6_[i] +
                            e7 * k7_[i]);
      const double sk = cfg_.atol + cfg_.rtol * std::max(std::abs(y[i]), std::abs(y1_[i]));
      err += (e / sk) * (e / sk);
    }
    return std::sqrt(err / double(n));
  }

  const VectorField& f_;
  const IntegratorConfig& cfg_;
  IntegrationStats stats_;
  Vec k1_, k2_, k3_, k4_, k5_, k6_, k7_, ys_, y1_;
  Vec r1_, r2_, r3_, r4_, r5_;
};

IntegrationStats run_fixed(const VectorField& f, std::span<const double> y0, double t0,
                           std::span<const double> sample_times, const IntegratorConfig& cfg,
                           const SampleSink& sink) {
  IntegrationStats stats;
  Vec y(y0.begin(), y0.end());
  double t = t0;
  const double dir = (sample_times.back() >= t0) ? 1.0 : -1.0;
  for (double ts : sample_times) {
    while (dir * (ts - t) > 0.0) {
      if (stats.accepted >= cfg.max_steps) throw MaxStepsExceeded("fixed-step budget exhausted", t);
      double h = dir * cfg.dt;
      // Land exactly on the sample; absorb a tiny remainder into this step.
      if (dir * (t + h - ts) > -1e-12 * cfg.dt) h = ts - t;
      y = step_rk4(f, t, y, h);
      t = (h == ts - t) ? ts : t + h;
      ++stats.accepted;
      stats.evaluations += 4;
    }
    sink(ts, y);
  }
  return stats;
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(dt > 0.0)) throw InvalidParameter("integrator dt must be positive");
  if (!(rtol > 0.0) || !(atol > 0.0)) throw InvalidParameter("integrator tolerances must be positive");
  if (max_steps <= 0) throw InvalidParameter("max_steps must be positive");
}

std::vector<double> step_rk4(const VectorField& f, double t, std::span<const double> y, double dt) {
  const std::size_t n = y.size();
  Vec k1(n), k2(n), k3(n), k4(n), tmp(n);
  f(t, y, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
  f(t + 0.5 * dt, tmp, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
  f(t + 0.5 * dt, tmp, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * k3[i];
  f(t + dt, tmp, k4);
  Vec out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

IntegrationStats integrate(const VectorField& f, std::span<const double> y0, double t0,
                           std::span<const double> sample_times, const IntegratorConfig& config,
                           const SampleSink& sink) {
  config.validate();
  if (sample_times.empty()) return {};
  for (double ts : sample_times) {
    if (!std::isfinite(ts)) throw InvalidParameter("sample times must be finite");
  }
  const double dir = (sample_times.back() >= t0) ? 1.0 : -1.0;
  double prev = t0;
  for (double ts : sample_times) {
    if (dir * (ts - prev) < 0.0) throw InvalidParameter("sample times must be monotone away from t0");
    prev = ts;
  }
  if (config.method == IntegratorMethod::rk4_fixed) return run_fixed(f, y0, t0, sample_times, config, sink);
  Dopri5 solver(f, y0.size(), config);
  return solver.run(y0, t0, sample_times, sink);
}

Trajectory integrate(const VectorField& f, std::span<const double> y0, double t_end,
                     const IntegratorConfig& config, int samples) {
  if (samples < 1) throw InvalidParameter("need at least one sample interval");
  std::vector<double> times(std::size_t(samples) + 1);
  for (int i = 0; i <= samples; ++i) times[std::size_t(i)] = t_end * double(i) / double(samples);
  times.back() = t_end;
  Trajectory traj;
  traj.stats = integrate(f, y0, 0.0, times, config, [&](double t, std::span<const double> y) {
    traj.times.push_back(t);
    traj.states.emplace_back(y.begin(), y.end());
  });
  return traj;
}

std::vector<double> integrate_to(const VectorField& f, std::span<const double> y0, double t0,
                                 double t_end, const IntegratorConfig& config) {
  Vec out(y0.begin(), y0.end());
  const double times[1] = {t_end};
  integrate(f, y0, t0, times, config,
            [&](double, std::span<const double> y) { out.assign(y.begin(), y.end()); });
  return out;
}

ConvergenceResult convergence_order(const VectorField& f, std::span<const double> y0,
                                    double t_end, std::span<const double> dt_list,
                                    const Stepper& stepper) {
  if (dt_list.size() < 2) throw SlopeUndefined("convergence study needs at least two step sizes");
  auto run = [&](double dt) {
    const long steps = std::lround(t_end / dt);
    const double h = t_end / double(steps);
    Vec y(y0.begin(), y0.end());
    for (long i = 0; i < steps; ++i) y = stepper(f, double(i) * h, y, h);
    return y;
  };
  const double dt_min = *std::min_element(dt_list.begin(), dt_list.end());
  const Vec ref = run(dt_min / 16.0);
  ConvergenceResult res;
  for (double dt : dt_list) {
    const Vec y = run(dt);
    double e = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) e = std::max(e, std::abs(y[i] - ref[i]));
    res.errors.push_back(e);
  }
  const bool all_zero = std::all_of(res.errors.begin(), res.errors.end(), [](double e) { return e == 0.0; });
  if (all_zero) {
    res.degenerate = true;
    return res;
  }
  res.order = fit_loglog(dt_list, res.errors).slope;
  return res;
}

}  // namespace slowfast
