#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "ptomech/params.hpp"

namespace ptomech {

using State3 = Eigen::Vector3cd;  // (alpha1, alpha2, beta)

/// Mean-field trajectory; all entries finite
/// (hitting the divergence guard halts recording and sets `diverged`).
struct Trajectory {
  std::vector<double> times;
  std::vector<State3> states;
  std::vector<double> i1;  ///< |alpha1|^2
  std::vector<double> i2;  ///< |alpha2|^2
  bool diverged = false;
  size_t size() const { return times.size(); }
};

struct IntegrateOptions {
  double t_end = 2000.0;  ///< default horizon covers the slow mechanical settling
  double rtol = 1e-6;
  double atol = 1e-9;
  int record_every = 1;        ///< keep every k-th accepted step
  double guard = 1e12;         ///< amplitude bound; exceeding halts with the diverged flag
  double max_step = 0.0;       ///< step ceiling; 0 picks t_end/512 so slow decays still sample densely
  long max_steps = 50'000'000;
};

namespace detail {

inline State3 mean_field_rhs(const SystemParams& p, const State3& y) {
  const Complex a1 = y(0), a2 = y(1), b = y(2);
  State3 f;
  f(0) = Complex(0.5 * p.kappa, p.delta) * a1 - kImag * p.J * a2;
  const double dt = p.delta + 2.0 * p.g * b.real();
  f(1) = Complex(-0.5 * p.gamma, dt) * a2 - kImag * p.J * a1 -
         kImag * std::sqrt(p.gamma) * p.alpha_in +
         2.0 * p.chi * std::exp(kImag * p.theta) * std::conj(a2);
  f(2) = -Complex(0.5 * p.gamma_m, p.omega_m) * b + kImag * p.g * std::norm(a2);
  return f;
}

}  // namespace detail

/// Integrates the noise-free mean-field equations with an embedded
/// Dormand-Prince 5(4) pair; local error per step <= atol + rtol |y|.
inline Trajectory integrate(const ValidatedParams& vp, const State3& initial,
                            const IntegrateOptions& opt = {}) {
  if (!(opt.t_end > 0.0)) throw DomainError("t_end", "must be > 0");
  if (!(opt.rtol > 0.0 && opt.rtol <= 1e-2)) throw DomainError("rtol", "must be in (0, 1e-2]");
  if (!(opt.atol > 0.0 && opt.atol <= 1e-2)) throw DomainError("atol", "must be in (0, 1e-2]");
  if (opt.record_every < 1) throw DomainError("record_every", "must be >= 1");
  const double h_max = opt.max_step > 0.0 ? opt.max_step : opt.t_end / 512.0;
  const SystemParams& p = vp.get();

  // Dormand-Prince 5(4) tableau
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  auto rhs = [&p](const State3& y) { return detail::mean_field_rhs(p, y); };

  Trajectory traj;
  double t = 0.0;
  State3 y = initial;
  State3 k1 = rhs(y);

  // initial step size from the scaled magnitudes of y and f
  double h;
  {
    double d0 = 0.0, d1 = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double sc = opt.atol + opt.rtol * std::abs(y(i));
      d0 = std::max(d0, std::abs(y(i)) / sc);
      d1 = std::max(d1, std::abs(k1(i)) / sc);
    }
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min({h, opt.t_end, h_max});
  }

  auto record = [&](double tt, const State3& yy) {
    traj.times.push_back(tt);
    traj.states.push_back(yy);
    traj.i1.push_back(std::norm(yy(0)));
    traj.i2.push_back(std::norm(yy(1)));
  };
  record(t, y);

  long steps = 0;
  long accepted = 0;
  bool rejected_last = false;
  while (t < opt.t_end) {
    if (++steps > opt.max_steps) throw NoConvergence("integration step budget exhausted");
    // stiffness signal comes from the controller's h, not the endpoint clamp
    if (h < 1e-13 * std::max(1.0, std::abs(t)))
      throw StepSizeUnderflow(t, "step size underflow at t = " + std::to_string(t));
    const double ht = std::min(h, opt.t_end - t);

    const State3 k2 = rhs(y + ht * (a21 * k1));
    const State3 k3 = rhs(y + ht * (a31 * k1 + a32 * k2));
    const State3 k4 = rhs(y + ht * (a41 * k1 + a42 * k2 + a43 * k3));
    const State3 k5 = rhs(y + ht * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const State3 k6 = rhs(y + ht * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const State3 ynew = y + ht * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const State3 k7 = rhs(ynew);
    const State3 errv = ht * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err = 0.0;
    bool finite = true;
    for (int i = 0; i < 3; ++i) {
      if (!std::isfinite(ynew(i).real()) || !std::isfinite(ynew(i).imag())) finite = false;
      const double sc = opt.atol + opt.rtol * std::max(std::abs(y(i)), std::abs(ynew(i)));
      err += std::norm(errv(i)) / (sc * sc);
    }
    err = std::sqrt(err / 3.0);

    if (!finite || err > 1.0) {
      const double fac = finite ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
      h = ht * fac;
      rejected_last = true;
      continue;
    }

    t += ht;
    y = ynew;
    k1 = k7;  // FSAL
    ++accepted;
    if (accepted % opt.record_every == 0 || t >= opt.t_end) record(t, y);

    double amp = 0.0;
    for (int i = 0; i < 3; ++i) amp = std::max(amp, std::abs(y(i)));
    if (amp > opt.guard) {
      if (traj.times.back() != t) record(t, y);
      traj.diverged = true;
      break;
    }

    const double facmax = rejected_last ? 1.0 : 5.0;
    rejected_last = false;
    h = ht * std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, facmax);
    h = std::min(h, h_max);
  }
  return traj;
}

enum class TrajectoryKind { Converged, Diverged, Oscillating };

struct TrajectoryClass {
  TrajectoryKind kind;
  State3 fixed_point = State3::Zero();  ///< final state when Converged
  double rate = 0.0;                    ///< fitted d ln(I1+I2)/dt when Diverged
  double r_squared = 0.0;
};

/// Tail-window classification: Converged when the tail varies by < 1e-6
/// relative, Diverged when ln(I1+I2) grows linearly (R^2 > 0.99), else
/// Oscillating.
inline TrajectoryClass classify_trajectory(const Trajectory& traj, double window = 0.25) {
  if (!(window > 0.0 && window <= 1.0)) throw DomainError("window", "must be in (0, 1]");
  const size_t n = traj.size();
  if (n < 100) throw TooShort("trajectory", "needs >= 100 samples");
  const size_t tail = std::max<size_t>(static_cast<size_t>(window * n), 1);
  if (tail < 10) throw TooShort("window", "tail window has < 10 samples");
  const size_t start = n - tail;

  const State3& last = traj.states.back();
  double dev = 0.0;
  for (size_t i = start; i < n; ++i) dev = std::max(dev, (traj.states[i] - last).norm());
  TrajectoryClass out{TrajectoryKind::Oscillating, last, 0.0, 0.0};
  if (dev < 1e-6 * std::max(1.0, last.norm())) {
    out.kind = TrajectoryKind::Converged;
    return out;
  }

  // least-squares slope of ln(I1 + I2) over the tail
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  size_t m = 0;
  for (size_t i = start; i < n; ++i) {
    const double inten = traj.i1[i] + traj.i2[i];
    if (!(inten > 0.0)) continue;
    const double x = traj.times[i], yv = std::log(inten);
    sx += x; sy += yv; sxx += x * x; sxy += x * yv; syy += yv * yv;
    ++m;
  }
  if (m >= 10) {
    const double det = m * sxx - sx * sx;
    if (det > 0.0) {
      const double slope = (m * sxy - sx * sy) / det;
      const double intercept = (sy - slope * sx) / m;
      const double ss_tot = syy - sy * sy / m;
      double ss_res = 0.0;
      for (size_t i = start; i < n; ++i) {
        const double inten = traj.i1[i] + traj.i2[i];
        if (!(inten > 0.0)) continue;
        const double r = std::log(inten) - (intercept + slope * traj.times[i]);
        ss_res += r * r;
      }
      const double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
      out.rate = slope;
      out.r_squared = r2;
      if (slope > 0.0 && r2 > 0.99) out.kind = TrajectoryKind::Diverged;
    }
  }
  return out;
}

}  // namespace ptomech
