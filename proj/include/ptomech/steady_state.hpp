#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "ptomech/params.hpp"

namespace ptomech {

/// One self-consistent mean-field fixed point of the driven three-mode system.
struct SteadyStateBranch {
  Complex alpha1_s;    ///< gain-cavity amplitude
  Complex alpha2_s;    ///< loss-cavity amplitude
  Complex beta_s;      ///< mechanical amplitude
  double n2 = 0.0;     ///< |alpha2_s|^2
  double delta_tilde;  ///< nonlinear detuning delta + 2 g Re(beta_s)
  double g1 = 0.0;     ///< distant effective coupling g |alpha1_s|
  double g2 = 0.0;     ///< direct effective coupling g |alpha2_s|
  double residual = 0.0;  ///< norm of the stationarity equations at this point
};

namespace detail {

// Per-photon detuning shift: delta_tilde = delta + shift_per_photon * n2.
// Follows from eliminating beta_s = i g n2 / (i omega_m + gamma_m/2).
inline double shift_per_photon(const SystemParams& p) {
  const double denom = p.omega_m * p.omega_m + 0.25 * p.gamma_m * p.gamma_m;
  return 2.0 * p.g * p.g * p.omega_m / denom;
}

struct EliminationTerms {
  Complex pole;      // i delta + kappa/2 (gain-cavity elimination denominator)
  Complex coupling;  // J^2 / pole
  double re_d;       // Re D = -gamma/2 + Re(coupling), independent of n2
  double im_d0;      // Im D at n2 = 0: delta + Im(coupling)
  double shift;      // d(Im D)/d(n2)
};

inline EliminationTerms elimination_terms(const SystemParams& p) {
  const Complex pole(0.5 * p.kappa, p.delta);
  if (std::abs(pole) < 1e-14)
    throw SingularDecoupling("gain-cavity pole |i delta + kappa/2| below 1e-14");
  const Complex coupling = p.J * p.J / pole;
  EliminationTerms t;
  t.pole = pole;
  t.coupling = coupling;
  t.re_d = -0.5 * p.gamma + coupling.real();
  t.im_d0 = p.delta + coupling.imag();
  t.shift = shift_per_photon(p);
  return t;
}

// Reduced loss-cavity response D(n2) = i delta_tilde(n2) - gamma/2 + J^2/(i delta + kappa/2).
inline Complex reduced_response(const EliminationTerms& t, double n2) {
  return {t.re_d, t.im_d0 + t.shift * n2};
}

// Real roots of a*x^3 + b*x^2 + c*x + d (a != 0) via the trigonometric/Cardano
// closed form on the depressed cubic, then Newton polish on the original
// polynomial to recover the digits lost to the wildly scaled coefficients.
inline std::vector<double> cubic_real_roots(double a, double b, double c, double d) {
  const double p = (3.0 * a * c - b * b) / (3.0 * a * a);
  const double q = (2.0 * b * b * b - 9.0 * a * b * c + 27.0 * a * a * d) / (27.0 * a * a * a);
  const double shift = -b / (3.0 * a);
  std::vector<double> roots;
  const double disc = 0.25 * q * q + p * p * p / 27.0;
  if (disc > 0.0) {
    const double s = std::sqrt(disc);
    const double u = std::cbrt(-0.5 * q + s);
    const double v = std::cbrt(-0.5 * q - s);
    roots.push_back(u + v + shift);
  } else if (p == 0.0 && q == 0.0) {
    roots.push_back(shift);
  } else {
    // three real roots
    const double r = std::sqrt(-p * p * p / 27.0);
    const double phi = std::acos(std::clamp(-0.5 * q / r, -1.0, 1.0));
    const double m = 2.0 * std::sqrt(-p / 3.0);
    for (int k = 0; k < 3; ++k)
      roots.push_back(m * std::cos((phi + 2.0 * M_PI * k) / 3.0) + shift);
  }
  auto f = [&](double x) { return ((a * x + b) * x + c) * x + d; };
  auto df = [&](double x) { return (3.0 * a * x + 2.0 * b) * x + c; };
  for (double& r : roots) {
    for (int it = 0; it < 4; ++it) {
      const double slope = df(r);
      if (slope == 0.0) break;
      const double step = f(r) / slope;
      r -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(r))) break;
    }
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double x, double y) {
                            return std::abs(x - y) <= 1e-9 * std::max({1.0, std::abs(x), std::abs(y)});
                          }),
              roots.end());
  return roots;
}

// At fixed n2 the stationarity condition for alpha2 is linear in
// (Re alpha2, Im alpha2):
//   (a+c) x + (d-b) y = 0
//   (b+d) x + (a-c) y = sqrt(gamma) alpha_in
// with D = a + i b and 2 chi e^{i theta} = c + i d.  Singular exactly at the
// parametric threshold |D|^2 = 4 chi^2.
inline bool alpha2_at_fixed_n2(const SystemParams& p, const EliminationTerms& t,
                               double n2, Complex& alpha2) {
  const Complex dd = reduced_response(t, n2);
  const double a = dd.real(), b = dd.imag();
  const double c = 2.0 * p.chi * std::cos(p.theta);
  const double d = 2.0 * p.chi * std::sin(p.theta);
  const double det = a * a + b * b - c * c - d * d;
  const double rhs = std::sqrt(p.gamma) * p.alpha_in;
  if (std::abs(det) < 1e-300) return false;
  alpha2 = Complex(-(d - b) * rhs / det, (a + c) * rhs / det);
  return true;
}

inline SteadyStateBranch assemble_branch(const SystemParams& p, const EliminationTerms& t,
                                         Complex alpha2) {
  SteadyStateBranch br;
  br.alpha2_s = alpha2;
  br.n2 = std::norm(alpha2);
  br.beta_s = kImag * p.g * br.n2 / Complex(0.5 * p.gamma_m, p.omega_m);
  br.delta_tilde = p.delta + 2.0 * p.g * br.beta_s.real();
  br.alpha1_s = kImag * p.J * alpha2 / t.pole;
  br.g1 = p.g * std::abs(br.alpha1_s);
  br.g2 = p.g * std::abs(br.alpha2_s);

  const Complex r1 = Complex(0.5 * p.kappa, p.delta) * br.alpha1_s - kImag * p.J * br.alpha2_s;
  const Complex pa = 2.0 * p.chi * std::exp(kImag * p.theta) * std::conj(br.alpha2_s);
  const Complex r2 = Complex(-0.5 * p.gamma, br.delta_tilde) * br.alpha2_s -
                     kImag * p.J * br.alpha1_s - kImag * std::sqrt(p.gamma) * p.alpha_in + pa;
  const Complex r3 = -Complex(0.5 * p.gamma_m, p.omega_m) * br.beta_s +
                     kImag * p.g * std::norm(br.alpha2_s);
  br.residual = std::sqrt(std::norm(r1) + std::norm(r2) + std::norm(r3));
  return br;
}

// chi != 0 closure F(n2) = |alpha2(n2)|^2 - n2, scanned for sign changes and
// bisected.  Roots where the linear solve sat on the parametric pole are
// rejected by a residual check.
inline std::vector<double> chi_path_roots(const SystemParams& p, const EliminationTerms& t) {
  auto closure = [&](double n2, bool& ok) {
    Complex a2;
    ok = alpha2_at_fixed_n2(p, t, n2, a2);
    return ok ? std::norm(a2) - n2 : 0.0;
  };

  double n_max = std::max(40.0 * p.alpha_in * p.alpha_in / p.gamma, 1.0);
  for (int expansion = 0; expansion < 4; ++expansion, n_max *= 10.0) {
    std::vector<double> roots;
    constexpr int kScan = 800;
    std::vector<double> grid;
    grid.reserve(kScan + 2);
    grid.push_back(0.0);
    const double lo = n_max * 1e-12;
    for (int i = 0; i <= kScan; ++i)
      grid.push_back(lo * std::pow(n_max / lo, double(i) / kScan));
    bool ok_prev = false;
    double f_prev = closure(grid[0], ok_prev);
    for (size_t i = 1; i < grid.size(); ++i) {
      bool ok = false;
      const double f = closure(grid[i], ok);
      if (ok_prev && ok && f_prev * f <= 0.0 && f_prev != 0.0) {
        // bisect; keep the invariant that f(lo_n) has the sign of f_prev
        double lo_n = grid[i - 1], hi_n = grid[i];
        const double sign_lo = f_prev > 0.0 ? 1.0 : -1.0;
        for (int it = 0; it < 200; ++it) {
          const double mid = 0.5 * (lo_n + hi_n);
          bool okm = false;
          const double fm = closure(mid, okm);
          if (!okm) break;
          (sign_lo * fm > 0.0 ? lo_n : hi_n) = mid;
          if (hi_n - lo_n <= 1e-15 * std::max(1.0, hi_n)) break;
        }
        const double root = 0.5 * (lo_n + hi_n);
        bool okr = false;
        const double fr = closure(root, okr);
        // reject sign changes across the parametric pole (|F| stays large)
        if (okr && std::abs(fr) <= 1e-8 * std::max(1.0, root)) roots.push_back(root);
      }
      ok_prev = ok;
      f_prev = f;
    }
    if (!roots.empty()) return roots;
  }
  throw NoConvergence("steady-state closure found no root after bracket expansion");
}

}  // namespace detail

/// Enumerates all mean-field fixed points, sorted ascending in n2.
///
/// beta and alpha1 are eliminated analytically; for chi = 0 the remaining
/// photon-number equation |D(n2)|^2 n2 = gamma alpha_in^2 is a real cubic
/// solved in closed form, for chi != 0 a bracketed scalar root find closes
/// the self-consistency loop on n2.
inline std::vector<SteadyStateBranch> solve_branches(const ValidatedParams& vp) {
  const SystemParams& p = vp.get();
  const detail::EliminationTerms t = detail::elimination_terms(p);

  std::vector<SteadyStateBranch> branches;
  if (p.alpha_in == 0.0) {
    branches.push_back(detail::assemble_branch(p, t, Complex(0.0, 0.0)));
    return branches;
  }

  const double drive = p.gamma * p.alpha_in * p.alpha_in;
  if (p.chi == 0.0) {
    std::vector<double> roots;
    if (t.shift == 0.0) {
      roots.push_back(drive / (t.re_d * t.re_d + t.im_d0 * t.im_d0));
    } else {
      roots = detail::cubic_real_roots(t.shift * t.shift, 2.0 * t.shift * t.im_d0,
                                       t.re_d * t.re_d + t.im_d0 * t.im_d0, -drive);
      roots.erase(std::remove_if(roots.begin(), roots.end(), [](double n) { return n < 0.0; }),
                  roots.end());
    }
    for (double n2 : roots) {
      const Complex dd = detail::reduced_response(t, n2);
      const Complex alpha2 = kImag * std::sqrt(p.gamma) * p.alpha_in / dd;
      branches.push_back(detail::assemble_branch(p, t, alpha2));
    }
  } else {
    for (double n2 : detail::chi_path_roots(p, t)) {
      Complex alpha2;
      // One self-consistency pass: re-solve at the rounded |alpha2|^2 so the
      // stored branch satisfies the stationarity equations to full precision.
      double n = n2;
      for (int it = 0; it < 4; ++it) {
        if (!detail::alpha2_at_fixed_n2(p, t, n, alpha2))
          throw NoConvergence("steady-state chi-path landed on the parametric pole");
        const double n_new = std::norm(alpha2);
        if (std::abs(n_new - n) <= 1e-15 * std::max(1.0, n)) break;
        n = n_new;
      }
      branches.push_back(detail::assemble_branch(p, t, alpha2));
    }
  }

  std::sort(branches.begin(), branches.end(),
            [](const SteadyStateBranch& x, const SteadyStateBranch& y) { return x.n2 < y.n2; });

  const double tol = 1e-10 * std::max(1.0, std::sqrt(p.gamma) * p.alpha_in);
  for (const SteadyStateBranch& br : branches)
    if (!(br.residual <= tol))
      throw NoConvergence("steady-state residual " + std::to_string(br.residual) +
                          " exceeds tolerance");
  return branches;
}

/// Recomputes (G1, G2) = g (|alpha1_s|, |alpha2_s|) from the stored amplitudes.
inline std::pair<double, double> effective_couplings(const SteadyStateBranch& br,
                                                     const ValidatedParams& vp) {
  const double g = vp->g;
  return {g * std::abs(br.alpha1_s), g * std::abs(br.alpha2_s)};
}

}  // namespace ptomech
