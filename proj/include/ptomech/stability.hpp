#pragma once

#include <array>
#include <complex>
#include <limits>

#include <Eigen/Eigenvalues>

#include "ptomech/steady_state.hpp"

namespace ptomech {

/// How the optomechanical coupling enters the fluctuation Jacobian.
/// PaperLiteral uses the magnitude G2 = g |alpha2_s| and discards the
/// steady-state phase; PhaseExact keeps the complex alpha2_s.  For chi = 0
/// the two are related by a gauge rotation and share the same spectrum.
enum class JacobianMode { PaperLiteral, PhaseExact };

/// 6x6 complex Jacobian of the fluctuations over the basis
/// (db, db+, da1, da1+, da2, da2+).
struct JacobianM {
  Matrix6cd m;
};

inline JacobianM jacobian(const SteadyStateBranch& br, const ValidatedParams& vp,
                          JacobianMode mode = JacobianMode::PaperLiteral) {
  const SystemParams& p = vp.get();
  const Complex omega_b(0.5 * p.gamma_m, p.omega_m);       // i omega_m + gamma_m/2
  const Complex omega_a1(0.5 * p.kappa, p.delta);          // i delta + kappa/2
  const Complex omega_a2(-0.5 * p.gamma, br.delta_tilde);  // i delta_tilde - gamma/2

  Matrix6cd m = Matrix6cd::Zero();
  m(0, 0) = -omega_b;
  m(1, 1) = -std::conj(omega_b);
  m(2, 2) = omega_a1;
  m(3, 3) = std::conj(omega_a1);
  m(4, 4) = omega_a2;
  m(5, 5) = std::conj(omega_a2);

  m(2, 4) = -kImag * p.J;
  m(3, 5) = kImag * p.J;
  m(4, 2) = -kImag * p.J;
  m(5, 3) = kImag * p.J;

  if (mode == JacobianMode::PaperLiteral) {
    const Complex ig2 = kImag * br.g2;
    m(0, 4) = ig2;
    m(0, 5) = ig2;
    m(1, 4) = -ig2;
    m(1, 5) = -ig2;
    m(4, 0) = ig2;
    m(4, 1) = ig2;
    m(5, 0) = -ig2;
    m(5, 1) = -ig2;
  } else {
    const Complex iga = kImag * p.g * br.alpha2_s;
    const Complex igac = kImag * p.g * std::conj(br.alpha2_s);
    m(0, 4) = igac;
    m(0, 5) = iga;
    m(1, 4) = -igac;
    m(1, 5) = -iga;
    m(4, 0) = iga;
    m(4, 1) = iga;
    m(5, 0) = -igac;
    m(5, 1) = -igac;
  }

  const Complex pa = 2.0 * p.chi * std::exp(kImag * p.theta);
  m(4, 5) = pa;
  m(5, 4) = std::conj(pa);
  return {m};
}

/// Reduced 4x4 Jacobian over (db, db+, da2, da2+) for the single-lossy-cavity
/// configuration (cavity 1 dropped; valid verbatim when J = 0).
inline Matrix4cd jacobian_single_cavity(const SteadyStateBranch& br, const ValidatedParams& vp,
                                        JacobianMode mode = JacobianMode::PaperLiteral) {
  const Matrix6cd m = jacobian(br, vp, mode).m;
  Matrix4cd r;
  const std::array<int, 4> idx = {0, 1, 4, 5};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r(i, j) = m(idx[i], idx[j]);
  return r;
}

struct StabilityVerdict {
  bool stable = false;
  double max_re_lambda = 0.0;
  std::array<Complex, 6> eigenvalues{};  // trailing entries zero for reduced systems
  int n_eigenvalues = 6;
};

template <int N>
inline StabilityVerdict is_stable(const Eigen::Matrix<Complex, N, N>& m, double margin = 1e-9) {
  if (margin < 0.0) throw DomainError("margin", "must be >= 0");
  Eigen::ComplexEigenSolver<Eigen::Matrix<Complex, N, N>> solver(m, false);
  if (solver.info() != Eigen::Success) throw EigenFailure("complex eigensolver did not converge");
  StabilityVerdict v;
  v.n_eigenvalues = N;
  double max_re = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < N; ++i) {
    v.eigenvalues[i] = solver.eigenvalues()(i);
    max_re = std::max(max_re, v.eigenvalues[i].real());
  }
  v.max_re_lambda = max_re;
  v.stable = max_re < -margin;
  return v;
}

inline StabilityVerdict is_stable(const JacobianM& m, double margin = 1e-9) {
  return is_stable<6>(m.m, margin);
}

}  // namespace ptomech
