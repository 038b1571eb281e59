#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "ptomech/stability.hpp"

namespace ptomech {

/// Whether the quadrature drift matrix uses the nonlinear detuning
/// delta_tilde in both off-diagonal cavity-2 positions (Corrected, the
/// internally consistent linearization) or keeps the bare detuning delta at
/// entry (6,5) (PaperLiteral, a comparison convention only).
enum class DriftMode { Corrected, PaperLiteral };

/// Real 6x6 drift matrix over u = (dx, dp, dI1, dphi1, dI2, dphi2).
struct DriftA {
  Matrix6d a;
};

/// Diagonal diffusion matrix over the same quadrature basis.
struct DiffusionD {
  Vector6d d;
  Matrix6d matrix() const { return d.asDiagonal(); }
};

inline DriftA drift_matrix(const SteadyStateBranch& br, const ValidatedParams& vp,
                           DriftMode mode = DriftMode::Corrected) {
  const SystemParams& p = vp.get();
  const double g2 = br.g2;
  const double dt = br.delta_tilde;
  const double c = 2.0 * p.chi * std::cos(p.theta);
  const double s = 2.0 * p.chi * std::sin(p.theta);

  Matrix6d a = Matrix6d::Zero();
  a(0, 0) = -0.5 * p.gamma_m;
  a(0, 1) = p.omega_m;
  a(1, 0) = -p.omega_m;
  a(1, 1) = -0.5 * p.gamma_m;
  a(1, 4) = 2.0 * g2;

  a(2, 2) = 0.5 * p.kappa;
  a(2, 3) = -p.delta;
  a(2, 5) = p.J;
  a(3, 2) = p.delta;
  a(3, 3) = 0.5 * p.kappa;
  a(3, 4) = -p.J;

  a(4, 3) = p.J;
  a(4, 4) = c - 0.5 * p.gamma;
  a(4, 5) = s - dt;
  a(5, 0) = 2.0 * g2;
  a(5, 2) = -p.J;
  a(5, 4) = s + (mode == DriftMode::Corrected ? dt : p.delta);
  a(5, 5) = -(c + 0.5 * p.gamma);
  return {a};
}

/// Input-noise diffusion diag(gamma_m/2 (2 n_th + 1) x2, |kappa|/2 (2 n_a + 1) x2,
/// gamma/2 (2 n_a + 1) x2).  |kappa| keeps D positive in the loss-loss
/// comparison mode (kappa < 0).
inline DiffusionD diffusion_matrix(const ValidatedParams& vp) {
  const SystemParams& p = vp.get();
  const double mech = 0.5 * p.gamma_m * (2.0 * p.n_th + 1.0);
  const double cav1 = 0.5 * std::abs(p.kappa) * (2.0 * p.n_a + 1.0);
  const double cav2 = 0.5 * p.gamma * (2.0 * p.n_a + 1.0);
  DiffusionD d;
  d.d << mech, mech, cav1, cav1, cav2, cav2;
  return d;
}

/// Reduced 4x4 drift over (dx, dp, dI2, dphi2) for the single-cavity
/// configuration; exact when J = 0.
inline Matrix4d drift_single_cavity(const SteadyStateBranch& br, const ValidatedParams& vp,
                                    DriftMode mode = DriftMode::Corrected) {
  const Matrix6d a = drift_matrix(br, vp, mode).a;
  Matrix4d r;
  const int idx[4] = {0, 1, 4, 5};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r(i, j) = a(idx[i], idx[j]);
  return r;
}

inline Eigen::Vector4d diffusion_single_cavity(const ValidatedParams& vp) {
  const Vector6d d = diffusion_matrix(vp).d;
  Eigen::Vector4d r;
  r << d(0), d(1), d(4), d(5);
  return r;
}

/// Symplectic eigenvalues of a 2n x 2n covariance matrix: the moduli of the
/// eigenvalues of Omega V, with Omega the block-diagonal symplectic form.
template <int N>
inline std::vector<double> symplectic_eigenvalues(const Eigen::Matrix<double, N, N>& v) {
  static_assert(N % 2 == 0);
  Eigen::Matrix<double, N, N> omega = Eigen::Matrix<double, N, N>::Zero();
  for (int k = 0; k < N / 2; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  Eigen::ComplexEigenSolver<Eigen::Matrix<Complex, N, N>> solver(
      (omega * v).template cast<Complex>(), false);
  if (solver.info() != Eigen::Success) throw EigenFailure("symplectic eigensolve failed");
  std::vector<double> mods(N);
  for (int i = 0; i < N; ++i) mods[i] = std::abs(solver.eigenvalues()(i));
  std::sort(mods.begin(), mods.end());
  std::vector<double> nu(N / 2);
  for (int k = 0; k < N / 2; ++k) nu[k] = 0.5 * (mods[2 * k] + mods[2 * k + 1]);
  return nu;
}

/// Steady-state covariance matrix with solve diagnostics.
template <int N>
struct CovarianceResult {
  Eigen::Matrix<double, N, N> v;
  double residual = 0.0;           ///< ||A V + V A^T + D||_F
  double min_symplectic = 0.0;     ///< physicality watchdog; < 1/2 flags a CM
  bool physical = true;            ///< min_symplectic >= 1/2 - 1e-9
};

using CovarianceMatrix = CovarianceResult<6>;

/// Solves A V + V A^T = -D by direct vectorization: the N^2 x N^2 system
/// (I (x) A + A (x) I) vec(V) = -vec(D), followed by symmetrization.
template <int N>
inline CovarianceResult<N> solve_lyapunov(const Eigen::Matrix<double, N, N>& a,
                                          const Eigen::Matrix<double, N, 1>& d_diag) {
  for (int i = 0; i < N; ++i)
    if (!(d_diag(i) >= 0.0)) throw DomainError("D", "diffusion diagonal must be >= 0");

  {
    Eigen::EigenSolver<Eigen::Matrix<double, N, N>> es(a, false);
    if (es.info() != Eigen::Success) throw EigenFailure("drift eigensolve failed");
    if (es.eigenvalues().real().maxCoeff() >= 0.0)
      throw NotHurwitz("drift matrix has an eigenvalue with Re >= 0; no steady covariance");
  }

  constexpr int NN = N * N;
  Eigen::Matrix<double, NN, NN> k = Eigen::Matrix<double, NN, NN>::Zero();
  for (int j = 0; j < N; ++j) k.template block<N, N>(j * N, j * N) = a;  // I (x) A
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int r = 0; r < N; ++r) k(j * N + r, i * N + r) += a(j, i);  // A (x) I

  Eigen::Matrix<double, NN, 1> rhs = Eigen::Matrix<double, NN, 1>::Zero();
  for (int i = 0; i < N; ++i) rhs(i * N + i) = -d_diag(i);

  Eigen::PartialPivLU<Eigen::Matrix<double, NN, NN>> lu(k);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-14))
    throw IllConditioned("Lyapunov system condition estimate exceeds 1e14");
  Eigen::Matrix<double, NN, 1> x = lu.solve(rhs);

  // symmetrize-and-refine: keep the iterate in the symmetric subspace while
  // iterative refinement works down the backward error of the solve
  Eigen::Matrix<double, N, N> v;
  for (int pass = 0; pass < 3; ++pass) {
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < N; ++i) v(i, j) = x(j * N + i);
    v = 0.5 * (v + v.transpose()).eval();
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < N; ++i) x(j * N + i) = v(i, j);
    const Eigen::Matrix<double, NN, 1> r = k * x - rhs;
    if (r.norm() <= 1e-15 * rhs.norm()) break;
    x -= lu.solve(r);
  }

  CovarianceResult<N> out;
  out.v = v;
  const Eigen::Matrix<double, N, N> d = d_diag.asDiagonal();
  out.residual = (a * v + v * a.transpose() + d).norm();
  // near marginal stability ||V|| >> ||D|| and the attainable residual is
  // bounded below by the rounding floor eps ||A|| ||V||, so the contract is
  // the stated tolerance or that floor, whichever is larger
  const double attainable =
      8.0 * std::numeric_limits<double>::epsilon() * a.norm() * v.norm();
  if (!(out.residual <= std::max(1e-10 * d.norm(), attainable)))
    throw IllConditioned("Lyapunov residual exceeds 1e-10 ||D||_F");
  const auto nu = symplectic_eigenvalues<N>(v);
  out.min_symplectic = nu.front();
  out.physical = out.min_symplectic >= 0.5 - 1e-9;
  return out;
}

inline CovarianceMatrix solve_lyapunov(const DriftA& a, const DiffusionD& d) {
  return solve_lyapunov<6>(a.a, d.d);
}

}  // namespace ptomech
