#pragma once

#include <array>
#include <cmath>
#include <string>

#include "ptomech/covariance.hpp"

namespace ptomech {

enum class Mode { Mech = 0, Cav1 = 1, Cav2 = 2 };

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::Mech: return "mech";
    case Mode::Cav1: return "cav1";
    case Mode::Cav2: return "cav2";
  }
  return "?";
}

/// Unordered pair of distinct modes; E_N is symmetric under swap.
struct ModePair {
  Mode k;
  Mode l;
};

struct NegativityResult {
  double e_n = 0.0;    ///< logarithmic negativity, natural-log units
  double eta = 0.0;    ///< lowest symplectic eigenvalue of the partial transpose
  double sigma = 0.0;  ///< det V_k + det V_l - 2 det V_kl
};

/// Extracts the 4x4 two-mode covariance block for the given pair.
inline Matrix4d submatrix(const Matrix6d& v, ModePair pair) {
  if (pair.k == pair.l) throw DomainError("pair", "modes must be distinct");
  const int rk = 2 * static_cast<int>(pair.k);
  const int rl = 2 * static_cast<int>(pair.l);
  Matrix4d s;
  s.block<2, 2>(0, 0) = v.block<2, 2>(rk, rk);
  s.block<2, 2>(2, 2) = v.block<2, 2>(rl, rl);
  s.block<2, 2>(0, 2) = v.block<2, 2>(rk, rl);
  s.block<2, 2>(2, 0) = v.block<2, 2>(rk, rl).transpose();
  return s;
}

/// E_N = max(0, -ln 2 eta) with eta = sqrt((Sigma - sqrt(Sigma^2 - 4 det V_S))/2)
/// and Sigma = det V_k + det V_l - 2 det V_kl.  Tiny negative discriminants
/// (numerical dust from the Lyapunov solve) are clamped; anything beyond the
/// tolerance is surfaced as NonPhysical.
inline NegativityResult log_negativity(const Matrix4d& v_s) {
  const double det_k = v_s.block<2, 2>(0, 0).determinant();
  const double det_l = v_s.block<2, 2>(2, 2).determinant();
  const double det_c = v_s.block<2, 2>(0, 2).determinant();
  const double det_vs = v_s.determinant();
  const double sigma = det_k + det_l - 2.0 * det_c;

  const double tol = 1e-12 * std::max(1.0, sigma * sigma);
  if (det_vs < -tol)
    throw NonPhysical("det V_S = " + std::to_string(det_vs) + " < 0: unphysical covariance");

  double disc = sigma * sigma - 4.0 * det_vs;
  if (disc < 0.0) {
    if (disc < -tol) throw NonPhysical("Sigma^2 - 4 det V_S < 0 beyond tolerance");
    disc = 0.0;
  }
  const double inner = 0.5 * (sigma - std::sqrt(disc));
  if (!(inner > 0.0)) throw NonPhysical("partial-transpose symplectic eigenvalue not positive");

  NegativityResult r;
  r.sigma = sigma;
  r.eta = std::sqrt(inner);
  // 2 eta within 1e-12 of the separability boundary counts as separable, so
  // products of thermal states come out exactly 0 despite rounding dust.
  const double two_eta = 2.0 * r.eta;
  r.e_n = two_eta >= 1.0 - 1e-12 ? 0.0 : -std::log(two_eta);
  return r;
}

/// All three bipartite negativities computed from the same 6x6 CM, indexed by
/// the excluded mode: [0] mech-cav1, [1] mech-cav2, [2] cav1-cav2.
struct PairwiseNegativity {
  NegativityResult mech_cav1;
  NegativityResult mech_cav2;
  NegativityResult cav1_cav2;
};

inline PairwiseNegativity pairwise_all(const Matrix6d& v) {
  PairwiseNegativity out;
  out.mech_cav1 = log_negativity(submatrix(v, {Mode::Mech, Mode::Cav1}));
  out.mech_cav2 = log_negativity(submatrix(v, {Mode::Mech, Mode::Cav2}));
  out.cav1_cav2 = log_negativity(submatrix(v, {Mode::Cav1, Mode::Cav2}));
  return out;
}

}  // namespace ptomech
