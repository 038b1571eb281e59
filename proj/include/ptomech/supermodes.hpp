#pragma once

#include <complex>
#include <string>

#include "ptomech/params.hpp"

namespace ptomech {

/// Complex eigenfrequencies of the two purely optical supermodes.
struct SupermodePair {
  Complex omega_plus;   ///< branch with + sign of the principal radical
  Complex omega_minus;  ///< branch with - sign
};

enum class RegimeTag { BrokenPT, ExceptionalPoint, UnbrokenPT };

struct Regime {
  RegimeTag tag;
  double j_ep;  ///< critical tunneling rate (gamma + kappa)/4
};

inline const char* to_string(RegimeTag tag) {
  switch (tag) {
    case RegimeTag::BrokenPT: return "broken-PT";
    case RegimeTag::ExceptionalPoint: return "EP";
    case RegimeTag::UnbrokenPT: return "unbroken-PT";
  }
  return "?";
}

/// omega_pm = (4i*delta - (gamma - kappa) +/- sqrt((gamma + kappa)^2 - 16 J^2))/4.
/// Principal square root: the radical is real for J below the exceptional
/// point and positive imaginary above it, so the pair is continuous in J on
/// each side of the EP.
inline SupermodePair supermodes(const ValidatedParams& vp) {
  const SystemParams& p = vp.get();
  const double gk = p.gamma + p.kappa;
  const Complex radical = std::sqrt(Complex(gk * gk - 16.0 * p.J * p.J, 0.0));
  const Complex base(-(p.gamma - p.kappa), 4.0 * p.delta);
  return {0.25 * (base + radical), 0.25 * (base - radical)};
}

/// Three-way PT-regime classification against j_ep = (gamma + kappa)/4
/// with a symmetric tolerance band around the exceptional point.
inline Regime classify(const ValidatedParams& vp, double tol = 1e-9) {
  if (!(tol > 0.0)) throw DomainError("tol", "must be > 0");
  const SystemParams& p = vp.get();
  const double j_ep = 0.25 * (p.gamma + p.kappa);
  RegimeTag tag = RegimeTag::ExceptionalPoint;
  if (p.J > j_ep + tol)
    tag = RegimeTag::UnbrokenPT;
  else if (p.J < j_ep - tol)
    tag = RegimeTag::BrokenPT;
  return {tag, j_ep};
}

}  // namespace ptomech
