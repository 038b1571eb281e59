#pragma once

#include <cmath>
#include <string>

#include "ptomech/common.hpp"

namespace ptomech {

/// All rates are expressed in units of the passive-cavity loss rate gamma
/// (gamma == 1 after validation), drive amplitudes in units of sqrt(gamma).
/// Inputs may instead be given in any consistent unit system (e.g. SI angular
/// frequencies) together with gamma in the same unit; validate() rescales
/// everything so that gamma == 1.
struct SystemParams {
  double omega_m = 23.0;      ///< mechanical frequency (omega_m/2pi = 23 MHz at gamma/2pi = 1 MHz)
  double gamma = 1.0;         ///< passive-cavity loss rate; the normalization unit
  double kappa = 0.1;         ///< gain rate of cavity 1; negative switches to the loss-loss comparison mode
  double gamma_m = 1.63e-3;   ///< mechanical damping
  double g = 7.4e-5;          ///< single-photon optomechanical coupling
  double J = 0.8;             ///< optical tunneling rate between the cavities
  double delta = 23.0;        ///< drive detuning omega_p - omega_c (>= 0, blue-detuned); defaults to omega_m
  double chi = 0.0;           ///< parametric-amplifier gain inside the loss cavity
  double theta = 0.0;         ///< parametric-amplifier pump phase [rad]
  double alpha_in = 0.0;      ///< coherent drive amplitude, real >= 0, units sqrt(gamma)
  double n_th = 0.0;          ///< mechanical thermal occupation
  double n_a = 0.0;           ///< optical input occupation
};

/// Parameters that passed validate(); gamma is always exactly 1 here.
class ValidatedParams {
public:
  const SystemParams& get() const noexcept { return p_; }
  const SystemParams* operator->() const noexcept { return &p_; }

private:
  explicit ValidatedParams(const SystemParams& p) : p_(p) {}
  SystemParams p_;

  friend ValidatedParams validate(SystemParams params);
};

/// Checks all parameter invariants and rescales so that gamma == 1.
/// Throws DomainError naming the offending field.
inline ValidatedParams validate(SystemParams params) {
  auto require = [](bool ok, const char* field, const char* what) {
    if (!ok) throw DomainError(field, what);
  };
  auto finite = [](double v) { return std::isfinite(v); };

  require(finite(params.gamma) && params.gamma > 0.0, "gamma", "must be finite and > 0");
  require(finite(params.omega_m) && params.omega_m > 0.0, "omega_m", "must be finite and > 0");
  require(finite(params.gamma_m) && params.gamma_m > 0.0, "gamma_m", "must be finite and > 0");
  require(finite(params.g) && params.g >= 0.0, "g", "must be finite and >= 0");
  require(finite(params.J) && params.J >= 0.0, "J", "must be finite and >= 0");
  require(finite(params.kappa), "kappa", "must be finite");
  require(finite(params.chi) && params.chi >= 0.0, "chi", "must be finite and >= 0");
  require(finite(params.theta), "theta", "must be finite");
  require(finite(params.alpha_in) && params.alpha_in >= 0.0, "alpha_in", "must be finite and >= 0");
  require(finite(params.n_th) && params.n_th >= 0.0, "n_th", "must be finite and >= 0");
  require(finite(params.n_a) && params.n_a >= 0.0, "n_a", "must be finite and >= 0");
  // Blue-detuned convention: delta >= 0.  Zero is admitted as the degenerate
  // boundary so the purely optical supermode analysis stays reachable.
  require(finite(params.delta) && params.delta >= 0.0, "delta", "must be finite and >= 0 (blue-detuned)");

  if (params.gamma != 1.0) {
    const double s = params.gamma;
    params.omega_m /= s;
    params.kappa /= s;
    params.gamma_m /= s;
    params.g /= s;
    params.J /= s;
    params.delta /= s;
    params.chi /= s;
    params.alpha_in /= std::sqrt(s);
    params.gamma = 1.0;
  }
  return ValidatedParams(params);
}

/// Bose occupation n_th = 1/(exp(hbar*omega/kB*T) - 1) for an angular
/// frequency omega [rad/s] and temperature [K].  Returns 0 at T = 0.
inline double thermal_occupation(double omega_rad_per_s, double temperature_k) {
  if (!(omega_rad_per_s > 0.0)) throw DomainError("omega", "must be > 0");
  if (temperature_k < 0.0) throw DomainError("temperature", "must be >= 0");
  if (temperature_k == 0.0) return 0.0;
  constexpr double hbar = 1.054571817e-34;  // J s
  constexpr double k_b = 1.380649e-23;      // J/K
  const double x = hbar * omega_rad_per_s / (k_b * temperature_k);
  return 1.0 / std::expm1(x);
}

}  // namespace ptomech
