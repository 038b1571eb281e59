#pragma once

#include <cmath>
#include <string>

#include "ptomech/params.hpp"

namespace ptomech {

enum class SweepParam { AlphaIn, J, Kappa, Chi, NTh };
enum class AxisScale { Linear, Log };

inline const char* to_string(SweepParam p) {
  switch (p) {
    case SweepParam::AlphaIn: return "alpha_in";
    case SweepParam::J: return "J";
    case SweepParam::Kappa: return "kappa";
    case SweepParam::Chi: return "chi";
    case SweepParam::NTh: return "n_th";
  }
  return "?";
}

inline SweepParam sweep_param_from_string(const std::string& s) {
  if (s == "alpha_in") return SweepParam::AlphaIn;
  if (s == "J" || s == "j") return SweepParam::J;
  if (s == "kappa") return SweepParam::Kappa;
  if (s == "chi") return SweepParam::Chi;
  if (s == "n_th") return SweepParam::NTh;
  throw DomainError("axis", "unknown sweep parameter '" + s + "'");
}

inline void set_sweep_param(SystemParams& p, SweepParam which, double value) {
  switch (which) {
    case SweepParam::AlphaIn: p.alpha_in = value; break;
    case SweepParam::J: p.J = value; break;
    case SweepParam::Kappa: p.kappa = value; break;
    case SweepParam::Chi: p.chi = value; break;
    case SweepParam::NTh: p.n_th = value; break;
  }
}

/// One sweep/basin axis: `steps` samples from min to max, linear or
/// log-spaced.  Equal bounds collapse to a single grid point.
struct AxisSpec {
  SweepParam param = SweepParam::AlphaIn;
  double min = 0.0;
  double max = 0.0;
  int steps = 2;
  AxisScale scale = AxisScale::Linear;

  void check() const {
    if (steps < 2) throw SpecError("steps", "axis needs >= 2 steps");
    if (!(min <= max)) throw SpecError("axis", "min must be <= max");
    if (scale == AxisScale::Log && !(min > 0.0))
      throw SpecError("axis", "log scale requires min > 0");
  }

  int effective_steps() const { return min == max ? 1 : steps; }

  double value(int i) const {
    if (min == max) return min;
    const double f = static_cast<double>(i) / (steps - 1);
    if (scale == AxisScale::Log) return min * std::pow(max / min, f);
    return min + f * (max - min);
  }
};

}  // namespace ptomech
