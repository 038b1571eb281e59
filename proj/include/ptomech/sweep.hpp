#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ptomech/grid.hpp"
#include "ptomech/parallel.hpp"
#include "ptomech/pipeline.hpp"

namespace ptomech {

enum class BranchPolicy { MostStable, All };

inline const std::vector<std::string>& sweep_field_names() {
  static const std::vector<std::string> names = {
      "branch_index", "branch_count",  "n2",           "delta_tilde",    "g1",
      "g2",           "stable",        "max_re_lambda", "en_mech_cav1",  "en_mech_cav2",
      "en_cav1_cav2", "min_symplectic", "error"};
  return names;
}

struct SweepSpec {
  SystemParams template_params;
  std::vector<AxisSpec> axes;  ///< one or two
  BranchPolicy policy = BranchPolicy::MostStable;
  bool single_cavity = false;
  std::vector<std::string> outputs;  ///< field selection; empty keeps every column
  PointOptions point;

  void check() const {
    if (axes.empty() || axes.size() > 2) throw SpecError("axes", "need 1 or 2 sweep axes");
    for (const auto& ax : axes) ax.check();
    if (axes.size() == 2 && axes[0].param == axes[1].param)
      throw SpecError("axes", "sweep axes must be distinct");
    const auto& known = sweep_field_names();
    for (const auto& name : outputs)
      if (std::find(known.begin(), known.end(), name) == known.end())
        throw SpecError("outputs", "unknown output field '" + name + "'");
  }

  bool wants(const char* field) const {
    return outputs.empty() || std::find(outputs.begin(), outputs.end(), field) != outputs.end();
  }
};

/// One output row: grid coordinates plus the per-branch pipeline results.
/// The negativity fields are set only when the branch is stable.
struct SweepRecord {
  std::vector<double> axis_values;
  int branch_index = 0;
  int branch_count = 0;
  double n2 = std::numeric_limits<double>::quiet_NaN();
  double delta_tilde = std::numeric_limits<double>::quiet_NaN();
  double g1 = std::numeric_limits<double>::quiet_NaN();
  double g2 = std::numeric_limits<double>::quiet_NaN();
  int stable = -1;  ///< 1/0; -1 when the point failed outright
  double max_re_lambda = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> en_mech_cav1;
  std::optional<double> en_mech_cav2;
  std::optional<double> en_cav1_cav2;
  std::optional<double> min_symplectic;
  std::string error;
};

namespace detail {

inline SweepRecord record_from_outcome(const BranchOutcome& bo, std::vector<double> axis_values,
                                       int index, int count) {
  SweepRecord r;
  r.axis_values = std::move(axis_values);
  r.branch_index = index;
  r.branch_count = count;
  r.n2 = bo.branch.n2;
  r.delta_tilde = bo.branch.delta_tilde;
  r.g1 = bo.branch.g1;
  r.g2 = bo.branch.g2;
  r.stable = bo.verdict.stable ? 1 : 0;
  r.max_re_lambda = bo.verdict.max_re_lambda;
  if (bo.en_mech_cav1) r.en_mech_cav1 = bo.en_mech_cav1->e_n;
  if (bo.en_mech_cav2) r.en_mech_cav2 = bo.en_mech_cav2->e_n;
  if (bo.en_cav1_cav2) r.en_cav1_cav2 = bo.en_cav1_cav2->e_n;
  r.min_symplectic = bo.min_symplectic;
  r.error = bo.error;
  return r;
}

}  // namespace detail

/// Runs the full steady-state -> stability -> covariance -> entanglement
/// pipeline over the grid.  Deterministic row-major ordering (last axis
/// fastest); per-point failures are recorded, never aborting the sweep.
inline std::vector<SweepRecord> run_sweep(const SweepSpec& spec, int workers = 0) {
  spec.check();
  if (workers <= 0) workers = default_workers();

  const int n0 = spec.axes[0].effective_steps();
  const int n1 = spec.axes.size() == 2 ? spec.axes[1].effective_steps() : 1;
  const long total = static_cast<long>(n0) * n1;

  std::vector<std::vector<SweepRecord>> per_point(total);
  parallel_for(total, workers, [&](long idx) {
    const int i0 = static_cast<int>(idx) / n1;
    const int i1 = static_cast<int>(idx) % n1;
    std::vector<double> axis_values{spec.axes[0].value(i0)};
    if (spec.axes.size() == 2) axis_values.push_back(spec.axes[1].value(i1));

    std::vector<SweepRecord> rows;
    try {
      SystemParams p = spec.template_params;
      set_sweep_param(p, spec.axes[0].param, axis_values[0]);
      if (spec.axes.size() == 2) set_sweep_param(p, spec.axes[1].param, axis_values[1]);
      if (spec.single_cavity) p.J = 0.0;
      const ValidatedParams vp = validate(p);
      PointOptions opt = spec.point;
      opt.single_cavity = spec.single_cavity;
      const PointResult res = run_point(vp, opt);
      const int count = static_cast<int>(res.branches.size());
      if (spec.policy == BranchPolicy::MostStable) {
        const int pick = res.most_stable();
        rows.push_back(detail::record_from_outcome(res.branches[pick], axis_values, pick, count));
      } else {
        for (int b = 0; b < count; ++b)
          rows.push_back(detail::record_from_outcome(res.branches[b], axis_values, b, count));
      }
    } catch (const std::runtime_error& e) {
      SweepRecord r;
      r.axis_values = axis_values;
      r.error = e.what();
      rows.push_back(std::move(r));
    }
    per_point[idx] = std::move(rows);
  });

  std::vector<SweepRecord> out;
  out.reserve(total);
  for (auto& rows : per_point)
    for (auto& r : rows) out.push_back(std::move(r));
  return out;
}

/// Built-in sweep/basin recipes for the standard figure layouts.  Fixed
/// parameters are baked in; free curve values (middle J points,
/// chi levels, axis ranges) are project defaults.
inline SweepSpec figure_preset(const std::string& name) {
  SystemParams base;  // omega_m = 23, gamma_m = 1.63e-3, g = 7.4e-5, delta = omega_m
  base.alpha_in = 0.0;
  base.chi = 0.0;
  base.n_th = 0.0;
  base.n_a = 0.0;

  auto axis = [](SweepParam p, double lo, double hi, int n, AxisScale s) {
    AxisSpec a;
    a.param = p;
    a.min = lo;
    a.max = hi;
    a.steps = n;
    a.scale = s;
    return a;
  };
  const AxisSpec drive_wide = axis(SweepParam::AlphaIn, 1.0, 1e5, 200, AxisScale::Log);
  const AxisSpec drive = axis(SweepParam::AlphaIn, 1.0, 1e4, 120, AxisScale::Log);
  const AxisSpec chi_levels = axis(SweepParam::Chi, 0.0, 0.2, 3, AxisScale::Linear);

  SweepSpec s;
  s.template_params = base;
  if (name == "fig1a" || name == "fig1b") {
    s.template_params.kappa = name == "fig1a" ? 0.1 : 0.8;
    s.axes = {drive_wide, axis(SweepParam::J, 0.0, 1.5, 200, AxisScale::Linear)};
  } else if (name == "fig1c" || name == "fig1d") {
    s.template_params.J = name == "fig1c" ? 0.2 : 1.0;
    s.axes = {drive_wide, axis(SweepParam::Kappa, 0.0, 1.0, 200, AxisScale::Linear)};
  } else if (name == "fig2ab") {
    s.template_params.J = 0.8;
    s.axes = {drive_wide, axis(SweepParam::Kappa, 0.1, 0.8, 2, AxisScale::Linear)};
  } else if (name == "fig3a") {
    s.single_cavity = true;
    s.template_params.J = 0.0;
    s.axes = {drive};
  } else if (name == "fig3b") {
    s.template_params.kappa = 0.1;
    s.axes = {drive, axis(SweepParam::J, 0.34, 1.0, 4, AxisScale::Linear)};
  } else if (name == "fig3c") {
    s.template_params.kappa = 1e-5;
    s.template_params.J = 1.0;
    s.axes = {drive, chi_levels};
  } else if (name == "fig3d") {
    s.template_params.kappa = 1e-5;
    s.template_params.alpha_in = 3e3;
    s.axes = {axis(SweepParam::J, 0.05, 1.5, 120, AxisScale::Linear), chi_levels};
  } else if (name == "fig4") {
    s.template_params.kappa = 1e-5;
    s.template_params.J = 0.8;
    s.template_params.alpha_in = 3e3;
    s.template_params.n_a = 1e-3;
    s.axes = {axis(SweepParam::NTh, 0.0, 600.0, 121, AxisScale::Linear), chi_levels};
  } else if (name == "fig6a" || name == "fig6c") {
    s.template_params.J = 1.0;
    s.axes = {drive_wide, axis(SweepParam::Kappa, -0.1, 0.1, 2, AxisScale::Linear)};
  } else if (name == "fig6b") {
    s.template_params.J = 1.0;
    s.axes = {drive_wide, axis(SweepParam::Kappa, -0.8, 0.8, 2, AxisScale::Linear)};
  } else if (name == "fig6d") {
    s.template_params.J = 0.8;
    s.axes = {drive_wide, axis(SweepParam::Kappa, -0.1, 0.1, 2, AxisScale::Linear)};
  } else {
    throw UnknownPreset(name);
  }
  return s;
}

inline const std::vector<std::string>& figure_preset_names() {
  static const std::vector<std::string> names = {"fig1a", "fig1b", "fig1c", "fig1d", "fig2ab",
                                                 "fig3a", "fig3b", "fig3c", "fig3d", "fig4",
                                                 "fig6a", "fig6b", "fig6c", "fig6d"};
  return names;
}

}  // namespace ptomech
