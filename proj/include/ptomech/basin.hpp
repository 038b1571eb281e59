#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ptomech/grid.hpp"
#include "ptomech/parallel.hpp"
#include "ptomech/stability.hpp"

namespace ptomech {

enum class BranchRule { AnyStable, AllBranches };

struct BasinCell {
  double x = 0.0;
  double y = 0.0;
  int branch_count = 0;
  int stable = -1;  ///< 1 stable, 0 unstable, -1 undefined (per-point solver failure)
  double max_re_lambda = std::numeric_limits<double>::quiet_NaN();
};

/// Location of the exceptional-point contour J = (gamma + kappa)/4 relative
/// to the grid axes.
struct EpContour {
  std::string axis;   ///< "J", "kappa", or "line" when both are axes
  double value = 0.0; ///< contour coordinate on `axis` (unused for "line")
};

struct StabilityMap {
  AxisSpec x_axis;
  AxisSpec y_axis;
  std::vector<BasinCell> cells;  ///< row-major: y outer, x inner
  EpContour ep;
  int nx = 0;
  int ny = 0;

  double unstable_fraction() const {
    long unstable = 0, defined = 0;
    for (const auto& c : cells)
      if (c.stable >= 0) {
        ++defined;
        if (c.stable == 0) ++unstable;
      }
    return defined > 0 ? static_cast<double>(unstable) / defined : 0.0;
  }
};

/// Grid of stability verdicts over two of {alpha_in, J, kappa}.  Per-point
/// failures are recorded as undefined cells and never abort the grid.
inline StabilityMap basin(const SystemParams& tmpl, const AxisSpec& x_axis, const AxisSpec& y_axis,
                          BranchRule rule = BranchRule::AnyStable, double margin = 1e-9,
                          int workers = 0) {
  x_axis.check();
  y_axis.check();
  if (x_axis.param == y_axis.param) throw SpecError("axes", "basin axes must be distinct");
  for (const AxisSpec* ax : {&x_axis, &y_axis})
    if (ax->param == SweepParam::Chi || ax->param == SweepParam::NTh)
      throw SpecError("axes", "basin axes must be one of alpha_in, J, kappa");
  if (workers <= 0) workers = default_workers();

  StabilityMap map;
  map.x_axis = x_axis;
  map.y_axis = y_axis;
  map.nx = x_axis.effective_steps();
  map.ny = y_axis.effective_steps();
  map.cells.resize(static_cast<size_t>(map.nx) * map.ny);

  const bool has_j = x_axis.param == SweepParam::J || y_axis.param == SweepParam::J;
  const bool has_kappa = x_axis.param == SweepParam::Kappa || y_axis.param == SweepParam::Kappa;
  if (has_j && has_kappa)
    map.ep = {"line", 0.0};
  else if (has_j)
    map.ep = {"J", 0.25 * (tmpl.gamma + tmpl.kappa)};
  else
    map.ep = {"kappa", 4.0 * tmpl.J - tmpl.gamma};

  parallel_for(static_cast<long>(map.cells.size()), workers, [&](long idx) {
    const int iy = static_cast<int>(idx) / map.nx;
    const int ix = static_cast<int>(idx) % map.nx;
    BasinCell cell;
    cell.x = x_axis.value(ix);
    cell.y = y_axis.value(iy);
    try {
      SystemParams p = tmpl;
      set_sweep_param(p, x_axis.param, cell.x);
      set_sweep_param(p, y_axis.param, cell.y);
      const ValidatedParams vp = validate(p);
      const auto branches = solve_branches(vp);
      cell.branch_count = static_cast<int>(branches.size());
      bool any_stable = false, all_stable = true;
      double best = std::numeric_limits<double>::infinity();
      double worst = -std::numeric_limits<double>::infinity();
      for (const auto& br : branches) {
        const StabilityVerdict v = is_stable(jacobian(br, vp), margin);
        any_stable |= v.stable;
        all_stable &= v.stable;
        best = std::min(best, v.max_re_lambda);
        worst = std::max(worst, v.max_re_lambda);
      }
      if (rule == BranchRule::AnyStable) {
        cell.stable = any_stable ? 1 : 0;
        cell.max_re_lambda = best;
      } else {
        cell.stable = all_stable ? 1 : 0;
        cell.max_re_lambda = worst;
      }
    } catch (const std::runtime_error&) {
      cell.stable = -1;  // undefined cell
    }
    map.cells[idx] = cell;
  });
  return map;
}

}  // namespace ptomech
