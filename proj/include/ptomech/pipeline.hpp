#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ptomech/covariance.hpp"
#include "ptomech/entanglement.hpp"

namespace ptomech {

struct PointOptions {
  JacobianMode jacobian_mode = JacobianMode::PaperLiteral;
  DriftMode drift_mode = DriftMode::Corrected;
  double margin = 1e-9;        ///< stability margin; marginal points count as unstable
  bool single_cavity = false;  ///< drop cavity 1 (conventional COM; requires J = 0)
  bool want_covariance = true; ///< skip the Lyapunov/negativity stage when false
};

/// Everything the pipeline produced for one steady-state branch.  The
/// covariance/negativity stage only runs for stable branches (the Lyapunov
/// equation needs a Hurwitz drift).
struct BranchOutcome {
  SteadyStateBranch branch;
  StabilityVerdict verdict;
  std::optional<double> min_symplectic;
  std::optional<NegativityResult> en_mech_cav1;
  std::optional<NegativityResult> en_mech_cav2;
  std::optional<NegativityResult> en_cav1_cav2;
  std::string error;  ///< per-branch failure tag; empty on success
};

struct PointResult {
  std::vector<BranchOutcome> branches;

  /// Index of the stable branch with the largest stability margin (ties
  /// broken by smallest n2); if none is stable, the branch closest to
  /// stability.  This is the `most_stable` selection rule.
  int most_stable() const {
    int best = 0;
    for (size_t i = 1; i < branches.size(); ++i) {
      const auto& a = branches[i];
      const auto& b = branches[best];
      if (a.verdict.max_re_lambda < b.verdict.max_re_lambda ||
          (a.verdict.max_re_lambda == b.verdict.max_re_lambda && a.branch.n2 < b.branch.n2))
        best = static_cast<int>(i);
    }
    return best;
  }
};

inline PointResult run_point(const ValidatedParams& vp, const PointOptions& opt = {}) {
  if (opt.single_cavity && vp->J != 0.0)
    throw DomainError("J", "single-cavity mode requires J = 0");

  PointResult out;
  for (const SteadyStateBranch& br : solve_branches(vp)) {
    BranchOutcome bo;
    bo.branch = br;
    try {
      if (opt.single_cavity)
        bo.verdict = is_stable<4>(jacobian_single_cavity(br, vp, opt.jacobian_mode), opt.margin);
      else
        bo.verdict = is_stable(jacobian(br, vp, opt.jacobian_mode), opt.margin);

      if (bo.verdict.stable && opt.want_covariance) {
        if (opt.single_cavity) {
          const auto cov = solve_lyapunov<4>(drift_single_cavity(br, vp, opt.drift_mode),
                                             diffusion_single_cavity(vp));
          bo.min_symplectic = cov.min_symplectic;
          bo.en_mech_cav2 = log_negativity(cov.v);
        } else {
          const auto cov =
              solve_lyapunov(drift_matrix(br, vp, opt.drift_mode), diffusion_matrix(vp));
          bo.min_symplectic = cov.min_symplectic;
          const PairwiseNegativity pw = pairwise_all(cov.v);
          bo.en_mech_cav1 = pw.mech_cav1;
          bo.en_mech_cav2 = pw.mech_cav2;
          bo.en_cav1_cav2 = pw.cav1_cav2;
        }
      }
    } catch (const NumericalError& e) {
      bo.error = e.what();
    }
    out.branches.push_back(std::move(bo));
  }
  return out;
}

}  // namespace ptomech
