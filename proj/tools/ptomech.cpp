// ptomech: gain-loss coupled-cavity optomechanics simulator.
// Subcommands cover each pipeline stage: supermode spectrum, mean-field
// steady states, linear stability, stability basins, time integration,
// steady-state covariance, logarithmic negativity, and parameter sweeps.
// All rates are in units of the passive-cavity loss gamma; amplitudes in
// sqrt(gamma). Exit codes: 0 success, 1 invalid request, 2 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ptomech/ptomech.hpp"

namespace {

using namespace ptomech;
using nlohmann::json;

struct ParamCli {
  std::string params_file;
  std::optional<double> omega_m, gamma, kappa, gamma_m, g, j, delta, chi, theta, alpha_in, n_th,
      n_a;
};

void add_param_options(CLI::App* cmd, ParamCli& pc) {
  cmd->add_option("--params", pc.params_file,
                  "JSON parameter file (flat object; gamma-normalized or SI plus gamma)");
  auto bind = [cmd](const char* name, std::optional<double>& slot, const std::string& desc) {
    cmd->add_option_function<double>(name, [&slot](double v) { slot = v; }, desc);
  };
  bind("--omega-m", pc.omega_m, "mechanical frequency [gamma] (default 23)");
  bind("--gamma", pc.gamma,
       "loss rate of cavity 2; the unit everything is normalized to (default 1)");
  bind("--kappa", pc.kappa, "gain rate of cavity 1 [gamma]; negative = loss-loss mode (default 0.1)");
  bind("--gamma-m", pc.gamma_m, "mechanical damping [gamma] (default 1.63e-3)");
  bind("--g", pc.g, "single-photon optomechanical coupling [gamma] (default 7.4e-5)");
  bind("--j", pc.j, "optical tunneling rate [gamma] (default 0.8)");
  bind("--delta", pc.delta, "drive detuning omega_p - omega_c [gamma], >= 0 (default omega_m)");
  bind("--chi", pc.chi, "parametric-amplifier gain [gamma] (default 0)");
  bind("--theta", pc.theta, "parametric-amplifier pump phase [rad] (default 0)");
  bind("--alpha-in", pc.alpha_in, "coherent drive amplitude [sqrt(gamma)] (default 0)");
  bind("--n-th", pc.n_th, "mechanical thermal occupation (default 0)");
  bind("--n-a", pc.n_a, "optical input occupation (default 0)");
}

SystemParams resolve_params(const ParamCli& pc) {
  SystemParams p;
  if (!pc.params_file.empty()) p = params_from_json_file(pc.params_file, p);
  if (pc.omega_m) p.omega_m = *pc.omega_m;
  if (pc.gamma) p.gamma = *pc.gamma;
  if (pc.kappa) p.kappa = *pc.kappa;
  if (pc.gamma_m) p.gamma_m = *pc.gamma_m;
  if (pc.g) p.g = *pc.g;
  if (pc.j) p.J = *pc.j;
  if (pc.delta)
    p.delta = *pc.delta;
  else if (pc.omega_m && pc.params_file.empty())
    p.delta = *pc.omega_m;  // keep the blue-sideband default tied to omega_m
  if (pc.chi) p.chi = *pc.chi;
  if (pc.theta) p.theta = *pc.theta;
  if (pc.alpha_in) p.alpha_in = *pc.alpha_in;
  if (pc.n_th) p.n_th = *pc.n_th;
  if (pc.n_a) p.n_a = *pc.n_a;
  return p;
}

void write_output(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::fwrite(content.data(), 1, content.size(), stdout);
    if (!content.empty() && content.back() != '\n') std::fputc('\n', stdout);
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw DomainError("out", "cannot open '" + out_path + "' for writing");
  out << content;
}

json complex_json(const Complex& z) { return {{"re", z.real()}, {"im", z.imag()}}; }

AxisSpec parse_axis(const std::string& text) {
  std::stringstream ss(text);
  std::string field;
  std::vector<std::string> fields;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (fields.size() != 5)
    throw SpecError("axis", "expected param,min,max,steps,scale in '" + text + "'");
  AxisSpec a;
  a.param = sweep_param_from_string(fields[0]);
  try {
    a.min = std::stod(fields[1]);
    a.max = std::stod(fields[2]);
    a.steps = std::stoi(fields[3]);
  } catch (const std::exception&) {
    throw SpecError("axis", "non-numeric bound in '" + text + "'");
  }
  if (fields[4] == "log")
    a.scale = AxisScale::Log;
  else if (fields[4] == "linear")
    a.scale = AxisScale::Linear;
  else
    throw SpecError("axis", "scale must be linear or log in '" + text + "'");
  a.check();
  return a;
}

json branch_outcome_json(const BranchOutcome& bo) {
  json j;
  j["branch"] = branch_to_json(bo.branch);
  j["stable"] = bo.verdict.stable;
  j["max_re_lambda"] = bo.verdict.max_re_lambda;
  json eigs = json::array();
  for (int i = 0; i < bo.verdict.n_eigenvalues; ++i)
    eigs.push_back(complex_json(bo.verdict.eigenvalues[i]));
  j["eigenvalues"] = eigs;
  if (bo.min_symplectic) j["min_symplectic_eig"] = *bo.min_symplectic;
  auto pair = [](const NegativityResult& r) {
    return json{{"e_n", r.e_n}, {"eta", r.eta}, {"sigma", r.sigma}};
  };
  if (bo.en_mech_cav1 || bo.en_mech_cav2 || bo.en_cav1_cav2) {
    json pairs;
    if (bo.en_mech_cav1) pairs["mech_cav1"] = pair(*bo.en_mech_cav1);
    if (bo.en_mech_cav2) pairs["mech_cav2"] = pair(*bo.en_mech_cav2);
    if (bo.en_cav1_cav2) pairs["cav1_cav2"] = pair(*bo.en_cav1_cav2);
    j["pairs"] = pairs;
  }
  if (!bo.error.empty()) j["error"] = bo.error;
  return j;
}

// Shared input for the stability/covariance/entangle stages, either computed
// from parameters or replayed bit-exactly from a `steady --format json` stream.
struct StageInput {
  ValidatedParams vp;
  std::vector<SteadyStateBranch> branches;
};

StageInput stage_input(const ParamCli& pc, bool from_stdin, bool single_cavity) {
  if (from_stdin) {
    json j;
    try {
      std::cin >> j;
    } catch (const json::exception& e) {
      throw DomainError("stdin", std::string("cannot parse steady JSON: ") + e.what());
    }
    SystemParams p = params_from_json(j.at("params"));
    if (single_cavity) p.J = 0.0;
    ValidatedParams vp = validate(p);
    std::vector<SteadyStateBranch> branches;
    for (const auto& bj : j.at("branches")) branches.push_back(branch_from_json(bj));
    if (branches.empty()) throw DomainError("stdin", "no branches in input");
    return {vp, std::move(branches)};
  }
  SystemParams p = resolve_params(pc);
  if (single_cavity) p.J = 0.0;
  ValidatedParams vp = validate(p);
  auto branches = solve_branches(vp);
  return {vp, std::move(branches)};
}

int most_stable_index(const StageInput& in, double margin) {
  int best = 0;
  double best_re = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < in.branches.size(); ++i) {
    const auto v = is_stable(jacobian(in.branches[i], in.vp), margin);
    if (v.max_re_lambda < best_re) {
      best_re = v.max_re_lambda;
      best = static_cast<int>(i);
    }
  }
  return best;
}

int run(int argc, char** argv) {
  CLI::App app{
      "ptomech: PT-symmetric coupled-cavity optomechanics pipeline\n"
      "Units: rates in multiples of the passive loss gamma, drive amplitudes in sqrt(gamma)."};
  app.require_subcommand(1);

  std::string out_path;
  std::string format;
  int workers = 0;

  auto add_common = [&](CLI::App* cmd, ParamCli& pc) {
    add_param_options(cmd, pc);
    cmd->add_option("--out", out_path, "output file (default stdout)");
    cmd->add_option("--format", format, "output format: json or csv");
  };

  auto* sm_cmd = app.add_subcommand("supermodes", "optical supermode spectrum and PT regime");
  ParamCli sm_pc;
  double sm_tol = 1e-9;
  add_common(sm_cmd, sm_pc);
  sm_cmd->add_option("--tol", sm_tol, "EP classification tolerance [gamma] (default 1e-9)");

  auto* st_cmd = app.add_subcommand("steady", "self-consistent mean-field steady states");
  ParamCli st_pc;
  add_common(st_cmd, st_pc);

  auto* sb_cmd = app.add_subcommand("stability", "Jacobian eigenvalues and verdict per branch");
  ParamCli sb_pc;
  double sb_margin = 1e-9;
  bool sb_phase_exact = false, sb_stdin = false;
  add_common(sb_cmd, sb_pc);
  sb_cmd->add_option("--margin", sb_margin, "stability margin [gamma] (default 1e-9)");
  sb_cmd->add_flag("--phase-exact", sb_phase_exact,
                   "keep steady-state phases in the Jacobian instead of magnitudes");
  sb_cmd->add_flag("--stdin", sb_stdin, "read `steady --format json` output from stdin");

  auto* ba_cmd = app.add_subcommand("basin", "stability basin over two parameters");
  ParamCli ba_pc;
  std::string ba_x = "alpha_in,1,1e5,200,log", ba_y = "J,0,1.5,200,linear", ba_rule = "any",
              ba_preset;
  double ba_margin = 1e-9;
  add_common(ba_cmd, ba_pc);
  ba_cmd->add_option("--x", ba_x,
                     "x axis as param,min,max,steps,scale (default alpha_in,1,1e5,200,log)");
  ba_cmd->add_option("--y", ba_y,
                     "y axis as param,min,max,steps,scale (default J,0,1.5,200,linear)");
  ba_cmd->add_option("--rule", ba_rule, "any (any stable branch) or all (default any)");
  ba_cmd->add_option("--margin", ba_margin, "stability margin [gamma] (default 1e-9)");
  ba_cmd->add_option("--preset", ba_preset, "fig1a|fig1b|fig1c|fig1d axes and template");
  ba_cmd->add_option("--workers", workers, "worker threads (default PTOMECH_WORKERS or hardware)");

  auto* dy_cmd = app.add_subcommand("dynamics", "integrate the noise-free mean-field equations");
  ParamCli dy_pc;
  double dy_tend = 2000.0, dy_rtol = 1e-6, dy_atol = 1e-9, dy_prel = 0.01, dy_pabs = 0.0;
  int dy_every = 1, dy_branch = -1;
  std::vector<double> dy_initial;
  bool dy_summary = false;
  add_common(dy_cmd, dy_pc);
  dy_cmd->add_option("--t-end", dy_tend, "integration horizon [1/gamma] (default 2000)");
  dy_cmd->add_option("--rtol", dy_rtol, "relative tolerance (default 1e-6)");
  dy_cmd->add_option("--atol", dy_atol, "absolute tolerance (default 1e-9)");
  dy_cmd->add_option("--record-every", dy_every, "keep every k-th accepted step (default 1)");
  dy_cmd->add_option("--branch", dy_branch, "start branch index (default: most stable)");
  dy_cmd->add_option("--initial", dy_initial, "explicit start state a1re a1im a2re a2im bre bim")
      ->expected(6);
  dy_cmd->add_option("--perturb-rel", dy_prel, "relative branch perturbation (default 0.01)");
  dy_cmd->add_option("--perturb-abs", dy_pabs, "absolute branch perturbation (default 0)");
  dy_cmd->add_flag("--summary", dy_summary,
                   "print a JSON classification summary instead of the trajectory CSV");

  auto* cv_cmd =
      app.add_subcommand("covariance", "steady-state covariance via the Lyapunov equation");
  ParamCli cv_pc;
  bool cv_paper_literal = false, cv_stdin = false, cv_single = false;
  int cv_branch = -1;
  double cv_margin = 1e-9;
  add_common(cv_cmd, cv_pc);
  cv_cmd->add_flag("--paper-literal-a", cv_paper_literal,
                   "drift-matrix variant with the bare detuning delta at entry (6,5)");
  cv_cmd->add_flag("--stdin", cv_stdin, "read `steady --format json` output from stdin");
  cv_cmd->add_flag("--single-cavity", cv_single, "conventional COM: drop cavity 1 (forces J = 0)");
  cv_cmd->add_option("--branch", cv_branch, "branch index (default: most stable)");
  cv_cmd->add_option("--margin", cv_margin, "stability margin [gamma] (default 1e-9)");

  auto* en_cmd = app.add_subcommand("entangle", "logarithmic negativity of all mode pairs");
  ParamCli en_pc;
  bool en_stdin = false, en_single = false, en_paper_literal = false;
  int en_branch = -1;
  double en_margin = 1e-9;
  add_common(en_cmd, en_pc);
  en_cmd->add_flag("--stdin", en_stdin, "read `steady --format json` output from stdin");
  en_cmd->add_flag("--single-cavity", en_single, "conventional COM: drop cavity 1 (forces J = 0)");
  en_cmd->add_flag("--paper-literal-a", en_paper_literal, "drift-matrix variant with the bare detuning delta at entry (6,5)");
  en_cmd->add_option("--branch", en_branch, "branch index (default: most stable)");
  en_cmd->add_option("--margin", en_margin, "stability margin [gamma] (default 1e-9)");

  auto* sw_cmd = app.add_subcommand("sweep", "grid sweep of the full pipeline");
  ParamCli sw_pc;
  std::string sw_preset, sw_axis1, sw_axis2, sw_policy = "most_stable", sw_outputs;
  bool sw_single = false;
  add_common(sw_cmd, sw_pc);
  sw_cmd->add_option("--preset", sw_preset,
                     "figure preset: fig1a-fig1d, fig2ab, fig3a-fig3d, fig4, fig6a-fig6d");
  sw_cmd->add_option("--axis1", sw_axis1, "first axis as param,min,max,steps,scale");
  sw_cmd->add_option("--axis2", sw_axis2, "second axis as param,min,max,steps,scale");
  sw_cmd->add_option("--policy", sw_policy, "most_stable or all (default most_stable)");
  sw_cmd->add_flag("--single-cavity", sw_single, "conventional COM: drop cavity 1");
  sw_cmd->add_option("--outputs", sw_outputs,
                     "comma-separated output field selection (default: all fields)");
  sw_cmd->add_option("--workers", workers, "worker threads (default PTOMECH_WORKERS or hardware)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (!format.empty() && format != "csv" && format != "json")
      throw DomainError("format", "must be csv or json");
    if (*sm_cmd) {
      const ValidatedParams vp = validate(resolve_params(sm_pc));
      const SupermodePair sm = supermodes(vp);
      const Regime regime = classify(vp, sm_tol);
      if (format == "csv") {
        std::string csv = "omega_plus_re,omega_plus_im,omega_minus_re,omega_minus_im,j_ep,regime\n";
        for (double v : {sm.omega_plus.real(), sm.omega_plus.imag(), sm.omega_minus.real(),
                         sm.omega_minus.imag(), regime.j_ep})
          csv += format_double(v) + ",";
        csv += to_string(regime.tag);
        write_output(out_path, csv + "\n");
      } else {
        json j{{"omega_plus", complex_json(sm.omega_plus)},
               {"omega_minus", complex_json(sm.omega_minus)},
               {"j_ep", regime.j_ep},
               {"regime", to_string(regime.tag)}};
        write_output(out_path, j.dump(2));
      }
    } else if (*st_cmd) {
      const ValidatedParams vp = validate(resolve_params(st_pc));
      const auto branches = solve_branches(vp);
      if (format == "csv") {
        std::string csv =
            "alpha1_re,alpha1_im,alpha2_re,alpha2_im,beta_re,beta_im,n2,delta_tilde,g1,g2\n";
        for (const auto& br : branches) {
          for (double v : {br.alpha1_s.real(), br.alpha1_s.imag(), br.alpha2_s.real(),
                           br.alpha2_s.imag(), br.beta_s.real(), br.beta_s.imag(), br.n2,
                           br.delta_tilde, br.g1})
            csv += format_double(v) + ",";
          csv += format_double(br.g2) + "\n";
        }
        write_output(out_path, csv);
      } else {
        json j;
        j["params"] = params_to_json(vp.get());
        json arr = json::array();
        for (const auto& br : branches) arr.push_back(branch_to_json(br));
        j["branches"] = arr;
        write_output(out_path, j.dump(2));
      }
    } else if (*sb_cmd) {
      const StageInput in = stage_input(sb_pc, sb_stdin, false);
      const JacobianMode mode =
          sb_phase_exact ? JacobianMode::PhaseExact : JacobianMode::PaperLiteral;
      json arr = json::array();
      for (const auto& br : in.branches) {
        const auto verdict = is_stable(jacobian(br, in.vp, mode), sb_margin);
        json j = branch_to_json(br);
        j["stable"] = verdict.stable;
        j["max_re_lambda"] = verdict.max_re_lambda;
        json eigs = json::array();
        for (int i = 0; i < verdict.n_eigenvalues; ++i)
          eigs.push_back(complex_json(verdict.eigenvalues[i]));
        j["eigenvalues"] = eigs;
        arr.push_back(j);
      }
      write_output(out_path,
                   json{{"params", params_to_json(in.vp.get())}, {"branches", arr}}.dump(2));
    } else if (*ba_cmd) {
      SystemParams tmpl = resolve_params(ba_pc);
      AxisSpec x = parse_axis(ba_x), y = parse_axis(ba_y);
      if (!ba_preset.empty()) {
        const SweepSpec ps = figure_preset(ba_preset);
        if (ps.axes.size() != 2 || ps.single_cavity)
          throw SpecError("preset", "'" + ba_preset + "' is not a basin preset");
        SystemParams merged = ps.template_params;
        if (ba_pc.kappa) merged.kappa = tmpl.kappa;
        if (ba_pc.j) merged.J = tmpl.J;
        if (ba_pc.delta) merged.delta = tmpl.delta;
        if (ba_pc.chi) merged.chi = tmpl.chi;
        tmpl = merged;
        if (!ba_cmd->count("--x")) x = ps.axes[0];
        if (!ba_cmd->count("--y")) y = ps.axes[1];
      }
      const BranchRule rule = ba_rule == "all" ? BranchRule::AllBranches : BranchRule::AnyStable;
      const StabilityMap map = basin(tmpl, x, y, rule, ba_margin, workers);
      write_output(out_path, basin_to_csv(map));
      const std::string meta = basin_metadata(map).dump(2);
      if (!out_path.empty()) {
        std::ofstream side(out_path + ".meta.json");
        side << meta << "\n";
      } else {
        std::cerr << meta << "\n";
      }
    } else if (*dy_cmd) {
      const ValidatedParams vp = validate(resolve_params(dy_pc));
      State3 y0;
      if (!dy_initial.empty()) {
        y0 << Complex(dy_initial[0], dy_initial[1]), Complex(dy_initial[2], dy_initial[3]),
            Complex(dy_initial[4], dy_initial[5]);
      } else {
        const auto branches = solve_branches(vp);
        StageInput in{vp, branches};
        int idx = dy_branch >= 0 ? dy_branch : most_stable_index(in, 1e-9);
        if (idx >= static_cast<int>(branches.size()))
          throw DomainError("branch", "index out of range");
        const auto& br = branches[idx];
        y0 << br.alpha1_s, br.alpha2_s, br.beta_s;
        y0 *= 1.0 + dy_prel;
        y0 += State3::Constant(dy_pabs);
      }
      IntegrateOptions opt;
      opt.t_end = dy_tend;
      opt.rtol = dy_rtol;
      opt.atol = dy_atol;
      opt.record_every = dy_every;
      const Trajectory traj = integrate(vp, y0, opt);
      const auto cls = classify_trajectory(traj);
      const char* kind = cls.kind == TrajectoryKind::Converged   ? "converged"
                         : cls.kind == TrajectoryKind::Diverged ? "diverged"
                                                                 : "oscillating";
      if (dy_summary) {
        json j{{"classification", kind},
               {"samples", traj.size()},
               {"t_final", traj.times.back()},
               {"diverged_guard", traj.diverged},
               {"final_state",
                {complex_json(traj.states.back()(0)), complex_json(traj.states.back()(1)),
                 complex_json(traj.states.back()(2))}}};
        if (cls.kind == TrajectoryKind::Diverged) {
          j["growth_rate"] = cls.rate;
          j["r_squared"] = cls.r_squared;
        }
        write_output(out_path, j.dump(2));
      } else {
        std::string csv = "t,alpha1_re,alpha1_im,alpha2_re,alpha2_im,beta_re,beta_im,i1,i2\n";
        csv.reserve(csv.size() + traj.size() * 160);
        for (size_t i = 0; i < traj.size(); ++i) {
          const State3& s = traj.states[i];
          csv += format_double(traj.times[i]);
          for (double v : {s(0).real(), s(0).imag(), s(1).real(), s(1).imag(), s(2).real(),
                           s(2).imag(), traj.i1[i], traj.i2[i]}) {
            csv += ',';
            csv += format_double(v);
          }
          csv += '\n';
        }
        write_output(out_path, csv);
        std::cerr << "classification: " << kind << " (samples " << traj.size() << ")\n";
      }
    } else if (*cv_cmd) {
      const StageInput in = stage_input(cv_pc, cv_stdin, cv_single);
      const int idx = cv_branch >= 0 ? cv_branch : most_stable_index(in, cv_margin);
      if (idx >= static_cast<int>(in.branches.size()))
        throw DomainError("branch", "index out of range");
      const auto& br = in.branches[idx];
      const DriftMode mode = cv_paper_literal ? DriftMode::PaperLiteral : DriftMode::Corrected;
      json j;
      j["branch_index"] = idx;
      j["branch"] = branch_to_json(br);
      std::string csv;
      auto emit = [&](const auto& cov, std::initializer_list<const char*> ordering) {
        const int n = static_cast<int>(cov.v.rows());
        j["ordering"] = ordering;
        json v = json::array();
        for (int r = 0; r < n; ++r)
          for (int c = 0; c < n; ++c) v.push_back(cov.v(r, c));
        j["v"] = v;
        j["residual"] = cov.residual;
        j["min_symplectic_eig"] = cov.min_symplectic;
        j["physical"] = cov.physical;
        for (int r = 0; r < n; ++r) {
          for (int c = 0; c < n; ++c) csv += (c ? "," : "") + format_double(cov.v(r, c));
          csv += '\n';
        }
      };
      if (cv_single) {
        const auto verdict = is_stable<4>(jacobian_single_cavity(br, in.vp), cv_margin);
        if (!verdict.stable)
          throw NotHurwitz("branch is not stable; no steady-state covariance exists");
        emit(solve_lyapunov<4>(drift_single_cavity(br, in.vp, mode),
                               diffusion_single_cavity(in.vp)),
             {"x", "p", "I2", "phi2"});
      } else {
        const auto verdict = is_stable(jacobian(br, in.vp), cv_margin);
        if (!verdict.stable)
          throw NotHurwitz("branch is not stable; no steady-state covariance exists");
        emit(solve_lyapunov(drift_matrix(br, in.vp, mode), diffusion_matrix(in.vp)),
             {"x", "p", "I1", "phi1", "I2", "phi2"});
      }
      write_output(out_path, format == "csv" ? csv : j.dump(2));
    } else if (*en_cmd) {
      const StageInput in = stage_input(en_pc, en_stdin, en_single);
      const DriftMode mode = en_paper_literal ? DriftMode::PaperLiteral : DriftMode::Corrected;
      PointResult res;
      for (const auto& br : in.branches) {
        BranchOutcome bo;
        bo.branch = br;
        try {
          if (en_single) {
            bo.verdict = is_stable<4>(jacobian_single_cavity(br, in.vp), en_margin);
            if (bo.verdict.stable) {
              const auto cov = solve_lyapunov<4>(drift_single_cavity(br, in.vp, mode),
                                                 diffusion_single_cavity(in.vp));
              bo.min_symplectic = cov.min_symplectic;
              bo.en_mech_cav2 = log_negativity(cov.v);
            }
          } else {
            bo.verdict = is_stable(jacobian(br, in.vp), en_margin);
            if (bo.verdict.stable) {
              const auto cov =
                  solve_lyapunov(drift_matrix(br, in.vp, mode), diffusion_matrix(in.vp));
              bo.min_symplectic = cov.min_symplectic;
              const auto pw = pairwise_all(cov.v);
              bo.en_mech_cav1 = pw.mech_cav1;
              bo.en_mech_cav2 = pw.mech_cav2;
              bo.en_cav1_cav2 = pw.cav1_cav2;
            }
          }
        } catch (const NumericalError& e) {
          bo.error = e.what();
        }
        res.branches.push_back(std::move(bo));
      }
      const int idx = en_branch >= 0 ? en_branch : res.most_stable();
      if (idx >= static_cast<int>(res.branches.size()))
        throw DomainError("branch", "index out of range");
      json j = branch_outcome_json(res.branches[idx]);
      j["branch_index"] = idx;
      j["branch_count"] = res.branches.size();
      write_output(out_path, j.dump(2));
    } else if (*sw_cmd) {
      SweepSpec spec;
      if (!sw_preset.empty()) {
        spec = figure_preset(sw_preset);
        const SystemParams o = resolve_params(sw_pc);
        if (sw_pc.kappa) spec.template_params.kappa = o.kappa;
        if (sw_pc.j) spec.template_params.J = o.J;
        if (sw_pc.delta) spec.template_params.delta = o.delta;
        if (sw_pc.chi) spec.template_params.chi = o.chi;
        if (sw_pc.alpha_in) spec.template_params.alpha_in = o.alpha_in;
        if (sw_pc.n_th) spec.template_params.n_th = o.n_th;
        if (sw_pc.n_a) spec.template_params.n_a = o.n_a;
      } else {
        spec.template_params = resolve_params(sw_pc);
        if (sw_axis1.empty()) throw SpecError("axis1", "need --axis1 or --preset");
        spec.axes.push_back(parse_axis(sw_axis1));
        if (!sw_axis2.empty()) spec.axes.push_back(parse_axis(sw_axis2));
        spec.single_cavity = sw_single;
      }
      if (sw_policy == "all")
        spec.policy = BranchPolicy::All;
      else if (sw_policy != "most_stable")
        throw SpecError("policy", "must be most_stable or all");
      if (!sw_outputs.empty()) {
        std::stringstream ss(sw_outputs);
        std::string name;
        while (std::getline(ss, name, ',')) spec.outputs.push_back(name);
      }
      const auto records = run_sweep(spec, workers);
      if (format == "json")
        write_output(out_path, sweep_to_json(spec, records).dump(2));
      else
        write_output(out_path, sweep_to_csv(spec, records));
    }
    return 0;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
