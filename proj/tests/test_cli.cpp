#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef PTOMECH_CLI_PATH
#error "PTOMECH_CLI_PATH must point at the ptomech binary"
#endif

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::string cli = PTOMECH_CLI_PATH;

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "ptomech_cli_test";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run_cli(const std::string& args, const std::string& stdin_file = "",
            const std::string& stderr_file = "") {
  std::string cmd = cli + " " + args;
  if (!stdin_file.empty()) cmd += " < " + stdin_file;
  cmd += stderr_file.empty() ? " 2>/dev/null" : " 2> " + stderr_file;
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json slurp_json(const fs::path& p) { return json::parse(slurp(p)); }

}  // namespace

TEST_CASE("supermodes subcommand prints the coalesced EP pair") {
  const fs::path out = work_dir() / "sm.json";
  REQUIRE(run_cli("supermodes --kappa 0.8 --j 0.45 --delta 0 --out " + out.string()) == 0);
  const json j = slurp_json(out);
  CHECK(j.at("regime") == "EP");
  CHECK(j.at("j_ep").get<double>() == 0.45);
  const double dre = j["omega_plus"]["re"].get<double>() - j["omega_minus"]["re"].get<double>();
  const double dim = j["omega_plus"]["im"].get<double>() - j["omega_minus"]["im"].get<double>();
  CHECK(std::abs(dre) < 1e-12);
  CHECK(std::abs(dim) < 1e-12);
}

TEST_CASE("entangle subcommand reports three pairs with distant entanglement") {
  const fs::path out = work_dir() / "en.json";
  REQUIRE(run_cli("entangle --kappa 0.1 --j 0.8 --alpha-in 3000 --chi 0 --out " + out.string()) ==
          0);
  const json j = slurp_json(out);
  CHECK(j.at("stable").get<bool>());
  const json& pairs = j.at("pairs");
  REQUIRE(pairs.contains("mech_cav1"));
  REQUIRE(pairs.contains("mech_cav2"));
  REQUIRE(pairs.contains("cav1_cav2"));
  CHECK(pairs["mech_cav1"]["e_n"].get<double>() > 0.0);
  CHECK(pairs["mech_cav1"]["eta"].get<double>() < 0.5);
}

TEST_CASE("staged steady-covariance pipeline is bit-identical to the fused run") {
  const fs::path steady_out = work_dir() / "steady.json";
  const fs::path staged = work_dir() / "cov_staged.json";
  const fs::path fused = work_dir() / "cov_fused.json";
  const std::string flags = "--kappa 0.1 --j 0.8 --alpha-in 3000";
  REQUIRE(run_cli("steady " + flags + " --format json --out " + steady_out.string()) == 0);
  REQUIRE(run_cli("covariance --stdin --out " + staged.string(), steady_out.string()) == 0);
  REQUIRE(run_cli("covariance " + flags + " --out " + fused.string()) == 0);
  CHECK(slurp(staged) == slurp(fused));
}

TEST_CASE("domain errors exit 1 with a single diagnostic line") {
  const fs::path err = work_dir() / "err.txt";
  CHECK(run_cli("steady --delta -3 --alpha-in 10", "", err.string()) == 1);
  const std::string msg = slurp(err);
  CHECK(msg.find("delta") != std::string::npos);
  CHECK(std::count(msg.begin(), msg.end(), '\n') == 1);
}

TEST_CASE("numerical failures exit 2") {
  // unstable point: no steady covariance exists
  CHECK(run_cli("covariance --kappa 0.8 --j 0.42 --alpha-in 1e-5") == 2);
}

TEST_CASE("parameter files reject unknown keys and accept overrides") {
  const fs::path params = work_dir() / "params.json";
  {
    std::ofstream out(params);
    out << R"({"kappa": 0.5, "J": 0.9, "alpha_in": 100.0})";
  }
  const fs::path out = work_dir() / "steady_file.json";
  REQUIRE(run_cli("steady --params " + params.string() + " --kappa 0.25 --out " + out.string()) ==
          0);
  const json j = slurp_json(out);
  CHECK(j["params"]["kappa"].get<double>() == 0.25);  // flag wins
  CHECK(j["params"]["J"].get<double>() == 0.9);

  const fs::path bad = work_dir() / "bad.json";
  {
    std::ofstream o(bad);
    o << R"({"kappa": 0.5, "coupling_rate": 1.0})";
  }
  const fs::path err = work_dir() / "bad_err.txt";
  CHECK(run_cli("steady --params " + bad.string(), "", err.string()) == 1);
  CHECK(slurp(err).find("coupling_rate") != std::string::npos);
}

TEST_CASE("sweep preset produces a deterministic csv") {
  const fs::path a = work_dir() / "fig3b_w1.csv";
  const fs::path b = work_dir() / "fig3b_w3.csv";
  REQUIRE(run_cli("sweep --preset fig3b --workers 1 --out " + a.string()) == 0);
  REQUIRE(run_cli("sweep --preset fig3b --workers 3 --out " + b.string()) == 0);
  const std::string ca = slurp(a);
  CHECK(ca == slurp(b));
  CHECK(std::count(ca.begin(), ca.end(), '\n') == 481);  // header + 120*4 rows
  CHECK(ca.rfind("alpha_in,J,branch_index", 0) == 0);
}

TEST_CASE("basin writes the grid csv and the metadata sidecar") {
  const fs::path out = work_dir() / "basin.csv";
  REQUIRE(run_cli("basin --kappa 0.8 --x alpha_in,1,1e4,10,log --y J,0,1.2,10,linear --out " +
                  out.string()) == 0);
  const std::string csv = slurp(out);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 101);
  CHECK(csv.rfind("x,y,branch_count,stable,max_re_lambda", 0) == 0);
  const json meta = slurp_json(out.string() + ".meta.json");
  CHECK(meta["ep_contour"]["axis"] == "J");
  CHECK(meta["ep_contour"]["value"].get<double>() == 0.45);
  CHECK(meta["x_axis"]["scale"] == "log");
}

TEST_CASE("dynamics emits a trajectory csv and a summary") {
  const fs::path out = work_dir() / "traj.csv";
  REQUIRE(run_cli("dynamics --kappa 0.8 --j 0.8 --alpha-in 100 --t-end 50 --record-every 16 "
                  "--out " + out.string()) == 0);
  const std::string csv = slurp(out);
  CHECK(csv.rfind("t,alpha1_re,alpha1_im,alpha2_re,alpha2_im,beta_re,beta_im,i1,i2", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') > 10);

  const fs::path summary = work_dir() / "traj_summary.json";
  REQUIRE(run_cli("dynamics --kappa 0.8 --j 0.8 --alpha-in 100 --t-end 50 --record-every 16 "
                  "--summary --out " + summary.string()) == 0);
  const json j = slurp_json(summary);
  CHECK(j.contains("classification"));
  CHECK(j.at("t_final").get<double>() > 49.0);
}

TEST_CASE("single-cavity entangle reports only the mech-cav2 pair") {
  const fs::path out = work_dir() / "single.json";
  REQUIRE(run_cli("entangle --single-cavity --alpha-in 2000 --out " + out.string()) == 0);
  const json j = slurp_json(out);
  REQUIRE(j.at("stable").get<bool>());
  CHECK(j.at("pairs").contains("mech_cav2"));
  CHECK_FALSE(j.at("pairs").contains("mech_cav1"));
  CHECK(j["pairs"]["mech_cav2"]["e_n"].get<double>() > 0.0);
}

TEST_CASE("unknown preset exits 1") {
  CHECK(run_cli("sweep --preset fig7q") == 1);
}

TEST_CASE("basin presets merge with explicit axis overrides") {
  const fs::path out = work_dir() / "basin_preset.csv";
  REQUIRE(run_cli("basin --preset fig1b --x alpha_in,1,1e4,8,log --y J,0,1.2,8,linear --out " +
                  out.string()) == 0);
  const json meta = slurp_json(out.string() + ".meta.json");
  CHECK(meta["ep_contour"]["value"].get<double>() == 0.45);  // kappa = 0.8 from the preset
  CHECK(meta["x_axis"]["steps"].get<int>() == 8);            // explicit axes win
  CHECK(run_cli("basin --preset fig3a") == 1);               // not a basin preset
}

TEST_CASE("invalid format is rejected") {
  CHECK(run_cli("steady --alpha-in 10 --format yaml") == 1);
}

TEST_CASE("stability subcommand replays steady output and honors phase-exact") {
  const fs::path steady_out = work_dir() / "sb_steady.json";
  const fs::path a = work_dir() / "sb_a.json";
  const fs::path b = work_dir() / "sb_b.json";
  const std::string flags = "--kappa 0.8 --j 0.8 --alpha-in 100";
  REQUIRE(run_cli("steady " + flags + " --format json --out " + steady_out.string()) == 0);
  REQUIRE(run_cli("stability --stdin --out " + a.string(), steady_out.string()) == 0);
  REQUIRE(run_cli("stability --stdin --phase-exact --out " + b.string(), steady_out.string()) == 0);
  const json ja = slurp_json(a), jb = slurp_json(b);
  REQUIRE(ja.at("branches").size() == 1);
  CHECK(ja["branches"][0]["stable"].get<bool>());
  CHECK(jb["branches"][0]["stable"].get<bool>());  // gauge freedom at chi = 0
  CHECK(ja["branches"][0]["eigenvalues"].size() == 6);
}

TEST_CASE("dynamics accepts an explicit initial state") {
  const fs::path out = work_dir() / "traj_init.json";
  REQUIRE(run_cli("dynamics --kappa -0.2 --j 0 --g 0 --alpha-in 0 --t-end 30 "
                  "--rtol 1e-10 --atol 1e-14 "
                  "--initial 1 0 2 1 0 0 --summary --out " + out.string()) == 0);
  const json j = slurp_json(out);
  // free decay: |alpha2(30)| = sqrt(5) e^{-15}
  const double re = j["final_state"][1]["re"].get<double>();
  const double im = j["final_state"][1]["im"].get<double>();
  const double expected = std::sqrt(5.0) * std::exp(-15.0);
  CHECK(std::abs(std::hypot(re, im) - expected) < 1e-6 * expected);
}

TEST_CASE("covariance csv block and paper-literal flag") {
  const fs::path out = work_dir() / "cov.csv";
  const std::string flags = "--kappa 0.1 --j 0.8 --alpha-in 3000";
  REQUIRE(run_cli("covariance " + flags + " --format csv --out " + out.string()) == 0);
  const std::string csv = slurp(out);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
  CHECK(std::count(csv.begin(), csv.end(), ',') == 30);  // 6 rows x 5 separators

  const fs::path lit = work_dir() / "cov_lit.json";
  const fs::path cor = work_dir() / "cov_cor.json";
  REQUIRE(run_cli("covariance " + flags + " --paper-literal-a --out " + lit.string()) == 0);
  REQUIRE(run_cli("covariance " + flags + " --out " + cor.string()) == 0);
  CHECK(slurp(lit) != slurp(cor));  // the two drift conventions differ measurably
}

TEST_CASE("sweep policy all emits one record per branch") {
  const fs::path out = work_dir() / "all_policy.csv";
  REQUIRE(run_cli("sweep --policy all --axis1 alpha_in,8,14,4,linear --omega-m 1 "
                  "--gamma-m 0.01 --g 0.1 --j 2 --delta 1 --kappa 0 --out " + out.string()) == 0);
  const std::string csv = slurp(out);
  // the fold region carries three branches at some drives
  CHECK(std::count(csv.begin(), csv.end(), '\n') > 5);
}

TEST_CASE("help text documents gamma-normalized units and defaults") {
  const fs::path out = work_dir() / "help.txt";
  REQUIRE(std::system((cli + " steady --help > " + out.string() + " 2>&1").c_str()) == 0);
  const std::string help = slurp(out);
  CHECK(help.find("[gamma]") != std::string::npos);
  CHECK(help.find("default") != std::string::npos);
  CHECK(help.find("sqrt(gamma)") != std::string::npos);
}

TEST_CASE("PTOMECH_WORKERS drives the default worker count deterministically") {
  const fs::path a = work_dir() / "env1.csv";
  const fs::path b = work_dir() / "env4.csv";
  const std::string args = "sweep --axis1 alpha_in,10,1e4,12,log --kappa 0.1 --out ";
  REQUIRE(std::system(("PTOMECH_WORKERS=1 " + cli + " " + args + a.string() + " 2>/dev/null").c_str()) == 0);
  REQUIRE(std::system(("PTOMECH_WORKERS=4 " + cli + " " + args + b.string() + " 2>/dev/null").c_str()) == 0);
  CHECK(slurp(a) == slurp(b));
}
