#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

#include "dln/io.hpp"
#include "oracles.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

fs::path work_dir() {
  const auto dir = fs::temp_directory_path() / "dln_cli_tests";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path out = work_dir() / ("stdout_" + std::to_string(counter) + ".txt");
  const fs::path err = work_dir() / ("stderr_" + std::to_string(counter) + ".txt");
  ++counter;
  const std::string cmd = std::string(DLN_GEOM_BIN) + " " + args + " > " + out.string() +
                          " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  RunResult result;
  result.exit_code = WEXITSTATUS(status);
  result.out = slurp(out);
  result.err = slurp(err);
  return result;
}

int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("entropy: pinned value, schema and exit code") {
  const fs::path out = work_dir() / "entropy.json";
  const RunResult r = run_cli("entropy --sigma 2,1 --depth 2 --convention embedded --out " +
                              out.string());
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(slurp(out));
  CHECK(j.at("convention") == "embedded");
  CHECK(std::abs(j.at("total").get<double>() - 3.4269040) < 1e-6);
  CHECK(j.contains("constant_part"));
  CHECK(j.contains("ratio_part"));
}

TEST_CASE("entropy: usage error names the offending flag and writes nothing") {
  const fs::path out = work_dir() / "never_written.json";
  const RunResult r =
      run_cli("entropy --sigma 2,1 --depth 0 --out " + out.string());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("--depth") != std::string::npos);
  CHECK(!fs::exists(out));
}

TEST_CASE("entropy: missing input is a usage error") {
  const RunResult r = run_cli("entropy --depth 2");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("--sigma") != std::string::npos);
}

TEST_CASE("determinism: identical config and seed give byte-identical outputs") {
  const fs::path a = work_dir() / "det_a.json";
  const fs::path b = work_dir() / "det_b.json";
  REQUIRE(run_cli("basis --width 3 --depth 4 --seed 11 --out " + a.string()).exit_code == 0);
  REQUIRE(run_cli("basis --width 3 --depth 4 --seed 11 --out " + b.string()).exit_code == 0);
  CHECK(slurp(a) == slurp(b));

  const fs::path fa = work_dir() / "det_a.csv";
  const fs::path fb = work_dir() / "det_b.csv";
  const std::string flow_args = "flow --kind param --width 2 --depth 3 --steps 40 "
                                "--record-every 10 --seed 4 --out ";
  REQUIRE(run_cli(flow_args + fa.string()).exit_code == 0);
  REQUIRE(run_cli(flow_args + fb.string()).exit_code == 0);
  CHECK(slurp(fa) == slurp(fb));
}

TEST_CASE("flow: CSV schema and sample count") {
  const fs::path out = work_dir() / "flow.csv";
  const RunResult r = run_cli(
      "flow --kind balanced --width 2 --depth 3 --steps 50 --record-every 10 --seed 7 --out " +
      out.string());
  REQUIRE(r.exit_code == 0);
  const std::string text = slurp(out);
  CHECK(text.rfind("t,loss,free_energy,entropy,balance_residual,sigma_1,sigma_2\n", 0) == 0);
  CHECK(count_lines(text) == 1 + 6);  // header + t=0 and five recorded steps
}

TEST_CASE("flow: beta sweep writes one file per member") {
  const fs::path out = work_dir() / "sweep.csv";
  const RunResult r = run_cli(
      "flow --kind free --width 2 --depth 2 --steps 30 --record-every 10 --seed 3 "
      "--beta 5,inf --out " +
      out.string());
  REQUIRE(r.exit_code == 0);
  CHECK(fs::exists(work_dir() / "sweep_beta=5.csv"));
  CHECK(fs::exists(work_dir() / "sweep_beta=inf.csv"));
  CHECK(slurp(work_dir() / "sweep_beta=5.csv") != slurp(work_dir() / "sweep_beta=inf.csv"));
}

TEST_CASE("flow: sweep without --out is a usage error") {
  const RunResult r = run_cli("flow --kind balanced --width 2 --depth 2 --steps 10 --beta 1,2");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("--out") != std::string::npos);
}

TEST_CASE("verify: all suites pass and report the anchored determinant") {
  const fs::path out = work_dir() / "verify.json";
  const RunResult jacobi =
      run_cli("verify --suite jacobi --depth 3 --width 2 --out " + out.string());
  REQUIRE(jacobi.exit_code == 0);
  CHECK(jacobi.out.find("PASS") != std::string::npos);
  const json j = json::parse(slurp(out));
  CHECK(j.at("suite") == "jacobi");
  CHECK(j.at("pass") == true);
  bool saw_anchor = false;
  for (const json& check : j.at("checks")) {
    CHECK(check.contains("name"));
    CHECK(check.contains("value"));
    CHECK(check.contains("tolerance"));
    CHECK(check.contains("pass"));
    if (check.at("name") == "anchored_closed_det")
      saw_anchor = std::abs(check.at("value").get<double>() - 21.0) < 1e-9;
  }
  CHECK(saw_anchor);

  CHECK(run_cli("verify --suite basis --width 3 --depth 3 --trials 40").exit_code == 0);
  CHECK(run_cli("verify --suite submersion --width 2 --depth 4 --trials 40").exit_code == 0);
}

TEST_CASE("volume: numeric oracle agrees with the closed form") {
  const fs::path out = work_dir() / "volume.json";
  const RunResult r =
      run_cli("volume --sigma 4,1 --depth 2 --grid 4000 --out " + out.string());
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(slurp(out));
  CHECK(j.at("numeric_rel_err").get<double>() < 1e-6);
  CHECK(std::abs(j.at("formula").get<double>() - 39.738353) < 1e-5);
}

TEST_CASE("volume: density fit reports the measured exponent") {
  const fs::path out = work_dir() / "density.json";
  const RunResult r =
      run_cli("volume --sigma 2,1 --depth 2 --grid 0 --density-fit --out " + out.string());
  REQUIRE(r.exit_code == 0);
  const json fit = json::parse(slurp(out)).at("density_fit");
  CHECK(std::abs(fit.at("fitted_exponent").get<double>() + 0.5) < 1e-6);
  CHECK(fit.at("stated_exponent").get<double>() == 0.5);
  CHECK(fit.at("r2").get<double>() > 0.999999);
}

TEST_CASE("basis: report schema") {
  const fs::path out = work_dir() / "basis.json";
  const RunResult r = run_cli("basis --width 2 --depth 3 --seed 5 --out " + out.string());
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(slurp(out));
  CHECK(j.at("count") == 6);  // d + (N+1) d(d-1)/2
  CHECK(j.at("kernel_dimension") == 2);
  CHECK(j.at("gram_max_deviation").get<double>() < 1e-9);
}

TEST_CASE("flow: accepts file inputs for the initial state and target") {
  std::mt19937_64 rng(21);
  const dln::Network w0 = oracles::random_balanced(2, 3, rng);
  const fs::path w0_path = work_dir() / "w0.json";
  dln::save_network_json(w0, w0_path.string());
  const fs::path x0_path = work_dir() / "x0.json";
  dln::save_matrix_json(dln::end_to_end(w0), x0_path.string());
  const fs::path target_path = work_dir() / "target.csv";
  dln::write_text_file(target_path.string(), "0.4,0.1\n-0.2,0.6\n");

  const fs::path out_w = work_dir() / "from_w0.csv";
  REQUIRE(run_cli("flow --kind param --w0 " + w0_path.string() + " --target " +
                  target_path.string() + " --steps 20 --record-every 5 --out " +
                  out_w.string())
              .exit_code == 0);
  const fs::path out_x = work_dir() / "from_x0.csv";
  REQUIRE(run_cli("flow --kind balanced --depth 3 --x0 " + x0_path.string() + " --target " +
                  target_path.string() + " --steps 20 --record-every 5 --out " +
                  out_x.string())
              .exit_code == 0);

  // same dynamics through both routes: final loss columns agree closely
  const std::string a = slurp(out_w), b = slurp(out_x);
  const auto last_loss = [](const std::string& csv) {
    const size_t row = csv.rfind('\n', csv.size() - 2);
    const size_t c1 = csv.find(',', row);
    const size_t c2 = csv.find(',', c1 + 1);
    return std::stod(csv.substr(c1 + 1, c2 - c1 - 1));
  };
  CHECK(std::abs(last_loss(a) - last_loss(b)) < 1e-8);

  // mismatched state flags are usage errors
  CHECK(run_cli("flow --kind param --x0 " + x0_path.string()).exit_code == 2);
  CHECK(run_cli("flow --kind balanced --w0 " + w0_path.string()).exit_code == 2);
}

TEST_CASE("numerical failures exit 1 with the error name") {
  const fs::path zero = work_dir() / "zero.json";
  std::ofstream(zero) << "{\"dim\": 2, \"rows\": [[0,0],[0,0]]}";
  const RunResult r = run_cli("entropy --matrix " + zero.string() + " --depth 2");
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("RankDeficient") != std::string::npos);
}

TEST_CASE("config file supplies defaults, flags win") {
  const fs::path cfg = work_dir() / "config.json";
  std::ofstream(cfg) << R"({"command": "entropy", "sigma": "2,1", "depth": 3,)"
                     << R"( "convention": "embedded"})";
  const fs::path out_a = work_dir() / "cfg_a.json";
  const RunResult a = run_cli("--config " + cfg.string() + " --out " + out_a.string());
  REQUIRE(a.exit_code == 0);
  CHECK(json::parse(slurp(out_a)).at("depth") == 3);

  const fs::path out_b = work_dir() / "cfg_b.json";
  const RunResult b =
      run_cli("--config " + cfg.string() + " --depth 2 --out " + out_b.string());
  REQUIRE(b.exit_code == 0);
  const json jb = json::parse(slurp(out_b));
  CHECK(jb.at("depth") == 2);
  CHECK(std::abs(jb.at("total").get<double>() - 3.4269040) < 1e-6);
}

}  // TEST_SUITE
