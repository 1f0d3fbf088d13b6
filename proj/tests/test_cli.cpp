#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(TREEMAX_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult result;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof(buf), pipe))
    result.output.append(buf, n);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("exp-neg2 emits the exact norm row") {
  const CliResult r =
      run_cli("exp-neg2 --k 2 --p 2 --j 5 --out cli_neg2.csv --format csv");
  INFO(r.output);
  CHECK(r.exit_code == 0);
  const std::string csv = slurp("cli_neg2.csv");
  CHECK(csv.find("lp_norm_pow_p,5,10,1024\r\n") != std::string::npos);
  CHECK(csv.rfind("kind,index,logk_value,linear_value\r\n", 0) == 0);
}

TEST_CASE("check-levelwise reports the bounded power-weight verdict") {
  const CliResult r = run_cli(
      "check-levelwise --k 2 --p 2 --delta -1 --weight power:a=1 --jmax 40 --rmax 40 "
      "--out cli_levelwise.json --format json");
  INFO(r.output);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("verdict=bounded-on-grid") != std::string::npos);
  CHECK(r.output.find("sup=0 (logk)") != std::string::npos);
  const auto j = nlohmann::json::parse(slurp("cli_levelwise.json"));
  CHECK(j["verdict"] == "bounded-on-grid");
  CHECK(j["condition"] == "levelwise-condition");
  CHECK(j.contains("empirical_sup_logk"));
  CHECK(j.contains("witness"));
  CHECK(j.contains("grid"));
  CHECK(j.contains("params"));
}

TEST_CASE("rho-optimize prints the forced minimizer") {
  const CliResult r =
      run_cli("rho-optimize --p 2 --delta 0 --r 0 --wE 1 --wF 2 --out cli_rho.csv");
  INFO(r.output);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("rho_star=0\n") != std::string::npos);
}

TEST_CASE("identical configurations write identical bytes") {
  const std::string args =
      "exp-neg2 --k 2 --p 2 --j 5 --seed 9 --format json --out ";
  CHECK(run_cli(args + "cli_det_a.json").exit_code == 0);
  CHECK(run_cli(args + "cli_det_b.json").exit_code == 0);
  const std::string a = slurp("cli_det_a.json");
  CHECK(!a.empty());
  CHECK(a == slurp("cli_det_b.json"));
}

TEST_CASE("configuration errors exit with status 2 and name the condition") {
  CHECK(run_cli("check-levelwise --frobnicate 3").exit_code == 2);

  const CliResult delta = run_cli("check-levelwise --k 2 --p 2 --delta 1 --weight power:a=1");
  CHECK(delta.exit_code == 2);
  CHECK(delta.output.find("delta < 1") != std::string::npos);

  const CliResult ab = run_cli("check-suffcond --k 2 --p 2 --beta 0.8 --alpha 0.5");
  CHECK(ab.exit_code == 2);
  CHECK(ab.output.find("beta <= alpha") != std::string::npos);

  CHECK(run_cli("check-ms --k 1 --s 1.2").exit_code == 2);
  CHECK(run_cli("exp-neg2 --k 2 --p 2 --format xml").exit_code == 2);
  CHECK(run_cli("").exit_code == 2);  // a subcommand is required
}

TEST_CASE("assert mode fails with the witness printed") {
  const CliResult r = run_cli(
      "check-ap --k 2 --p 2 --weight power:a=-0.75 --jmax 15 --rmax 15 "
      "--mode assert:1 --out cli_ap.json --format json");
  INFO(r.output);
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("assert violated") != std::string::npos);
  CHECK(r.output.find("witness") != std::string::npos);

  const CliResult ok = run_cli(
      "check-levelwise --k 2 --p 2 --delta -1 --weight power:a=1 --jmax 20 --rmax 20 "
      "--mode assert:1.5 --out cli_lw_ok.json");
  CHECK(ok.exit_code == 0);
}

TEST_CASE("selftest flag runs the module suite") {
  CHECK(run_cli("geometry-selftest --selftest").exit_code == 0);
  CHECK(run_cli("check-ms --selftest").exit_code == 0);
  CHECK(run_cli("exp-neg2 --selftest").exit_code == 0);
}

TEST_CASE("config files feed defaults that flags override") {
  {
    std::ofstream os("cli_cfg.ini");
    os << "jmax=10\nrmax=10\n";
  }
  const CliResult from_file = run_cli(
      "check-levelwise --k 2 --p 2 --delta -1 --weight power:a=1 --config cli_cfg.ini "
      "--format json --out cli_cfg_a.json");
  CHECK(from_file.exit_code == 0);
  const auto a = nlohmann::json::parse(slurp("cli_cfg_a.json"));
  CHECK(a["params"]["j_max"] == 10.0);

  const CliResult overridden = run_cli(
      "check-levelwise --k 2 --p 2 --delta -1 --weight power:a=1 --config cli_cfg.ini "
      "--jmax 12 --format json --out cli_cfg_b.json");
  CHECK(overridden.exit_code == 0);
  const auto b = nlohmann::json::parse(slurp("cli_cfg_b.json"));
  CHECK(b["params"]["j_max"] == 12.0);
}

TEST_CASE("linear flag converts the summary line") {
  const CliResult r = run_cli(
      "check-levelwise --k 2 --p 2 --delta -1 --weight power:a=1 --jmax 10 --rmax 10 "
      "--linear --out cli_lin.json");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("sup=1 (linear)") != std::string::npos);
}
