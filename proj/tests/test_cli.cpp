#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>
#include <sys/wait.h>

#include "support.hpp"

#ifndef NSS_CLI_PATH
#error "NSS_CLI_PATH must point at the nss executable"
#endif

using nss::test::TempDir;

namespace {

struct Result {
  int status;
  std::string err;
};

Result cli(const std::string& args, const TempDir& scratch) {
  const auto err = scratch / "stderr.txt";
  const std::string cmd = std::string(NSS_CLI_PATH) + " " + args + " > /dev/null 2> " + err.string();
  const int raw = std::system(cmd.c_str());
  std::ifstream in(err);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, ss.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kRun =
    "--N 32 --dt-schedule 0.2:0.004,0.6:0.04 --diag-every 5,2 --snapshot-at 0.3 --seed 5";

}  // namespace

TEST_CASE("cli: coarsen, stop, resume matches an uninterrupted run") {
  TempDir scratch("cli_scratch"), full("cli_full"), part("cli_part");
  REQUIRE(cli("coarsen " + kRun + " --out " + full.path().string(), scratch).status == 0);
  REQUIRE(cli("coarsen " + kRun + " --stop-after-steps 37 --out " + part.path().string(), scratch).status == 0);
  REQUIRE(cli("resume --checkpoint " + (part / "checkpoint.bin").string(), scratch).status == 0);
  CHECK(slurp(part / "checkpoint.bin") == slurp(full / "checkpoint.bin"));
  CHECK(slurp(part / "diagnostics.csv") == slurp(full / "diagnostics.csv"));
  CHECK(slurp(part / "snapshot_t0.3.bin") == slurp(full / "snapshot_t0.3.bin"));
  const auto cfg = nlohmann::json::parse(slurp(full / "config.json"));
  CHECK(cfg["seed"] == 5);
  CHECK(cfg["N"] == 32);
}

TEST_CASE("cli: errors are machine readable") {
  TempDir scratch("cli_err"), run("cli_err_run");
  REQUIRE(cli("coarsen " + kRun + " --stop-after-steps 3 --out " + run.path().string(), scratch).status == 0);
  auto r = cli("resume --N 64 --checkpoint " + (run / "checkpoint.bin").string(), scratch);
  CHECK(r.status != 0);
  CHECK(r.err.find("error: code=grid-mismatch") != std::string::npos);

  r = cli("coarsen --N 32 --dt-schedule 0.1:0.03 --out " + run.path().string(), scratch);
  CHECK(r.status != 0);
  CHECK(r.err.find("error: code=invalid-schedule") != std::string::npos);

  r = cli("coarsen --bogus", scratch);
  CHECK(r.status != 0);
  CHECK(r.err.find("error: code=usage") != std::string::npos);

  r = cli("converge-time --starter rk4", scratch);
  CHECK(r.status != 0);
  CHECK(r.err.find("error: code=invalid-config") != std::string::npos);
}

TEST_CASE("cli: convergence table") {
  TempDir scratch("cli_conv"), out("cli_conv_out");
  REQUIRE(cli("converge-time --N 16 --T 0.2 --nt-list 20,40,80 --out " + out.path().string(), scratch).status == 0);
  const auto table = slurp(out / "errors.csv");
  CHECK(table.rfind("n,nt,dt,error_l2,error_inf\n", 0) == 0);
  CHECK(std::filesystem::exists(out / "convergence.json"));
}
