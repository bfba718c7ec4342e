#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include "pedflow/csv_io.hpp"
#include "pedflow/scenario.hpp"
#include "support.hpp"

using namespace pedflow;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string output;
};

Outcome run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + PEDFLOW_CLI_PATH + " " + args + " 2>&1";
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[512];
  while (fgets(buf, sizeof buf, pipe) != nullptr) o.output += buf;
  const int status = pclose(pipe);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

fs::path small_scenario(const fs::path& dir) {
  Scenario s = test::box_scenario();
  s.domain = WalkableDomain(Rect{-2.0, 2.0, -1.0, 1.0}, {});
  s.output = (dir / "from_scenario").string();
  const fs::path p = dir / "small.json";
  save_scenario(s, p);
  return p;
}

std::string header_of(const fs::path& p) {
  const CsvTable t = read_csv(p);
  std::string h;
  for (const auto& c : t.header) h += (h.empty() ? "" : ",") + c;
  return h;
}

}  // namespace

TEST_CASE("validate reports ok for every bundled preset") {
  for (const char* name : {"example1", "example1_desk", "example2_lambda1", "example2_lambda1_desk",
                           "example2_lambda2", "example2_lambda2_desk"}) {
    const Outcome o = run_cli("validate --scenario " + test::scenario_path(name).string());
    CHECK(o.code == 0);
    CHECK(o.output.rfind("ok scenario=", 0) == 0);
  }
}

TEST_CASE("validation failures exit with 2 and a machine-readable line") {
  const fs::path dir = test::scratch_dir("cli_bad");
  std::string text = test::slurp(small_scenario(dir));
  text.replace(text.find("\"dt\": 0.01"), 10, "\"dt\": 0.25");
  const fs::path bad = dir / "bad.json";
  FILE* f = std::fopen(bad.c_str(), "w");
  std::fputs(text.c_str(), f);
  std::fclose(f);
  const Outcome o = run_cli("validate --scenario " + bad.string());
  CHECK(o.code == 2);
  CHECK(o.output.find("error kind=validation message=\"") != std::string::npos);
  CHECK(o.output.find("exceeds 1") != std::string::npos);

  CHECK(run_cli("validate --scenario " + (dir / "missing.json").string()).code == 2);
  CHECK(run_cli("validate --bogus").code == 2);
  CHECK(run_cli("").code == 2);
}

TEST_CASE("runtime failures exit with 3") {
  const fs::path dir = test::scratch_dir("cli_runtime");
  const fs::path scenario = small_scenario(dir);
  const fs::path blocker = dir / "not_a_dir";
  std::fclose(std::fopen(blocker.c_str(), "w"));
  const Outcome o = run_cli("macro --scenario " + scenario.string() + " --out " + (blocker / "x").string());
  CHECK(o.code == 3);
  CHECK(o.output.find("error kind=runtime") != std::string::npos);
}

TEST_CASE("output directory precedence") {
  const fs::path dir = test::scratch_dir("cli_out");
  const fs::path scenario = small_scenario(dir);
  const std::string env = "PEDFLOW_OUT=" + (dir / "from_env").string();

  CHECK(run_cli("macro --scenario " + scenario.string(), "env -u PEDFLOW_OUT").code == 0);
  CHECK(fs::exists(dir / "from_scenario" / "macro_diagnostics.csv"));

  CHECK(run_cli("macro --scenario " + scenario.string(), env).code == 0);
  CHECK(fs::exists(dir / "from_env" / "macro_diagnostics.csv"));

  CHECK(run_cli("macro --scenario " + scenario.string() + " --out " + (dir / "from_flag").string(), env)
            .code == 0);
  CHECK(fs::exists(dir / "from_flag" / "macro_diagnostics.csv"));
}

TEST_CASE("compare writes every documented table") {
  const fs::path dir = test::scratch_dir("cli_compare");
  const fs::path scenario = small_scenario(dir);
  const fs::path out = dir / "run";
  const Outcome o = run_cli("compare --scenario " + scenario.string() + " --out " + out.string() +
                            " --workers 2");
  REQUIRE(o.code == 0);
  CHECK(header_of(out / "micro_t0.500.csv") == "i,j,x_center,y_center,u_mic");
  CHECK(header_of(out / "macro_t1.000.csv") == "i,j,x_center,y_center,u0,u1");
  CHECK(header_of(out / "macro_diagnostics.csv") == "t,dt,total_mass,mb_0");
  CHECK(header_of(out / "error_vs_time.csv") == "t,l1,l2");
  CHECK(header_of(out / "mass_balance.csv") == "t,cut,micro,macro");
  CHECK(header_of(out / "crossing_times.csv") == "cut,macro,micro_mean,micro_reached,micro_total");
  CHECK(header_of(out / "micro_replicates.csv") == "replicate,t,stopped_fraction");
  CHECK(header_of(out / "micro_crossing.csv") == "replicate,cut,crossing_time");

  const CsvTable snap = read_csv(out / "macro_t0.000.csv");
  CHECK(snap.rows.size() == 40 * 20);
  const CsvTable err = read_csv(out / "error_vs_time.csv");
  CHECK(err.rows.size() == 3);
  for (const auto& row : err.rows) {
    CHECK(std::stod(row[1]) >= 0.0);
    CHECK(std::stod(row[2]) >= 0.0);
  }
  CHECK(read_csv(out / "micro_replicates.csv").rows.size() == 4 * 3);
}

TEST_CASE("seed and snapshot flags override the scenario") {
  const fs::path dir = test::scratch_dir("cli_flags");
  const fs::path scenario = small_scenario(dir);
  const auto run = [&](const std::string& name, const std::string& extra) {
    REQUIRE(run_cli("micro --scenario " + scenario.string() + " --out " + (dir / name).string() + extra)
                .code == 0);
    return test::slurp(dir / name / "micro_t1.000.csv");
  };
  const std::string a = run("a", "");
  const std::string b = run("b", "");
  const std::string c = run("c", " --seed 12345");
  CHECK(a == b);
  CHECK(a != c);
  CHECK(run_cli("micro --scenario " + scenario.string() + " --out " + (dir / "d").string() +
                " --snapshots 0.2,0.7")
            .code == 0);
  CHECK(fs::exists(dir / "d" / "micro_t0.200.csv"));
  CHECK(fs::exists(dir / "d" / "micro_t0.700.csv"));
  CHECK_FALSE(fs::exists(dir / "d" / "micro_t0.500.csv"));
  CHECK(run_cli("validate --scenario " + scenario.string() + " --snapshots 0.2,7").code == 2);
}
