// SPDX-License-Identifier: Apache-2.0

#include <sys/wait.h>

#include <catch_amalgamated.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(CORRIDOR_COV_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) v.push_back(line);
  return v;
}

std::string last_field(const std::string& row) { return row.substr(row.rfind(',') + 1); }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "corridor_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("coverage sweep table", "[cli]") {
  const auto r =
      run("coverage --sweep theta --from -10 --to 10 --step 1 --methods mc --trials 2000");
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 22);
  CHECK(rows[0] == "sweep_value,method,coverage,stderr,seed,config_hash");
  CHECK(rows[1].rfind("-10,mc,", 0) == 0);
  CHECK(last_field(rows[1]).size() == 16);

  SECTION("reruns are byte identical and the hash tracks the config") {
    const auto again =
        run("coverage --sweep theta --from -10 --to 10 --step 1 --methods mc "
            "--trials 2000 --workers 3");
    CHECK(again.out == r.out);
    const auto other =
        run("coverage --sweep theta --from -10 --to 10 --step 1 --methods mc "
            "--trials 2000 --q 5");
    CHECK(last_field(lines(other.out)[1]) != last_field(rows[1]));
  }

  SECTION("json output") {
    const auto j = run("coverage --methods exact --format json");
    REQUIRE(j.code == 0);
    CHECK(j.out.find("\"config_hash\"") != std::string::npos);
    CHECK(j.out.find("\"runtime_seconds\"") != std::string::npos);
  }
}

TEST_CASE("exit codes", "[cli]") {
  CHECK(run("coverage --sweep theta --from 5 --to 1 --step 1").code == 2);
  CHECK(run("coverage --no-such-flag").code == 2);
  CHECK(run("coverage --spatial disc --methods exact").code == 2);
  CHECK(run("coverage --config /nonexistent/config.json").code != 0);
  CHECK(run("replay --trace /nonexistent/trace.csv").code == 4);

  const fs::path bad = scratch("decreasing.csv");
  std::ofstream(bad) << "position_m,height_m,rx_power_dbm\n0,100,-60\n-1,100,-61\n";
  CHECK(run("replay --trace " + bad.string()).code == 4);

  const fs::path few = scratch("heights.csv");
  {
    std::ofstream out(few);
    out << "height_m\n";
    for (int i = 0; i < 10; ++i) out << 190 + i << "\n";
  }
  CHECK(run("height-study --heights " + few.string()).code == 5);
}

TEST_CASE("output file", "[cli]") {
  const fs::path out = scratch("coverage.csv");
  fs::remove(out);
  REQUIRE(run("coverage --methods mc --trials 1000 --out " + out.string()).code == 0);
  std::ifstream in(out);
  std::string header;
  std::getline(in, header);
  CHECK(header == "sweep_value,method,coverage,stderr,seed,config_hash");
  CHECK(run("coverage --methods mc --trials 1000 --out /nonexistent/dir/x.csv").code == 4);
}
