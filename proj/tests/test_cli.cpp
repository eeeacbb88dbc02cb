// Runs the command-line tool as a subprocess.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = WEAKSYM_CLI_PATH;
const std::string kConfigs = WEAKSYM_CONFIG_DIR;
const std::string kGolden = WEAKSYM_GOLDEN_DIR;

fs::path scratch() {
  static fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("weaksym_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args, const fs::path& out = {}) {
  std::string cmd = kCli + " " + args;
  cmd += out.empty() ? " > /dev/null" : " > '" + out.string() + "'";
  cmd += " 2> '" + (scratch() / "stderr.txt").string() + "'";
  int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string cfg(const char* name) { return "--config '" + kConfigs + "/" + name + "'"; }

fs::path write_tmp(const char* name, const std::string& text) {
  auto p = scratch() / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("kerr-spectrum matches the golden file") {
  auto out = scratch() / "spec.csv";
  REQUIRE(run("kerr-spectrum " + cfg("kerr_spectrum.json"), out) == 0);
  CHECK(slurp(out) == slurp(fs::path(kGolden) / "kerr_spectrum.csv"));
}

TEST_CASE("csv and json outputs are well formed") {
  auto out = scratch() / "g.csv";
  REQUIRE(run("kerr-green " + cfg("kerr_green.json") + " --format csv", out) == 0);
  auto text = slurp(out);
  CHECK(text.rfind("t,re_G,im_G\n", 0) == 0);
  CHECK(text.find('\r') == std::string::npos);

  auto js = scratch() / "g.json";
  REQUIRE(run("ising-spectrum --format json --seed 3", js) == 0);
  auto j = json::parse(slurp(js));
  CHECK(j["schema_version"] == 1);
}

TEST_CASE("exit codes") {
  CHECK(run("validate " + cfg("ising_validate.json")) == 0);
  CHECK(run("validate " + cfg("ising_negative_control.json")) == 1);
  CHECK(run("validate --config /nonexistent.json") == 2);
  CHECK(run("kerr-spectrum --config " + write_tmp("unk.json", R"({"kappaa":1})").string()) == 2);
  CHECK(run("kerr-spectrum --config " + write_tmp("bad.json", "{ nope").string()) == 2);
  CHECK(run("kerr-spectrum --format xml") == 2);
  CHECK(run("no-such-command") == 2);
  CHECK(run("") == 2);
  // size guard: 20 spins
  CHECK(run("ising-spectrum --config " +
            write_tmp("big.json", R"({"model":"ising","parameters":{"n":20}})").string()) == 2);
  // dense Kerr generator beyond the memory guard
  CHECK(run("validate --model kerr --cutoff 100") == 2);
  CHECK(run("kerr-eigvec --config " +
            write_tmp("trunc.json", R"({"ranges":{"m":3,"mu":20},"cutoff":10})").string()) == 2);
  CHECK(run("validate --model ising " + cfg("kerr_validate.json")) == 2);
}

TEST_CASE("validate report") {
  auto js = scratch() / "v.json";
  REQUIRE(run("validate " + cfg("ising_negative_control.json") + " --format json", js) == 1);
  auto j = json::parse(slurp(js));
  CHECK(j["pass"] == false);
  CHECK(j["match_report"]["unmatched_analytic"].get<int>() > 0);
  CHECK_FALSE(j.contains("timing"));

  REQUIRE(run("validate " + cfg("multimode.json") + " --format json --timing", js) == 0);
  j = json::parse(slurp(js));
  CHECK(j["pass"] == true);
  CHECK(j.contains("timing"));
  CHECK(j["match_report"]["matched"] == j["match_report"]["analytic_count"]);
}

TEST_CASE("dump-config round trip") {
  auto a = scratch() / "a.json", b = scratch() / "b.json";
  REQUIRE(run("ising-coherence " + cfg("ising_coherence.json") + " --seed 5 --dump-config", a) ==
          0);
  REQUIRE(run("ising-coherence --config '" + a.string() + "' --dump-config", b) == 0);
  CHECK(slurp(a) == slurp(b));
  auto j = json::parse(slurp(a));
  CHECK(j["seed"] == 5);
}

TEST_CASE("repeated runs are byte identical") {
  for (const char* args : {"ep-scan --config CFG/ep_scan.json", "ising-evolve --seed 4",
                           "kerr-eigvec", "multimode-spectrum --format json"}) {
    std::string a = args;
    if (auto k = a.find("CFG"); k != std::string::npos) a.replace(k, 3, kConfigs);
    auto x = scratch() / "x.out", y = scratch() / "y.out";
    REQUIRE(run(a, x) == 0);
    REQUIRE(run(a, y) == 0);
    CHECK_MESSAGE(slurp(x) == slurp(y), args);
    CHECK(!slurp(x).empty());
  }
}

TEST_CASE("--output writes the file") {
  auto p = scratch() / "o.csv";
  fs::remove(p);
  REQUIRE(run("kerr-spectrum --output '" + p.string() + "'") == 0);
  CHECK(fs::file_size(p) > 0);
}

TEST_CASE("default kerr-spectrum rows") {
  auto out = scratch() / "d.csv";
  REQUIRE(run("kerr-spectrum", out) == 0);
  std::istringstream in(slurp(out));
  std::string line;
  std::getline(in, line);
  int rows = 0;
  bool zero_row = false;
  while (std::getline(in, line)) {
    ++rows;
    if (line.rfind("0,0,", 0) == 0)
      zero_row = line == "0,0,0.0000000000000000e+00,0.0000000000000000e+00,"
                         "1.0000000000000000e+00,1.0000000000000000e+00";
  }
  CHECK(rows == 21 * 16);
  CHECK(zero_row);
}
