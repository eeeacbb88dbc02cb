#include <fstream>
#include <string>

#include "doctest.h"
#include "run_config.hpp"

using nlohmann::json;
using namespace wscli;

namespace {

RunConfig roundtrip(const RunConfig& c) { return parse_config(serialize_config(c)); }

}  // namespace

TEST_CASE("defaults") {
  auto c = parse_config(json::object());
  CHECK(c.model == "kerr");
  CHECK(c.cutoff == 30);
  CHECK(c.seed == 7);
  CHECK(c == RunConfig{});
}

TEST_CASE("round trip for every model") {
  auto k = parse_config(json::parse(R"({"model":"kerr","task":"green",
      "parameters":{"U":2.0,"kappa":0.5,"n_th":0.2},
      "ranges":{"domain":"frequency","omega":{"start":-1,"stop":1,"step":0.5}},
      "cutoff":40,"tolerances":{"match":1e-8},"seed":3})"));
  CHECK(k.kerr.U == 2.0);
  CHECK(k.omega.step == 0.5);
  CHECK(roundtrip(k) == k);

  auto i = parse_config(json::parse(R"({"model":"ising","parameters":{"n":2,
      "J":[[0,0.5],[0.5,0]],"h":[0.1,0.2],"gamma_minus":[1,1],"gamma_plus":[1,1],
      "gamma_phi":[0,0]}})"));
  CHECK_FALSE(i.ising.random);
  CHECK(i.ising.J.size() == 4);
  CHECK(roundtrip(i) == i);

  auto r = parse_config(json::parse(R"({"model":"ising","parameters":{"n":4,"random":true}})"));
  CHECK(r.ising.random);
  CHECK(roundtrip(r) == r);

  auto m = parse_config(json::parse(R"({"model":"multimode-kerr"})"));
  CHECK(m.multimode.modes.size() == 2);
  CHECK(roundtrip(m) == m);
}

TEST_CASE("schema version is written") {
  CHECK(serialize_config(RunConfig{})["schema_version"] == kSchemaVersion);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"schema_version":2})")), ConfigError);
}

TEST_CASE("invalid input names the field") {
  auto expect_field = [](const char* text, const char* field) {
    try {
      parse_config(json::parse(text)).validate();
      FAIL("accepted: " << std::string(text));
    } catch (const ConfigError& e) {
      CHECK_MESSAGE(std::string(e.what()).find(field) != std::string::npos, std::string(e.what()));
    }
  };
  expect_field(R"({"bogus":1})", "bogus");
  expect_field(R"({"parameters":{"kapa":1}})", "kapa");
  expect_field(R"({"parameters":{"kappa":-1}})", "kappa");
  expect_field(R"({"model":"spin-glass"})", "model");
  expect_field(R"({"cutoff":"thirty"})", "cutoff");
  expect_field(R"({"output":{"format":"xml"}})", "format");
  expect_field(R"({"ranges":{"t":{"start":0,"stop":1,"step":0}}})", "step");
  expect_field(R"({"tolerances":{"match":0}})", "match");
  expect_field(R"({"model":"ising","parameters":{"n":2,"J":[[0,1],[0.5,0]],"h":[0,0],
      "gamma_minus":[1,1],"gamma_plus":[1,1],"gamma_phi":[0,0]}})",
               "J");
  expect_field(R"({"model":"multimode-kerr","parameters":{"modes":[{"U":1,"kappa":-2}]}})",
               "kappa");
}

TEST_CASE("grid points") {
  Grid g{0.0, 1.0, 0.1};
  auto p = g.points();
  CHECK(p.size() == 11);
  CHECK(p.back() == doctest::Approx(1.0));
  CHECK(Grid{2.0, 2.0, 0.5}.points().size() == 1);
}

TEST_CASE("load from file") {
  const char* path = "test_config_tmp.json";
  {
    std::ofstream f(path);
    f << R"({"model":"kerr","cutoff":12})";
  }
  CHECK(load_config(path).cutoff == 12);
  CHECK_THROWS_AS(load_config("does/not/exist.json"), ConfigError);
  {
    std::ofstream f(path);
    f << "{ not json";
  }
  CHECK_THROWS_AS(load_config(path), ConfigError);
  std::remove(path);
}
