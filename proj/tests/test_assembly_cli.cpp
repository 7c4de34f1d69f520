#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "catch_amalgamated.hpp"

#include "annpair/cli_harness.hpp"

using namespace annpair;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("annpair_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig small(const std::string& command, const fs::path& out) {
  RunConfig c;
  c.command = command;
  c.n_lo = 2;
  c.n_hi = 3;
  c.j_max = 16;
  c.alpha_samples = 20;
  c.lambda_window = 256;
  c.output_path = out.string();
  return c;
}

}  // namespace

TEST_CASE("n range parsing and validation") {
  CHECK(parse_n_range("2..5") == std::pair{2, 5});
  CHECK(parse_n_range("4") == std::pair{4, 4});
  CHECK_THROWS_AS(parse_n_range("2-5"), ConfigError);
  CHECK_THROWS_AS(parse_n_range("x..3"), ConfigError);
  RunConfig c;
  c.n_lo = 5;
  c.n_hi = 3;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = RunConfig{};
  c.sigma = 1.0;
  CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("digest ignores command and output path") {
  RunConfig a;
  RunConfig b = a;
  b.command = "verify";
  b.output_path = "/elsewhere";
  CHECK(config_digest(a) == config_digest(b));
  b.seed = 2;
  CHECK(config_digest(a) != config_digest(b));
}

TEST_CASE("construct, verify, bm-audit and export run end to end") {
  const auto out = scratch("pipeline");
  std::ostringstream log;
  REQUIRE(run(small("construct", out), log) == exit_code::ok);
  for (const char* f : {"scale_search.csv", "instance_n2.json", "instance_n3.json", "S_n2.json", "Q_n3.json",
                        "Q_assembled.json", "S_assembled.json"}) {
    CHECK(fs::exists(out / f));
  }
  CHECK(run(small("verify", out), log) == exit_code::ok);
  CHECK(fs::exists(out / "concentration.csv"));
  CHECK(fs::exists(out / "thinness.csv"));
  CHECK(run(small("bm-audit", out), log) == exit_code::ok);
  CHECK(fs::exists(out / "lambda.json"));
  CHECK(run(small("export", out), log) == exit_code::ok);
  CHECK(fs::exists(out / "f_samples_n3.csv"));

  const auto digest = config_digest(small("construct", out));
  CHECK(slurp(out / "concentration.csv").rfind("# config_digest: " + digest, 0) == 0);
  const auto inst = read_json_file((out / "instance_n3.json").string());
  CHECK(inst.at("config_digest") == digest);

  // Same config, same bytes.
  const auto again = scratch("pipeline_again");
  REQUIRE(run(small("construct", again), log) == exit_code::ok);
  REQUIRE(run(small("bm-audit", again), log) == exit_code::ok);
  for (const char* f : {"instance_n2.json", "instance_n3.json", "Q_assembled.json", "scale_search.csv",
                        "certificates.csv", "lambda.json"}) {
    CHECK(slurp(out / f) == slurp(again / f));
  }
  fs::remove_all(out);
  fs::remove_all(again);
}

TEST_CASE("instances survive a json round trip") {
  const auto bump = std::make_shared<const Bump>(build_bump());
  const auto inst = build_instance(CounterexampleParams::make(3, 56), bump);
  const auto back = instance_from_json(json::parse(to_json(inst).dump()), bump);
  CHECK(back.params.N == 56);
  CHECK(back.Q_n.measure() == inst.Q_n.measure());
  CHECK(back.f.eval(0.123).value == inst.f.eval(0.123).value);
  auto broken = to_json(inst);
  broken["f"]["bump"]["table_digest"] = "0000000000000000";
  CHECK_THROWS_AS(instance_from_json(broken, bump), FormatError);
}

TEST_CASE("exit codes for failures and bad input") {
  std::ostringstream log;
  auto c = small("construct", scratch("cap"));
  c.n_cap = 20;
  CHECK(run(c, log) == exit_code::check_failed);
  CHECK(log.str().find("n = 2") != std::string::npos);

  c = small("construct", scratch("range"));
  c.n_lo = 1;
  CHECK(run(c, log) == exit_code::config_error);

  c = small("verify", scratch("missing"));
  CHECK(run(c, log) == exit_code::config_error);

  c = small("frobnicate", scratch("cmd"));
  CHECK(run(c, log) == exit_code::config_error);

  const auto dir = scratch("badq");
  fs::create_directories(dir);
  std::ofstream(dir / "q.json") << "{\"type\": \"mystery\"}";
  c = small("bm-audit", dir);
  c.q_file = (dir / "q.json").string();
  CHECK(run(c, log) == exit_code::config_error);
  fs::remove_all(dir);
}

TEST_CASE("an empty q passes every certificate") {
  const auto dir = scratch("emptyq");
  fs::create_directories(dir);
  std::ofstream(dir / "q.json") << "{\"type\": \"intervals\", \"parts\": []}";
  auto c = small("bm-audit", dir);
  c.q_file = (dir / "q.json").string();
  std::ostringstream log;
  CHECK(run(c, log) == exit_code::ok);
  CHECK(log.str().find("20 of 20") != std::string::npos);
  const auto certs = slurp(dir / "certificates.csv");
  CHECK(certs.find(",0\n") == std::string::npos);  // no failing row
  fs::remove_all(dir);
}
