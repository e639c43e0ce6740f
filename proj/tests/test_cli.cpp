#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "allpass/cli.hpp"
#include "allpass/polymat.hpp"
#include "doctest.h"
#include "json.hpp"
#include "support.hpp"

using namespace allpass;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("cli");

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("allpass_cli_test_" + std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

void write_polymat(const std::string& path, const PolyMat& p) {
  std::ofstream f(path);
  f << polymat_to_json(p).dump();
}

}  // namespace

TEST_CASE("count prints the documented magnitudes") {
  CliResult r = run_cli({"count", "--n", "4", "--q", "8", "--pairs", "0",
                         "--secs-per-item", "1"});
  CHECK(r.code == 0);
  CHECK(r.out.find("4294967296") != std::string::npos);
  CHECK(r.out.find("≈136.2 years") != std::string::npos);
}

TEST_CASE("roots subcommand emits grouped JSON") {
  TempDir dir;
  write_polymat(dir.file("p.json"), testing::general_pair_example());
  CliResult r = run_cli({"roots", "--in", dir.file("p.json")});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  REQUIRE(j.size() == 1);
  CHECK(j[0]["kind"] == "complex_pair");
  CHECK(j[0]["location"] == "inside");
  CHECK(j[0]["alpha"]["re"].get<double>() == doctest::Approx(0.1290323));
}

TEST_CASE("mirror writes output and report, and round-trips") {
  TempDir dir;
  write_polymat(dir.file("p.json"), testing::general_pair_example());

  CliResult r = run_cli({"mirror", "--in", dir.file("p.json"), "--config", "1",
                         "--method", "qr", "--out", dir.file("m.json"),
                         "--report", dir.file("r.json")});
  REQUIRE(r.code == 0);

  std::ifstream rep(dir.file("r.json"));
  nlohmann::json report = nlohmann::json::parse(rep);
  CHECK(report["passed"]["all"] == true);
  CHECK(report["max_imag"].get<double>() < 1e-8);

  // mirror again with the same config: spectral defect vs the original input
  CliResult r2 = run_cli({"mirror", "--in", dir.file("m.json"), "--config", "1",
                          "--method", "qr", "--out", dir.file("m2.json"),
                          "--report", dir.file("r2.json")});
  REQUIRE(r2.code == 0);
  CliResult v = run_cli({"verify", "--a", dir.file("p.json"), "--b",
                         dir.file("m2.json")});
  REQUIRE(v.code == 0);
  auto vj = nlohmann::json::parse(v.out);
  CHECK(vj["max_spectral_defect"].get<double>() < 1e-8);
}

TEST_CASE("verify of a file against itself is exactly zero") {
  TempDir dir;
  write_polymat(dir.file("p.json"), testing::ma2_example());
  CliResult r = run_cli({"verify", "--a", dir.file("p.json"), "--b",
                         dir.file("p.json")});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["max_spectral_defect"].get<double>() == 0.0);
  CHECK(j["max_allpass_defect"].get<double>() < 1e-12);
}

TEST_CASE("enumerate emits one entry per regime") {
  TempDir dir;
  write_polymat(dir.file("p.json"), testing::ma2_example());
  CliResult r = run_cli({"enumerate", "--in", dir.file("p.json")});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  REQUIRE(j.size() == 4);
  CHECK(j[0]["config"] == "00");
  CHECK(j[3]["config"] == "11");
  for (const auto& regime : j) CHECK(regime["report"]["passed"]["all"] == true);
}

TEST_CASE("blaschke check reports the all-pass defect") {
  TempDir dir;
  {
    std::ofstream f(dir.file("f.json"));
    f << R"({"kind":"elementary","alpha":{"re":4.0}})";
  }
  CliResult r = run_cli({"blaschke", "check", "--in", dir.file("f.json")});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["allpass_defect"].get<double>() < 1e-12);

  {
    std::ofstream f(dir.file("b.json"));
    f << R"({"kind":"bivariate","alpha":{"re":2.0,"im":1.0},)"
         R"("w":[{"re":1.0},{"re":0.0,"im":1.0}]})";
  }
  CliResult rb = run_cli({"blaschke", "check", "--in", dir.file("b.json")});
  REQUIRE(rb.code == 0);
  CHECK(nlohmann::json::parse(rb.out)["allpass_defect"].get<double>() < 1e-9);
}

TEST_CASE("replicate-gmr prints a machine report and a human summary") {
  CliResult r = run_cli({"replicate-gmr", "--case", "purely-complex"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["case"] == "purely-complex");
  CHECK(j["status"] == "DownstreamDimensionError");
  CHECK(r.err.find("purely-complex") != std::string::npos);
}

TEST_CASE("exit codes: domain errors are 1, usage errors are 2") {
  CliResult missing = run_cli({"roots", "--in", "/nonexistent/file.json"});
  CHECK(missing.code == 1);
  auto err = nlohmann::json::parse(missing.err);
  CHECK(err["error"] == "IoError");

  CliResult usage = run_cli({"roots"});
  CHECK(usage.code == 2);
  CHECK(usage.err.find("--in") != std::string::npos);

  CliResult unknown = run_cli({"frobnicate"});
  CHECK(unknown.code == 2);

  TempDir dir;
  write_polymat(dir.file("p.json"), testing::ma2_example());
  CliResult bad_config = run_cli(
      {"mirror", "--in", dir.file("p.json"), "--config", "101", "--method", "qr"});
  CHECK(bad_config.code == 1);
  CHECK(nlohmann::json::parse(bad_config.err)["error"] == "BadConfig");

  CliResult help = run_cli({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("mirror") != std::string::npos);
}

TEST_SUITE_END();
