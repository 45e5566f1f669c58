#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "calibrax/cli.hpp"
#include "calibrax/data.hpp"
#include "test_util.hpp"

using namespace calibrax;
using calibrax::testing::TempDir;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) { return read_file(p); }

}  // namespace

TEST_CASE("simulate is reproducible and writes atomically") {
  TempDir dir;
  const auto a = (dir / "a.csv").string();
  const auto b = (dir / "b.csv").string();
  CHECK(cli({"--seed", "1", "simulate", "--dist", "D1", "--n", "100", "--out", a}).code == 0);
  CHECK(cli({"--seed", "1", "simulate", "--dist", "D1", "--n", "100", "--out", b}).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(load_pairs(a).size() == 100);
  // Only the final file remains.
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path()))
    ++entries;
  CHECK(entries == 2);
  // Without --out the artifact goes to stdout and nothing else does.
  const auto r = cli({"--seed", "1", "simulate", "--dist", "D1", "--n", "100"});
  CHECK(r.out == slurp(a));
}

TEST_CASE("metrics report with ks") {
  TempDir dir;
  const auto in = (dir / "two.csv").string();
  write_file_atomic(in, "confidence,hit\n0.2,0\n0.8,1\n");
  const auto r = cli({"metrics", "--in", in, "--metrics", "ks"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["metrics"]["ks"].get<double>() == doctest::Approx(0.1));
  CHECK(j["schema_version"] == 1);
  CHECK(j["config"]["bins"] == 15);

  const auto csv = cli({"--format", "csv", "metrics", "--in", in, "--metrics", "ks"});
  CHECK(csv.out.rfind("metric,value\nks,0.1", 0) == 0);
}

TEST_CASE("runtime and usage errors") {
  const auto missing = cli({"estimate", "--in", "/nonexistent/missing.csv"});
  CHECK(missing.code == 1);
  CHECK(missing.err.rfind("error E_IO:", 0) == 0);
  CHECK(missing.out.empty());

  const auto unknown = cli({"estimate", "--in", "x.csv", "--bogus"});
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find("E_USAGE") != std::string::npos);

  CHECK(cli({}).code == 2);
  CHECK(cli({"simulate", "--dist", "D9", "--n", "5"}).code == 1);
  CHECK(cli({"metrics", "--in", "x.csv", "--metrics", "nope"}).code != 0);

  TempDir dir;
  const auto bad = (dir / "bad.csv").string();
  write_file_atomic(bad, "confidence,hit\n1.2,1\n");
  const auto parse = cli({"metrics", "--in", bad});
  CHECK(parse.code == 1);
  CHECK(parse.err.find("E_PARSE") != std::string::npos);
  CHECK(parse.err.find("line 2") != std::string::npos);
}

TEST_CASE("curve-eval") {
  TempDir dir;
  const auto curve = (dir / "c.json").string();
  write_file_atomic(curve, R"({"alpha": 1, "beta": 1, "c": 0})");
  const auto r = cli({"curve-eval", "--curve", curve, "--grid", "4"});
  REQUIRE(r.code == 0);
  CHECK(r.out == "s,g\n0,0\n0.25,0.25\n0.5,0.5\n0.75,0.75\n1,1\n");
  CHECK(cli({"curve-eval", "--curve", curve, "--grid", "0"}).code == 2);
  write_file_atomic(curve, R"({"alpha": -1, "beta": 1, "c": 0})");
  CHECK(cli({"curve-eval", "--curve", curve}).code == 1);
}

TEST_CASE("estimate then curve-eval gives a monotone curve") {
  TempDir dir;
  const auto data = (dir / "d.csv").string();
  const auto curve = (dir / "c.json").string();
  REQUIRE(cli({"--seed", "4", "simulate", "--dist", "D1", "--n", "2000", "--out", data}).code == 0);
  REQUIRE(cli({"estimate", "--in", data, "--out", curve}).code == 0);
  const auto j = nlohmann::json::parse(slurp(curve));
  CHECK(j.contains("diagnostics"));
  const auto r = cli({"curve-eval", "--curve", curve, "--grid", "1000"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  double prev = -1.0;
  int rows = 0;
  while (std::getline(in, line)) {
    const double g = std::stod(line.substr(line.find(',') + 1));
    CHECK(g >= prev);
    prev = g;
    ++rows;
  }
  CHECK(rows == 1001);
}

TEST_CASE("ingest-logits and calibrate") {
  TempDir dir;
  const auto logits = (dir / "l.jsonl").string();
  std::string body;
  for (int i = 0; i < 60; ++i) {
    const double a = 0.1 * (i % 17), b = 0.05 * (i % 11);
    body += "{\"logits\": [" + std::to_string(a) + ", " + std::to_string(b) +
            ", 0.3], \"label\": " + std::to_string(i % 3) + "}\n";
  }
  write_file_atomic(logits, body);
  const auto pairs = (dir / "p.csv").string();
  REQUIRE(cli({"ingest-logits", "--in", logits, "--out", pairs}).code == 0);
  CHECK(load_pairs(pairs).size() == 60);

  const auto out = (dir / "cal.csv").string();
  const auto map = (dir / "map.json").string();
  for (const std::string method : {"hb", "platt", "isotonic"}) {
    REQUIRE(cli({"calibrate", "--method", method, "--train", pairs, "--apply", pairs,
                 "--out", out, "--bins", "5", "--map-out", map})
                .code == 0);
    const auto before = load_pairs(pairs);
    const auto after = load_pairs(out);
    REQUIRE(after.size() == before.size());
    for (std::size_t i = 0; i < after.size(); ++i) CHECK(after[i].hit == before[i].hit);
    CHECK(nlohmann::json::parse(slurp(map))["kind"] == method);
  }
  REQUIRE(cli({"calibrate", "--method", "temp", "--train", logits, "--apply", logits,
               "--out", out})
              .code == 0);
  CHECK(cli({"calibrate", "--method", "temp", "--train", pairs, "--apply", pairs}).code == 2);
}

TEST_CASE("benchmark subcommand") {
  TempDir dir;
  const auto report = (dir / "r.json").string();
  const auto trials = (dir / "t.csv").string();
  const auto r = cli({"--seed", "2", "--quiet", "benchmark", "--kind", "metrics", "--dists",
                      "D3", "--sizes", "300", "--runs", "2", "--metrics", "ece,ks",
                      "--out", report, "--per-trial", trials});
  REQUIRE(r.code == 0);
  CHECK(r.err.empty());
  const auto j = nlohmann::json::parse(slurp(report));
  CHECK(j["kind"] == "metrics");
  CHECK(j["cells"].size() == 2);
  std::istringstream in(slurp(trials));
  std::string line;
  int rows = -1;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 4);
  CHECK(cli({"benchmark", "--sizes", "5:1:1"}).code == 2);
}
