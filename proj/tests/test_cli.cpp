#include <doctest.h>

#include <algorithm>
#include <filesystem>

#include <json.hpp>

#include "test_support.hpp"

using namespace testsupport;
namespace fs = std::filesystem;

namespace {

std::string data(const std::string& name) { return (data_dir() / name).string(); }

}  // namespace

TEST_CASE("cli: compas-repro replays the audit and exits zero") {
  TempDir dir;
  auto result = run_cli("compas-repro --fixture " + data("compas_reference_counts.txt"), dir);
  CHECK(result.exit_code == 0);
  CHECK(result.out.find("24/24 metrics matched") != std::string::npos);
  CHECK(result.out.find("REPLICATION OK") != std::string::npos);
}

TEST_CASE("cli: compas-repro --json emits per-cell pass/fail") {
  TempDir dir;
  auto result = run_cli("compas-repro --json --fixture " + data("compas_reference_counts.txt"), dir);
  REQUIRE(result.exit_code == 0);
  auto j = nlohmann::json::parse(result.out);
  CHECK(j["all_pass"] == true);
  CHECK(j["accuracy_cells"].size() == 24);
  for (const auto& cell : j["accuracy_cells"]) {
    CHECK(cell["pass"] == true);
  }
  CHECK(j["audit_run"]["tool"] == "fairaudit");
}

TEST_CASE("cli: compas-repro CSV pipeline check passes on the bundled file") {
  TempDir dir;
  auto result = run_cli("compas-repro --fixture " + data("compas_reference_counts.txt") +
                            " --csv " + data("compas_synthetic.csv") + " --json",
                        dir);
  REQUIRE(result.exit_code == 0);
  auto j = nlohmann::json::parse(result.out);
  CHECK(j["csv_check"]["pass"] == true);
  CHECK(j["csv_check"]["diffs"].empty());
  CHECK(j["csv_check"]["rows_audited"] == 7214);
}

TEST_CASE("cli: corrupted fixture exits with the integrity code") {
  TempDir dir;
  std::string contents = slurp(data_dir() / "compas_reference_counts.txt");
  auto pos = contents.find("2035");
  contents.replace(pos, 4, "2036");
  write_file(dir.file("bad_fixture.txt"), contents);
  auto result = run_cli("compas-repro --fixture " + dir.file("bad_fixture.txt").string(), dir);
  CHECK(result.exit_code == 5);
}

TEST_CASE("cli: audit writes reports and reruns byte-identically") {
  TempDir dir;
  fs::path out1 = dir.file("run1");
  fs::path out2 = dir.file("run2");
  std::string base = "audit --input " + data("compas_synthetic.csv") +
                     " --truth-col two_year_recid --score-col decile_score --cutoff 5"
                     " --group-col race --group-a African-American --group-b Caucasian"
                     " --epsilon 0.1";
  auto first = run_cli(base + " --out-dir " + out1.string(), dir);
  REQUIRE(first.exit_code == 0);
  auto second = run_cli(base + " --out-dir " + out2.string(), dir);
  REQUIRE(second.exit_code == 0);

  std::string json1 = slurp(out1 / "audit_report.json");
  std::string json2 = slurp(out2 / "audit_report.json");
  // The out-dir is part of the embedded command; normalize it away.
  auto scrub = [](std::string s, const std::string& needle) {
    for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle)) {
      s.erase(pos, needle.size());
    }
    return s;
  };
  CHECK(scrub(json1, out1.string()) == scrub(json2, out2.string()));

  auto j = nlohmann::json::parse(json1);
  REQUIRE(j["reports"].size() == 1);
  CHECK(j["reports"][0]["independence"]["verdict"] == "violated");
  CHECK(j["reports"][0]["separation"]["verdict"] == "violated");
  CHECK(j["reports"][0]["sufficiency"]["verdict"] == "satisfied");
  CHECK(j["audit_run"]["command"].get<std::string>().find("fairaudit audit") == 0);
}

TEST_CASE("cli: audit --all-pairs enumerates every unordered pair") {
  TempDir dir;
  write_file(dir.file("three.csv"),
             "y,p,g\n1,1,a\n0,0,a\n1,0,b\n0,1,b\n1,1,c\n0,0,c\n");
  fs::path out = dir.file("out");
  auto result = run_cli("audit --input " + dir.file("three.csv").string() +
                            " --truth-col y --pred-col p --group-col g --all-pairs --out-dir " +
                            out.string(),
                        dir);
  REQUIRE(result.exit_code == 0);
  auto j = nlohmann::json::parse(slurp(out / "audit_report.json"));
  CHECK(j["reports"].size() == 3);
}

TEST_CASE("cli: audit with a missing column exits with the schema code and writes nothing") {
  TempDir dir;
  fs::path out = dir.file("out");
  auto result = run_cli("audit --input " + data("compas_synthetic.csv") +
                            " --truth-col nonexistent --score-col decile_score"
                            " --group-col race --group-a a --group-b b --out-dir " +
                            out.string(),
                        dir);
  CHECK(result.exit_code == 2);
  CHECK(result.err.find("nonexistent") != std::string::npos);
  CHECK((!fs::exists(out) || fs::is_empty(out)));
}

TEST_CASE("cli: audit rejects conflicting schema options with the config code") {
  TempDir dir;
  auto result = run_cli("audit --input " + data("compas_synthetic.csv") +
                            " --truth-col two_year_recid --group-col race"
                            " --group-a a --group-b b --epsilon 2.0 --score-col decile_score",
                        dir);
  CHECK(result.exit_code == 4);
}

TEST_CASE("cli: gaming requires a seed") {
  TempDir dir;
  auto result = run_cli("gaming --agents 50", dir);
  CHECK(result.exit_code == 4);
  CHECK(result.err.find("seed") != std::string::npos);
}

TEST_CASE("cli: gaming rejects unknown config keys, naming them") {
  TempDir dir;
  write_file(dir.file("bad.cfg"), "seed = 1\nturbo = yes\n");
  auto result = run_cli("gaming --config " + dir.file("bad.cfg").string(), dir);
  CHECK(result.exit_code == 4);
  CHECK(result.err.find("turbo") != std::string::npos);
}

TEST_CASE("cli: gaming trace is reproducible and shows round-1 dysfunction") {
  TempDir dir;
  std::string base = "gaming --seed 5 --agents 200 --rounds 3 --out ";
  auto first = run_cli(base + dir.file("t1.csv").string(), dir);
  REQUIRE(first.exit_code == 0);
  auto second = run_cli(base + dir.file("t2.csv").string(), dir);
  REQUIRE(second.exit_code == 0);
  std::string trace1 = slurp(dir.file("t1.csv"));
  CHECK(trace1 == slurp(dir.file("t2.csv")));

  // The sidecar summary carries the reproduction header.
  auto summary = nlohmann::json::parse(slurp(dir.file("t1.csv.json")));
  CHECK(summary["audit_run"]["command"].get<std::string>().find("fairaudit gaming") == 0);
  CHECK(summary["final"]["acceptance_rate"] == 1.0);

  // Round 1 acceptance column reads exactly 1 under the unbounded default.
  std::istringstream lines(trace1);
  std::string line;
  std::getline(lines, line);  // header
  std::getline(lines, line);  // round 0
  REQUIRE(std::getline(lines, line));
  // acceptance_rate is the fifth comma-separated field
  std::size_t pos = 0;
  for (int i = 0; i < 4; ++i) pos = line.find(',', pos) + 1;
  CHECK(line.substr(pos, line.find(',', pos) - pos) == "1");
}

TEST_CASE("cli: gaming --plot-dir writes one SVG per recorded round") {
  TempDir dir;
  fs::path plots = dir.file("plots");
  auto result = run_cli("gaming --seed 5 --agents 100 --rounds 2 --out " +
                            dir.file("t.csv").string() + " --plot-dir " + plots.string(),
                        dir);
  REQUIRE(result.exit_code == 0);
  CHECK(fs::exists(plots / "round_000.svg"));
  CHECK(fs::exists(plots / "round_001.svg"));
}

TEST_CASE("cli: stereotype reports before/after debias on the planted fixture") {
  TempDir dir;
  fs::path out = dir.file("reports");
  auto result = run_cli("stereotype --embeddings " + data("embeddings_planted.vec") +
                            " --wordlist " + data("wordlist_occupations.txt") +
                            " --pair he,she --debias --out-dir " + out.string(),
                        dir);
  REQUIRE(result.exit_code == 0);
  auto j = nlohmann::json::parse(slurp(out / "bias_report.json"));
  double mean_before = j["report"]["mean_score"].get<double>();
  double mean_after = j["debiased_report"]["mean_score"].get<double>();
  CHECK(std::abs(mean_before) > 0.01);
  CHECK(std::abs(mean_after) <= 1e-6);
  CHECK(fs::exists(out / "bias_report_debiased.csv"));
}

TEST_CASE("cli: stereotype --write-debiased emits a loadable vector file") {
  TempDir dir;
  fs::path out = dir.file("reports");
  fs::path debiased = dir.file("debiased.vec");
  auto result = run_cli("stereotype --embeddings " + data("embeddings_planted.vec") +
                            " --wordlist " + data("wordlist_adjectives.txt") +
                            " --pair he,she --debias --write-debiased " + debiased.string() +
                            " --out-dir " + out.string(),
                        dir);
  REQUIRE(result.exit_code == 0);
  REQUIRE(fs::exists(debiased));
  // Round-trips through the loader with the same shape.
  std::string text = slurp(debiased);
  CHECK(text.find("engineer") != std::string::npos);
  CHECK(std::count(text.begin(), text.end(), '\n') == 22);
}

TEST_CASE("cli: stereotype lookup and empty-wordlist errors use the data code") {
  TempDir dir;
  auto missing_attr = run_cli("stereotype --embeddings " + data("embeddings_planted.vec") +
                                  " --wordlist " + data("wordlist_occupations.txt") +
                                  " --pair he,xe --out-dir " + dir.file("a").string(),
                              dir);
  CHECK(missing_attr.exit_code == 3);
  CHECK(missing_attr.err.find("xe") != std::string::npos);

  write_file(dir.file("empty.txt"), "# nothing here\n");
  auto empty = run_cli("stereotype --embeddings " + data("embeddings_planted.vec") +
                           " --wordlist " + dir.file("empty.txt").string() +
                           " --pair he,she --out-dir " + dir.file("b").string(),
                       dir);
  CHECK(empty.exit_code == 3);
}

TEST_CASE("cli: unknown flags exit with the config code; --version reports the tool") {
  TempDir dir;
  CHECK(run_cli("gaming --frobnicate", dir).exit_code == 4);
  auto version = run_cli("--version", dir);
  CHECK(version.exit_code == 0);
  CHECK(version.out.find("fairaudit") != std::string::npos);
}
