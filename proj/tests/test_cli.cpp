#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>

#include "ideagen/fixture.hpp"
#include "ideagen/ideation.hpp"
#include "support.hpp"

using namespace ideagen;

namespace {

int run(const std::string& args, const std::filesystem::path& log) {
  const std::string cmd = std::string(IDEAGEN_CLI) + " " + args + " > '" + log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_CASE("usage errors exit 1") {
  testing::TempDir dir("cli");
  const auto log = dir / "log";
  CHECK(run("", log) == 1);
  CHECK(run("frobnicate", log) == 1);
  CHECK(run("ingest", log) == 1);
  CHECK(run("--config " + q(dir / "missing.ini") + " study", log) == 1);
  io::write_file(dir / "bad.ini", "[study]\nnot_a_key = 1\n");
  CHECK(run("--config " + q(dir / "bad.ini") + " study", log) == 1);
  CHECK(run("--help", log) == 0);
}

TEST_CASE("data errors exit 2, backend errors exit 3") {
  testing::TempDir dir("cli");
  const auto log = dir / "log";
  io::write_file(dir / "c.tsv", "US1\t2020-01-01\ttoys\tA\n");
  CHECK(run("ingest --corpus " + q(dir / "c.tsv"), log) == 2);
  CHECK(io::read_file(log).find("line 1: missing title") != std::string::npos);
  CHECK(run("--runs-dir " + q(dir / "runs") + " generate --domain weapons", log) == 2);

  io::write_file(dir / "runs/checkpoints/weapons/5/model.bin", "garbage");
  io::write_file(dir / "runs/checkpoints/weapons/latest", "5\n");
  CHECK(run("--runs-dir " + q(dir / "runs") + " generate --domain weapons", log) == 3);
}

TEST_CASE("step-by-step pipeline") {
  testing::TempDir dir("cli");
  const auto log = dir / "log";
  fixture::ToyStudyOptions o;
  o.titles_per_domain = 40;
  const auto files = fixture::write_toy_study(dir.path(), o);
  const auto corpus = dir / "corpora/weapons.tsv";
  const std::string g = "--runs-dir " + q(dir / "runs") + " --seed 5 ";

  REQUIRE(run(g + "ingest --corpus " + q(corpus) + " --domain weapons --out " + q(dir / "sel.tsv"), log) == 0);
  CHECK(std::filesystem::exists(dir / "sel.tsv"));

  REQUIRE(run(g + "proximity --corpus " + q(corpus) + " " + q(dir / "corpora/toys.tsv") + " " +
                  q(dir / "corpora/lubricants.tsv") + " --domains " + q(files.catalog),
              log) == 0);
  REQUIRE(run(g + "rank --target toys --domains " + q(files.catalog), log) == 0);
  const auto ranked = io::lines(io::read_file(log));
  REQUIRE(ranked.size() == 2);
  CHECK(ranked[0].starts_with("1\t"));

  REQUIRE(run(g + "prepare --corpus " + q(corpus) + " --domain weapons", log) == 0);
  const auto dataset = dir / "runs/datasets/weapons.txt";
  CHECK(std::filesystem::exists(dataset));

  REQUIRE(run(g + "finetune --dataset " + q(dataset) + " --domain weapons --steps 200 --log-every 50", log) == 0);
  CHECK(std::filesystem::exists(dir / "runs/checkpoints/weapons/200/model.bin"));

  REQUIRE(run(g + "generate --domain weapons -n 15 --max-new-tokens 30", log) == 0);
  const auto ideas_file = dir / "runs/weapons__rolling-toy/ideas.jsonl";
  CHECK(ideation::load_ideas(ideas_file).size() == 15);

  REQUIRE(run(g + "score --ideas " + q(ideas_file) + " --terms " + q(files.term_vectors), log) == 0);
  CHECK(std::filesystem::exists(dir / "runs/weapons__rolling-toy/novelty.csv"));
}

TEST_CASE("study and report commands") {
  testing::TempDir dir("cli");
  const auto log = dir / "log";
  fixture::ToyStudyOptions o;
  o.titles_per_domain = 40;
  o.finetune_steps = 200;
  o.n_samples = 10;
  const auto files = fixture::write_toy_study(dir.path(), o);
  REQUIRE(run("--config " + q(files.config) + " study", log) == 0);
  CHECK(io::read_file(log).find("unique ideas") != std::string::npos);
  const auto report = dir / "runs/report/report.csv";
  const auto first = io::read_file(report);
  std::filesystem::remove_all(dir / "runs/report");
  REQUIRE(run("--config " + q(files.config) + " report", log) == 0);
  CHECK(io::read_file(report) == first);
}
