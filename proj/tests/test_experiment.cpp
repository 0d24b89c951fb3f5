#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ideagen/config.hpp"
#include "ideagen/errors.hpp"
#include "ideagen/experiment.hpp"
#include "ideagen/fixture.hpp"
#include "support.hpp"

using namespace ideagen;
using namespace ideagen::experiment;

namespace {

double brute_u(const std::vector<double>& near, const std::vector<double>& far) {
  double u = 0;
  for (double f : far) {
    for (double n : near) u += f > n ? 1.0 : (f == n ? 0.5 : 0.0);
  }
  return u;
}

StudyConfig small_study(const testing::TempDir& dir) {
  fixture::ToyStudyOptions o;
  o.titles_per_domain = 60;
  o.finetune_steps = 300;
  o.n_samples = 12;
  o.max_new_tokens = 40;
  const auto files = fixture::write_toy_study(dir.path(), o);
  auto cfg = load_study_config(files.config);
  cfg.model.hidden = 32;
  return cfg;
}

}  // namespace

TEST_CASE("compare_fields") {
  SUBCASE("fully separated: far lower") {
    const std::vector<double> near{0.5, 0.6, 0.7}, far{0.1, 0.2, 0.3};
    const auto c = compare_fields(near, far);
    CHECK(c.direction == Direction::kFarLower);
    CHECK(c.rank_sum_statistic == 0.0);
    CHECK(c.p_value < 0.05);
    CHECK(to_string(c.direction) == "far_lower");
    CHECK(compare_fields(far, near).direction == Direction::kNearLower);
  }
  SUBCASE("identical samples: indistinct") {
    const std::vector<double> v{0.3, 0.5, 0.9};
    const auto c = compare_fields(v, v);
    CHECK(c.direction == Direction::kIndistinct);
    CHECK(c.p_value == doctest::Approx(1.0));
    const std::vector<double> flat{0.4, 0.4, 0.4};
    CHECK(compare_fields(flat, flat).p_value == 1.0);
  }
  SUBCASE("U statistic against all 16 comparisons") {
    const std::vector<double> near{0.4, 0.5, 0.6, 0.7}, far{0.1, 0.2, 0.3, 0.65};
    CHECK(compare_fields(near, far).rank_sum_statistic == brute_u(near, far));
    CHECK(brute_u(near, far) == 3.0);
    CHECK(compare_fields(far, near).rank_sum_statistic == 13.0);
    CHECK(compare_fields(near, far).median_near == doctest::Approx(0.55));
  }
  SUBCASE("ties count one half") {
    const std::vector<double> near{0.1, 0.2, 0.3}, far{0.2, 0.2, 0.5};
    CHECK(compare_fields(near, far).rank_sum_statistic == brute_u(near, far));
  }
  SUBCASE("too few values") {
    const std::vector<double> two{0.1, 0.2}, three{0.1, 0.2, 0.3};
    try {
      compare_fields(two, three);
      FAIL("expected an error");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()) == "insufficient sample");
    }
  }
}

TEST_CASE("study config parsing") {
  const auto c = parse_study_config(
      "[study]\ntarget_keyword = dart board\ndomains = a, b\nruns_dir = out\n"
      "[corpora]\na = data/a.tsv\n[generate]\ntemperature = 0.7\n[compare]\nnear = a\nfar = b\n",
      "/base");
  CHECK(c.target_keyword == "dart board");
  CHECK(c.domains == std::vector<std::string>{"a", "b"});
  CHECK(c.runs_dir == "/base/out");
  CHECK(c.corpora.at("a") == "/base/data/a.tsv");
  CHECK(c.generate.temperature == 0.7);
  CHECK(c.generate.top_k == 50);
  CHECK(c.generate.n_samples == 500);
  CHECK(c.finetune.steps == 20000);
  CHECK(c.corpus.latest == 20000);
  CHECK(c.near == std::vector<std::string>{"a"});

  CHECK_THROWS_AS(parse_study_config("[study]\nbogus = 1\n"), UsageError);
  CHECK_THROWS_AS(parse_study_config("[nonsense]\nx = 1\n"), UsageError);
  CHECK_THROWS_AS(parse_study_config("[finetune]\nsteps = ten\n"), UsageError);

  auto seeded = c;
  apply_seed(seeded, 123);
  CHECK(seeded.generate.seed == 123);
  CHECK(seeded.finetune.seed == 123);
  CHECK(seeded.model.init_seed == 123);
  CHECK(seeded.shuffle_seed == 123);
}

TEST_CASE("run ids") {
  CHECK(make_run_id("weapons", "Rolling Toy") == "weapons__rolling-toy");
  CHECK(make_run_id("a", "x/y  z") == "a__x-y-z");
}

TEST_CASE("small study end to end") {
  testing::TempDir dir("study");
  auto cfg = small_study(dir);
  cfg.domains.push_back("lighting");
  cfg.corpora["lighting"] = dir / "corpora/missing.tsv";
  const auto result = run_case_study(cfg);

  REQUIRE(result.manifests.size() == 2);
  REQUIRE(result.failures.size() == 1);
  CHECK(result.failures[0].domain_id == "lighting");

  for (const auto& m : result.manifests) {
    CHECK(std::filesystem::exists(m.ideas_file()));
    CHECK(std::filesystem::exists(m.novelty_file()));
    CHECK(m.spec.rank.has_value());
    const auto ideas = ideation::load_ideas(m.ideas_file());
    CHECK(ideas.size() == 12);
    const auto row = report_row(m, 10);
    CHECK(row.stats.n_unique == m.stats.n_unique);
    CHECK(row.stats.n_generated == 12);
    const auto reloaded = load_manifest(m.manifest_file());
    CHECK(reloaded.stats.n_unique == m.stats.n_unique);
    CHECK(reloaded.checkpoint.step == 300);
    CHECK(reloaded.spec.generate.seed == cfg.generate.seed);
  }

  const auto report = io::lines(io::read_file(cfg.runs_dir / "report/report.csv"));
  CHECK(report.size() == 3);
  CHECK(report[1].find('%') != std::string::npos);
  CHECK(std::filesystem::exists(cfg.runs_dir / "report/comparison.json"));
  CHECK(std::filesystem::exists(cfg.runs_dir / "proximity.tsv"));
  CHECK(find_manifests(cfg.runs_dir).size() == 2);

  // Replaying a manifest elsewhere reproduces its artifacts.
  const auto& m = result.manifests[0];
  const auto again = replay(m, dir / "replay");
  CHECK(io::read_file(again.ideas_file()) == io::read_file(m.ideas_file()));
  CHECK(io::read_file(again.novelty_file()) == io::read_file(m.novelty_file()));
}

TEST_CASE("near/far split from ranks") {
  std::vector<RunManifest> manifests(4);
  for (int i = 0; i < 4; ++i) {
    manifests[i].spec.domain_id = "d" + std::to_string(i);
    manifests[i].spec.rank = i + 1;
  }
  std::vector<std::string> notes;
  // A single ranked run leaves the far side empty.
  CHECK(near_far_comparisons(std::span<const RunManifest>(manifests.data(), 1), {}, {}, 0.05, notes).empty());
}
