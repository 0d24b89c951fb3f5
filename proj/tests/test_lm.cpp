#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "ideagen/dataset.hpp"
#include "ideagen/errors.hpp"
#include "ideagen/lm.hpp"
#include "ideagen/toy_model.hpp"
#include "support.hpp"

using namespace ideagen;
using namespace ideagen::lm;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::filesystem::path write_pairs(const testing::TempDir& dir, int n) {
  std::vector<dataset::KeywordTitlePair> pairs;
  for (int i = 0; i < n; ++i) pairs.push_back({"k" + std::to_string(i), "Title " + std::to_string(i)});
  const auto path = dir / "data.txt";
  dataset::serialize_dataset(pairs, path, 1);
  return path;
}

double frequency_of_zero(std::span<const double> logits, double temperature, int draws) {
  const CounterRng rng(2024, 0);
  int zeros = 0;
  for (int i = 0; i < draws; ++i) zeros += sample_token(logits, temperature, 50, rng, i) == 0;
  return static_cast<double>(zeros) / draws;
}

}  // namespace

TEST_CASE("top_k_filter") {
  const std::vector<double> l{2.0, 1.0, 0.5};
  CHECK(top_k_filter(l, 2) == Logits{2.0, 1.0, -kInf});
  CHECK(top_k_filter(l, 1) == Logits{2.0, -kInf, -kInf});
  CHECK(top_k_filter(l, 3) == l);
  CHECK(top_k_filter(l, 10) == l);
  CHECK(top_k_filter(std::vector<double>{1.0, 3.0, 3.0, 0.0}, 1) == Logits{-kInf, 3.0, -kInf, -kInf});
}

TEST_CASE("sampling_distribution matches an analytic softmax") {
  const std::vector<double> l{1.0, 0.0};
  const auto p = sampling_distribution(l, 0.9, 50);
  CHECK(p[0] == doctest::Approx(1.0 / (1.0 + std::exp(-1.0 / 0.9))).epsilon(1e-12));
  const auto q = sampling_distribution(std::vector<double>{std::log(2.0), 0.0, -kInf}, 1.0, 50);
  CHECK(q[0] == doctest::Approx(2.0 / 3.0));
  CHECK(q[2] == 0.0);
  const auto r = sampling_distribution(std::vector<double>{3.0, 2.0, 1.0}, 1.0, 2);
  CHECK(r[2] == 0.0);
  CHECK(r[0] + r[1] == doctest::Approx(1.0));
}

TEST_CASE("top_k=1 always returns the argmax") {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> n(0.0, 3.0);
  const CounterRng rng(1, 1);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> l(40);
    for (auto& x : l) x = n(gen);
    const auto argmax = std::max_element(l.begin(), l.end()) - l.begin();
    const double temperature = 0.1 + (trial % 7) * 0.5;
    CHECK(sample_token(l, temperature, 1, rng, trial) == argmax);
  }
}

TEST_CASE("empirical frequencies") {
  const std::vector<double> l{std::log(2.0), std::log(1.0), -kInf};
  const CounterRng rng(77, 0);
  std::map<Token, int> counts;
  for (int i = 0; i < 10000; ++i) ++counts[sample_token(l, 1.0, 50, rng, i)];
  CHECK(std::abs(counts[0] / 10000.0 - 2.0 / 3.0) < 0.02);
  CHECK(std::abs(counts[1] / 10000.0 - 1.0 / 3.0) < 0.02);
  CHECK(counts[2] == 0);

  const double expected = 1.0 / (1.0 + std::exp(-1.0 / 0.9));
  CHECK(expected == doctest::Approx(0.752).epsilon(0.001));
  CHECK(std::abs(frequency_of_zero(std::vector<double>{1.0, 0.0}, 0.9, 10000) - expected) < 0.02);
}

TEST_CASE("sampling errors") {
  const CounterRng rng(1, 1);
  CHECK_THROWS_AS(sample_token(std::vector<double>{-kInf, -kInf}, 1.0, 5, rng, 0), BackendError);
  GenerationConfig bad;
  bad.temperature = 0.0;
  CHECK_THROWS_AS(bad.validate(), UsageError);
  bad = {};
  bad.top_k = 0;
  CHECK_THROWS_AS(bad.validate(), UsageError);
}

TEST_CASE("generate_text with a scripted backend") {
  GenerationConfig cfg;
  cfg.max_new_tokens = 20;
  SUBCASE("stops at the end token") {
    const testing::ScriptedBackend b("air gun");
    const auto g = generate_text(b, "rolling toy", cfg, 0);
    CHECK(g.text == "air gun");
    CHECK_FALSE(g.truncated);
  }
  SUBCASE("cut off at max_new_tokens") {
    const testing::ScriptedBackend b("", true);
    const auto g = generate_text(b, "rolling toy", cfg, 0);
    CHECK(g.text == std::string(20, 'x'));
    CHECK(g.truncated);
  }
}

TEST_CASE("generate_text is deterministic per (seed, sample index)") {
  ToyModelConfig mc;
  mc.hidden = 16;
  mc.init_seed = 3;
  const ToyCharModel m(mc);
  GenerationConfig cfg;
  cfg.max_new_tokens = 30;
  cfg.seed = 11;
  const auto a = generate_text(m, "air gun", cfg, 4);
  const auto b = generate_text(m, "air gun", cfg, 4);
  CHECK(a.text == b.text);
  CHECK(a.truncated == b.truncated);
  bool any_differs = false;
  for (int i = 0; i < 5; ++i) any_differs |= generate_text(m, "air gun", cfg, i).text != a.text;
  CHECK(any_differs);
}

TEST_CASE("char vocabulary maps delimiters to markers") {
  const std::string ex = dataset::format_example({"air gun", "Rolling toy air gun"});
  const auto tokens = CharVocab::encode(ex);
  CHECK(tokens.front() == CharVocab::kStart);
  CHECK(tokens.back() == CharVocab::kEnd);
  CHECK(std::count(tokens.begin(), tokens.end(), CharVocab::kSeparator) == 1);
  CHECK(tokens.size() == 1 + 7 + 1 + 19 + 1);
  CHECK(CharVocab::decode(tokens) == ex);
}

TEST_CASE("toy model: save/load reproduces logits, training reduces loss") {
  testing::TempDir dir("toy");
  ToyModelConfig mc;
  mc.hidden = 24;
  ToyCharModel m(mc);
  const std::vector<std::vector<Token>> batch{m.encode(dataset::format_example({"dart", "Toy dart board"}))};
  const double first = m.train_step(batch, 0.01);
  double last = first;
  for (int i = 0; i < 150; ++i) last = m.train_step(batch, 0.01);
  CHECK(last < 0.5 * first);

  m.save(dir / "m.bin");
  ToyCharModel loaded;
  loaded.load(dir / "m.bin");
  CHECK(loaded.config().hidden == 24);
  const auto ctx = m.encode("<|s|>dart => Toy");
  CHECK(loaded.next_token_logits(ctx) == m.next_token_logits(ctx));
  io::write_file(dir / "junk.bin", "not a model");
  CHECK_THROWS(loaded.load(dir / "junk.bin"));
}

TEST_CASE("finetune: loss trace spacing") {
  testing::TempDir dir("ft");
  const auto data = write_pairs(dir, 10);
  FineTuneConfig cfg;
  cfg.steps = 20000;
  cfg.log_every = 100;
  testing::RecordingBackend b;
  const auto r = finetune(b, data, cfg, dir / "ckpt", "toys");
  REQUIRE(r.trace.points.size() == 200);
  for (std::size_t i = 0; i < 200; ++i) CHECK(r.trace.points[i].step == static_cast<int>(100 * (i + 1)));
  // Each point is the mean of its window of 1/step losses.
  double window = 0;
  for (int s = 1; s <= 100; ++s) window += 1.0 / s;
  CHECK(r.trace.points[0].loss == doctest::Approx(window / 100));

  const auto saved = load_loss_trace(dir / "ckpt/toys/loss.csv");
  CHECK(saved.points == r.trace.points);
  CHECK(r.checkpoint.step == 20000);
  CHECK(latest_checkpoint(dir / "ckpt", "toys").dir == r.checkpoint.dir);

  cfg.steps = 250;
  testing::RecordingBackend b2;
  CHECK(finetune(b2, data, cfg, dir / "ckpt2", "toys").trace.points.size() == 2);
}

TEST_CASE("finetune: cycles the shuffled dataset") {
  testing::TempDir dir("ft");
  const auto data = write_pairs(dir, 10);
  FineTuneConfig cfg;
  cfg.steps = 100;
  cfg.log_every = 10;
  cfg.checkpoint_every = 40;
  testing::RecordingBackend b;
  const auto r = finetune(b, data, cfg, dir / "ckpt", "toys");
  CHECK(r.examples_seen == 100);
  REQUIRE(b.seen.size() == 100);
  std::map<std::string, int> counts;
  for (const auto& s : b.seen) ++counts[s];
  CHECK(counts.size() == 10);
  for (const auto& [text, n] : counts) CHECK(n == 10);
  for (std::size_t i = 10; i < 100; ++i) CHECK(b.seen[i] == b.seen[i - 10]);
  CHECK(std::filesystem::exists(checkpoint_dir(dir / "ckpt", "toys", 40) / "model.bin"));
  CHECK(std::filesystem::exists(checkpoint_dir(dir / "ckpt", "toys", 80) / "model.bin"));
  CHECK(latest_checkpoint(dir / "ckpt", "toys").step == 100);
}

TEST_CASE("finetune: non-finite loss aborts with the step") {
  testing::TempDir dir("ft");
  const auto data = write_pairs(dir, 5);
  FineTuneConfig cfg;
  cfg.steps = 50;
  testing::RecordingBackend b([](int step) { return step == 7 ? std::nan("") : 1.0; });
  try {
    finetune(b, data, cfg, dir / "ckpt", "toys");
    FAIL("expected an error");
  } catch (const BackendError& e) {
    CHECK(std::string(e.what()) == "non-finite loss at step 7");
  }
  CHECK_THROWS_AS(latest_checkpoint(dir / "ckpt", "toys"), DataError);
  cfg.steps = 0;
  CHECK_THROWS_AS(finetune(b, data, cfg, dir / "ckpt", "toys"), UsageError);
}
