#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cctype>
#include <random>

#include "ideagen/errors.hpp"
#include "ideagen/fixture.hpp"
#include "ideagen/keywords.hpp"
#include "ideagen/text.hpp"
#include "support.hpp"

using namespace ideagen;
using namespace ideagen::keywords;

namespace {

std::vector<std::string> texts(const std::vector<CandidatePhrase>& c) {
  std::vector<std::string> out;
  for (const auto& p : c) out.push_back(p.text);
  return out;
}

double norm(const Vector& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

class FailingBackend final : public EmbeddingBackend {
 public:
  int dimension() const override { return 2; }

 protected:
  Vector do_embed(std::string_view text) const override {
    if (text == "bad") throw std::runtime_error("boom");
    return {1.0, 0.0};
  }
};

class WrongDimBackend final : public EmbeddingBackend {
 public:
  int dimension() const override { return 3; }

 protected:
  Vector do_embed(std::string_view) const override { return {1.0}; }
};

}  // namespace

TEST_CASE("candidate enumeration") {
  ExtractOptions opts;
  CHECK(texts(extract_candidates("Rolling toy air gun", opts)) ==
        std::vector<std::string>{"rolling", "toy", "air", "gun", "rolling toy", "toy air", "air gun"});

  opts.stopwords = {"with"};
  const auto c = texts(extract_candidates("Toy with container", opts));
  CHECK(c == std::vector<std::string>{"toy", "container"});

  opts.stopwords = {"the", "of"};
  try {
    extract_candidates("The of", opts);
    FAIL("expected an error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()) == "no candidates");
  }
}

TEST_CASE("candidates are deduplicated and punctuation stripped") {
  ExtractOptions opts;
  opts.ngram_max = 1;
  CHECK(texts(extract_candidates("Toy, toy (gun).", opts)) == std::vector<std::string>{"toy", "gun"});
  CHECK(title_words("Self-propelled toy -- gun!") ==
        std::vector<std::string>{"self-propelled", "toy", "gun"});
}

TEST_CASE("extract_keyword with hand-set vectors") {
  ExtractOptions opts;
  opts.ngram_max = 1;
  SUBCASE("single candidate") {
    const TableEmbeddingBackend b(2, {{"gun", {1, 0}}});
    CHECK(extract_keyword("Gun", b, opts) == "gun");
  }
  SUBCASE("identity alignment") {
    const TableEmbeddingBackend b(2, {{"toy gun", {1, 0}}, {"gun", {1, 0}}, {"toy", {0, 1}}});
    CHECK(extract_keyword("Toy gun", b, opts) == "gun");
  }
  SUBCASE("five candidates against a brute-force argmax") {
    opts.ngram_max = 2;
    const std::map<std::string, Vector> table{
        {"spring loaded dart", {0.9, 0.3, 0.1}}, {"spring", {0.2, 0.9, 0.0}},
        {"loaded", {0.1, 0.1, 0.9}},             {"dart", {0.7, 0.5, 0.3}},
        {"spring loaded", {0.5, 0.6, 0.2}},      {"loaded dart", {0.85, 0.35, 0.12}}};
    const TableEmbeddingBackend b(3, table);
    const auto& title = table.at("spring loaded dart");
    std::string best;
    double best_score = -2;
    for (const auto& [text, v] : table) {
      if (text == "spring loaded dart") continue;
      const double s = testing::brute_cosine(title, v);
      if (s > best_score) best_score = s, best = text;
    }
    CHECK(best == "loaded dart");
    CHECK(extract_keyword("Spring loaded dart", b, opts) == best);
  }
  SUBCASE("ties go to the earliest span") {
    const TableEmbeddingBackend b(2, {{"toy gun", {1, 0}}, {"gun", {1, 0}}, {"toy", {1, 0}}});
    CHECK(extract_keyword("Toy gun", b, opts) == "toy");
  }
}

TEST_CASE("hash backend: deterministic, unit norm, seeded") {
  const HashEmbeddingBackend b(16, 3), other(16, 4);
  CHECK(b.embed("air gun") == b.embed("air gun"));
  CHECK(b.embed("Air  Gun") == b.embed("air gun"));
  CHECK(b.embed("air gun") != other.embed("air gun"));
  CHECK(norm(b.embed("air")) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(b.embed("air gun").size() == 16);
}

TEST_CASE("embed_batch") {
  const HashEmbeddingBackend b(8, 1);
  CHECK(embed_batch({}, b).empty());
  const auto same = embed_batch({"a", "a"}, b);
  CHECK(same[0] == same[1]);
  for (const auto& v : embed_batch({"a", "b"}, b)) CHECK(std::abs(norm(v) - 1.0) < 1e-6);

  FailingBackend failing;
  try {
    embed_batch({"ok", "ok", "bad"}, failing);
    FAIL("expected an error");
  } catch (const BackendError& e) {
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
  WrongDimBackend wrong;
  CHECK_THROWS_AS(wrong.embed("x"), BackendError);
  const TableEmbeddingBackend table(2, {});
  CHECK_THROWS_AS(table.embed("unknown"), BackendError);
}

TEST_CASE("cosine") {
  CHECK(cosine({1, 1, 0}, {1, 0, 1}) == doctest::Approx(0.5));
  CHECK(cosine({1, 0}, {0, 1}) == 0.0);
  CHECK(cosine({0, 0}, {1, 0}) == 0.0);
}

TEST_CASE("keyword always lies inside its title (property)") {
  const HashEmbeddingBackend b(32, 11);
  const ExtractOptions opts{1, 2, default_stopwords()};
  for (const auto& domain : fixture::available_domains()) {
    for (const auto& title : fixture::toy_titles(domain, 40, 5)) {
      std::string kw;
      try {
        kw = extract_keyword(title, b, opts);
      } catch (const DataError&) {
        continue;
      }
      const auto words = text::join(title_words(title), " ");
      CHECK((" " + words + " ").find(" " + kw + " ") != std::string::npos);
    }
  }
}

TEST_CASE("stopword file and keyword cache") {
  testing::TempDir dir("kw");
  io::write_file(dir / "stop.txt", "# comment\nThe\n\nof\n");
  CHECK(load_stopwords(dir / "stop.txt") == std::set<std::string>{"the", "of"});
  CHECK(default_stopwords().contains("with"));

  {
    KeywordCache cache(dir / "cache.tsv");
    CHECK_FALSE(cache.get("US1"));
    cache.put("US1", "air gun");
    cache.put("US2", "dart");
  }
  KeywordCache resumed(dir / "cache.tsv");
  CHECK(resumed.size() == 2);
  CHECK(resumed.get("US1") == std::optional<std::string>("air gun"));
}
