#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ideagen/dataset.hpp"
#include "ideagen/errors.hpp"
#include "ideagen/keywords.hpp"
#include "ideagen/text.hpp"
#include "support.hpp"

using namespace ideagen;
using namespace ideagen::dataset;

namespace {

corpus::PatentRecord rec(std::string id, std::string title) {
  return {std::move(id), std::move(title), "toys", corpus::parse_date("2020-01-01"), {"A63H"}};
}

std::string random_field(std::mt19937& gen, bool lower) {
  static const std::string alphabet = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJ0123456789-,.()'";
  std::uniform_int_distribution<int> nwords(1, 6), wlen(1, 9), ch(0, static_cast<int>(alphabet.size()) - 1);
  std::string out;
  for (int w = nwords(gen); w > 0; --w) {
    if (!out.empty()) out.push_back(' ');
    for (int c = wlen(gen); c > 0; --c) out.push_back(alphabet[ch(gen)]);
  }
  return lower ? text::to_lower(out) : out;
}

}  // namespace

TEST_CASE("build_pairs") {
  const auto first_word = [](const corpus::PatentRecord& r) {
    const auto words = keywords::title_words(r.title);
    if (words.empty() || words[0] == "the") throw DataError("no candidates");
    return words[0];
  };
  SUBCASE("all succeed, order preserved") {
    const std::vector<corpus::PatentRecord> records{rec("1", "Toy gun set one"), rec("2", "Dart board for kids"),
                                                    rec("3", "Rolling toy air gun")};
    const auto r = build_pairs(records, first_word);
    CHECK(r.skipped == 0);
    REQUIRE(r.pairs.size() == 3);
    CHECK(r.pairs[0] == KeywordTitlePair{"toy", "Toy gun set one"});
    CHECK(r.pairs[2] == KeywordTitlePair{"rolling", "Rolling toy air gun"});
  }
  SUBCASE("one all-stopword title of three is skipped") {
    const std::vector<corpus::PatentRecord> records{rec("1", "Toy gun set one"), rec("2", "The of the"),
                                                    rec("3", "Rolling toy air gun")};
    const auto r = build_pairs(records, first_word);
    CHECK(r.skipped == 1);
    CHECK(r.pairs.size() == 2);
  }
  SUBCASE("widespread failure is an error") {
    std::vector<corpus::PatentRecord> records;
    for (int i = 0; i < 20; ++i) records.push_back(rec(std::to_string(i), i < 3 ? "The a b" : "Toy a b c"));
    CHECK_THROWS_AS(build_pairs(records, first_word), DataError);
  }
  SUBCASE("keyword must be a phrase of its title") {
    const std::vector<corpus::PatentRecord> records{rec("1", "Toy gun set one")};
    CHECK_THROWS_AS(build_pairs(records, [](const corpus::PatentRecord&) { return std::string("gun toy"); }),
                    DataError);
  }
}

TEST_CASE("generated rolling-toy corpus: keywords are sub-phrases") {
  const std::vector<std::string> adjectives{"Compact", "Foldable", "Electric", "Wooden", "Remote controlled"};
  const std::vector<std::string> nouns{"car", "launcher", "track set", "figure", "spinning top with lights"};
  std::vector<corpus::PatentRecord> records;
  for (int i = 0; i < 200; ++i) {
    records.push_back(rec("R" + std::to_string(i), adjectives[i % 5] + " rolling toy " + nouns[(i / 5) % 5]));
  }
  const keywords::HashEmbeddingBackend backend(32, 9);
  const keywords::ExtractOptions opts{1, 2, keywords::default_stopwords()};
  const auto r = build_pairs(records, [&](const corpus::PatentRecord& x) {
    return keywords::extract_keyword(x.title, backend, opts);
  });
  REQUIRE(r.pairs.size() == 200);
  for (const auto& p : r.pairs) {
    const auto title = " " + text::join(keywords::title_words(p.title), " ") + " ";
    CHECK(title.find(" " + p.keyword + " ") != std::string::npos);
  }
}

TEST_CASE("example format") {
  CHECK(format_example({"air gun", "Rolling toy air gun"}) == "<|s|>air gun => Rolling toy air gun<|e|>");
  CHECK(parse_example("<|s|>gun => Toy gun set<|e|>") == KeywordTitlePair{"gun", "Toy gun set"});
  CHECK_THROWS_AS(validate_pair({"air<|e|>gun", "Toy gun"}), DataError);
  CHECK_THROWS_AS(validate_pair({"gun", "Toy => gun"}), DataError);
  CHECK_THROWS_AS(validate_pair({"gun", "Toy\ngun"}), DataError);
  CHECK_THROWS_AS(validate_pair({"", "Toy gun"}), DataError);
  CHECK_THROWS_AS(validate_pair({"gun", " Toy gun"}), DataError);
  CHECK_THROWS_AS(parse_example("<|s|>gun =>    <|e|>"), DataError);
  CHECK_THROWS_AS(parse_example("<|s|>gun => Toy"), DataError);
  CHECK_THROWS_AS(parse_example("gun => Toy<|e|>"), DataError);
  try {
    parse_example("<|s|>gun Toy<|e|>");
    FAIL("expected an error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).starts_with("offset 5"));
  }
}

TEST_CASE("format/parse round-trip on random pairs") {
  std::mt19937 gen(42);
  for (int i = 0; i < 1000; ++i) {
    const KeywordTitlePair pair{random_field(gen, true), random_field(gen, false)};
    REQUIRE_NOTHROW(validate_pair(pair));
    CHECK(parse_example(format_example(pair)) == pair);
  }
}

TEST_CASE("serialize_dataset") {
  testing::TempDir dir("dataset");
  std::vector<KeywordTitlePair> pairs;
  for (int i = 0; i < 30; ++i) pairs.push_back({"kw" + std::to_string(i), "Title number " + std::to_string(i)});
  const auto m = serialize_dataset(pairs, dir / "a.txt", 5, "toys", "abc");
  serialize_dataset(pairs, dir / "b.txt", 5, "toys", "abc");
  serialize_dataset(pairs, dir / "c.txt", 6, "toys", "abc");
  CHECK(io::read_file(dir / "a.txt") == io::read_file(dir / "b.txt"));
  CHECK(io::read_file(dir / "a.txt") != io::read_file(dir / "c.txt"));

  auto loaded = load_dataset(dir / "a.txt");
  CHECK(loaded.size() == 30);
  CHECK(loaded != pairs);  // shuffled
  std::sort(loaded.begin(), loaded.end(), [](auto& a, auto& b) { return a.keyword < b.keyword; });
  auto sorted = pairs;
  std::sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) { return a.keyword < b.keyword; });
  CHECK(loaded == sorted);

  CHECK(m.n_pairs == 30);
  const auto back = load_manifest(manifest_path(dir / "a.txt"));
  CHECK(back.domain_id == "toys");
  CHECK(back.n_pairs == 30);
  CHECK(back.shuffle_seed == 5);
  CHECK(back.source_corpus_hash == "abc");

  CHECK_THROWS_AS(serialize_dataset({}, dir / "empty.txt", 1), DataError);
  io::write_file(dir / "bad.txt", "<|s|>a => B<|e|>\nnot an example\n");
  try {
    load_dataset(dir / "bad.txt");
    FAIL("expected an error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}
