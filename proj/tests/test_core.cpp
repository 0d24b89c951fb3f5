#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "ideagen/errors.hpp"
#include "ideagen/io.hpp"
#include "ideagen/rng.hpp"
#include "ideagen/text.hpp"
#include "support.hpp"

using namespace ideagen;

TEST_CASE("trim and word splitting") {
  CHECK(text::trim("  a b \t") == "a b");
  CHECK(text::trim("   ").empty());
  CHECK(text::split_words("  Rolling  toy\tair gun ") ==
        std::vector<std::string>{"Rolling", "toy", "air", "gun"});
  CHECK(text::split("a\t\tb", '\t') == std::vector<std::string>{"a", "", "b"});
  CHECK(text::to_lower("Air GUN") == "air gun");
}

TEST_CASE("format_double round-trips") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(gen) / (1 + i);
    CHECK(text::parse_double(text::format_double(v)) == v);
  }
  CHECK(text::format_double(0.5) == "0.5");
}

TEST_CASE("numeric parsing rejects trailing garbage") {
  CHECK_THROWS_AS(text::parse_double("1.5x"), DataError);
  CHECK_THROWS_AS(text::parse_int("12x"), DataError);
  CHECK_THROWS_AS(text::parse_int(""), DataError);
  CHECK(text::parse_int("-42") == -42);
}

TEST_CASE("sanitize_utf8 replaces invalid bytes only") {
  CHECK(text::sanitize_utf8("caf\xc3\xa9") == "caf\xc3\xa9");
  CHECK(text::sanitize_utf8("a\xff" "b") == "a\xef\xbf\xbd" "b");
  CHECK(text::sanitize_utf8("\xc3") == "\xef\xbf\xbd");
}

TEST_CASE("csv fields round-trip") {
  const std::vector<std::string> fields{"plain", "with,comma", "with \"quote\"", "", "new\nline"};
  std::vector<std::string> escaped;
  for (const auto& f : fields) escaped.push_back(text::csv_escape(f));
  CHECK(text::parse_csv_line(text::join(escaped, ",")) == fields);
  CHECK(text::csv_escape("plain") == "plain");
}

TEST_CASE("io::lines strips CR and the final empty line") {
  CHECK(io::lines("a\r\nb\n") == std::vector<std::string>{"a", "b"});
  CHECK(io::lines("a\n\nb") == std::vector<std::string>{"a", "", "b"});
  CHECK(io::lines("").empty());
}

TEST_CASE("write_file creates parents; read_file of a missing file is a data error") {
  testing::TempDir dir("core");
  io::write_file(dir / "x/y/z.txt", "hello");
  CHECK(io::read_file(dir / "x/y/z.txt") == "hello");
  CHECK_THROWS_AS(io::read_file(dir / "missing"), DataError);
  CHECK(io::file_hash(dir / "x/y/z.txt").size() == 16);
}

TEST_CASE("counter rng is a pure function of (seed, stream, counter)") {
  const CounterRng a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  for (std::uint64_t i = 0; i < 100; ++i) {
    CHECK(a.bits(i) == b.bits(i));
    CHECK(a.bits(i) != c.bits(i));
    CHECK(a.bits(i) != d.bits(i));
  }
  double sum = 0, sq = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u = a.uniform(i);
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    const double z = a.normal(i);
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.05);
  CHECK(std::abs(sq / n - 1.0) < 0.05);
}

TEST_CASE("seeded_permutation is a deterministic permutation") {
  for (std::size_t n : {0u, 1u, 2u, 17u, 500u}) {
    auto p = seeded_permutation(n, 99);
    CHECK(p == seeded_permutation(n, 99));
    auto sorted = p;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < n; ++i) CHECK(sorted[i] == i);
  }
  CHECK(seeded_permutation(50, 1) != seeded_permutation(50, 2));
}
