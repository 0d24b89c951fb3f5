#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace ideagen::novelty {

// Term embeddings (terms may be multi-word phrases), immutable after load.
class TermVectorStore {
 public:
  TermVectorStore() = default;

  // Throws DataError on a duplicate term or a vector of the wrong dimension.
  void add(std::string term, std::vector<double> vector);

  bool contains(std::string_view term) const;
  const std::vector<double>& vector(std::string_view term) const;
  double norm(std::string_view term) const;

  int dimension() const { return dimension_; }
  std::size_t size() const { return terms_.size(); }
  const std::vector<std::string>& terms() const { return terms_; }
  // Longest phrase in words; bounds the matcher's lookahead.
  int max_phrase_words() const { return max_words_; }

 private:
  std::size_t index_of(std::string_view term) const;

  int dimension_ = 0;
  int max_words_ = 0;
  std::vector<std::string> terms_;
  std::vector<std::vector<double>> vectors_;
  std::vector<double> norms_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Reads the text format: a `N d` header, then N lines of a term (spaces
/// written as underscores) followed by d numbers. Terms are lowercased.
TermVectorStore load_term_vectors(const std::filesystem::path& path);
void save_term_vectors(const TermVectorStore& store, const std::filesystem::path& path);

// Greedy left-to-right longest match of vocabulary phrases over the
// lowercased, punctuation-stripped words of `text`. Matches never overlap;
// repeated terms are reported once, in first-seen order. No stemming.
std::vector<std::string> extract_terms(std::string_view text, const TermVectorStore& store);

// Cosine similarity of two vocabulary terms (higher = semantically closer).
double relevancy(std::string_view a, std::string_view b, const TermVectorStore& store);

struct PairScore {
  std::string a, b;
  double relevancy = 0.0;
};

struct NoveltyReport {
  std::uint64_t idea_index = 0;
  std::vector<std::string> terms;
  std::vector<PairScore> pair_scores;  // all unordered pairs, i < j
  double min_score = 0.0;
  std::pair<std::string, std::string> argmin_pair;  // lexicographically ordered
  int token_count = 0;
};

// Fewer than two vocabulary terms matched; not an error.
struct Unscorable {
  std::uint64_t idea_index = 0;
  std::vector<std::string> terms;
  int token_count = 0;
};

using NoveltyOutcome = std::variant<NoveltyReport, Unscorable>;

/// Minimum pairwise relevancy over the terms found in `text`; lower means a
/// more novel combination. Ties on the minimum resolve to the
/// lexicographically smallest pair. token_count is the whitespace token count
/// of the raw text.
NoveltyOutcome idea_novelty(std::string_view text, const TermVectorStore& store,
                            std::uint64_t idea_index = 0);

struct DistributionSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::vector<double> bin_edges;  // bin_count + 1 edges
  std::vector<std::size_t> bin_counts;

  bool operator==(const DistributionSummary&) const = default;
};

// Quartiles by linear interpolation between order statistics. Bins are
// equal-width over [min, max], the last one closed. Throws DataError on
// empty input.
DistributionSummary summarize(std::span<const double> values, int bin_count);

// One row of the exported novelty CSV; min_score is empty when unscorable.
struct NoveltyRow {
  std::string run_id;
  std::uint64_t idea_index = 0;
  std::optional<double> min_score;
  std::string argmin_a, argmin_b;
  std::size_t n_terms = 0;
  int token_count = 0;

  bool operator==(const NoveltyRow&) const = default;
};

NoveltyRow to_row(std::string_view run_id, const NoveltyOutcome& outcome);

// Header: run_id,idea_index,min_score,argmin_a,argmin_b,n_terms,token_count
void write_novelty_csv(const std::filesystem::path& path, std::span<const NoveltyRow> rows);
std::vector<NoveltyRow> read_novelty_csv(const std::filesystem::path& path);

// Mean term relevancy reported for the reference technology semantic
// network; a comparison line for plots, not a threshold.
inline constexpr double kReferenceMeanRelevancy = 0.133;

}  // namespace ideagen::novelty
