#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ideagen::keywords {

using Vector = std::vector<double>;

// Text embedding model. Calls go through embed(), which checks the output
// dimension and serializes access for backends that are not safe to call
// concurrently.
class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;

  Vector embed(std::string_view text) const;
  virtual int dimension() const = 0;
  virtual bool concurrent_safe() const { return true; }

 protected:
  virtual Vector do_embed(std::string_view text) const = 0;

 private:
  mutable std::mutex mutex_;
};

// Deterministic bag-of-words embedding: each lowercased word maps to a
// seeded Gaussian vector; a text embeds as the normalized sum of its words.
// Needs no model files, so it backs the test suite and toy studies.
class HashEmbeddingBackend final : public EmbeddingBackend {
 public:
  HashEmbeddingBackend(int dimension, std::uint64_t seed);
  int dimension() const override { return dimension_; }

 protected:
  Vector do_embed(std::string_view text) const override;

 private:
  int dimension_;
  std::uint64_t seed_;
};

// Fixed text -> vector lookup; unknown texts raise BackendError.
class TableEmbeddingBackend final : public EmbeddingBackend {
 public:
  TableEmbeddingBackend(int dimension, std::map<std::string, Vector> table);
  int dimension() const override { return dimension_; }

 protected:
  Vector do_embed(std::string_view text) const override;

 private:
  int dimension_;
  std::map<std::string, Vector> table_;
};

struct CandidatePhrase {
  std::string text;
  // Half-open word span [start, end) into the title's word list.
  int start = 0;
  int end = 0;

  int length() const { return end - start; }
  bool operator==(const CandidatePhrase&) const = default;
};

struct ExtractOptions {
  int ngram_min = 1;
  int ngram_max = 2;
  std::set<std::string> stopwords;
};

// Lowercased title words with leading/trailing punctuation stripped; words
// that are pure punctuation are dropped. Candidates are built from these.
std::vector<std::string> title_words(std::string_view title);

// All contiguous n-grams (ngram_min..ngram_max) that neither start nor end
// with a stopword, ordered by length then position, deduplicated keeping the
// first occurrence. Throws DataError("no candidates") when none remain.
std::vector<CandidatePhrase> extract_candidates(std::string_view title,
                                                const ExtractOptions& opts);

// Candidate whose embedding is most cosine-similar to the full title's.
// Ties go to the earliest span, then the shorter phrase.
std::string extract_keyword(std::string_view title,
                            const EmbeddingBackend& backend,
                            const ExtractOptions& opts);

// Order-preserving. Backend failures are rethrown as BackendError naming the
// index of the failing text.
std::vector<Vector> embed_batch(const std::vector<std::string>& texts,
                                const EmbeddingBackend& backend);

double cosine(const Vector& a, const Vector& b);

// One word per line; blank lines and '#' comments ignored; lowercased.
std::set<std::string> load_stopwords(const std::filesystem::path& path);
const std::set<std::string>& default_stopwords();

// Resumable `patent_id<TAB>keyword` store. put() appends to the file
// immediately so an interrupted extraction keeps its progress.
class KeywordCache {
 public:
  KeywordCache() = default;
  explicit KeywordCache(std::filesystem::path path);

  std::optional<std::string> get(const std::string& patent_id) const;
  void put(const std::string& patent_id, const std::string& keyword);
  std::size_t size() const { return entries_.size(); }

 private:
  std::filesystem::path path_;
  std::unordered_map<std::string, std::string> entries_;
};

}  // namespace ideagen::keywords
