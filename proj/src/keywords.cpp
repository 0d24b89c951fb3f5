#include "ideagen/keywords.hpp"

#include <cctype>
#include <cmath>
#include <fstream>

#include "ideagen/errors.hpp"
#include "ideagen/io.hpp"
#include "ideagen/rng.hpp"
#include "ideagen/text.hpp"

namespace ideagen::keywords {

namespace {

bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

}  // namespace

Vector EmbeddingBackend::embed(std::string_view text) const {
  Vector v;
  if (concurrent_safe()) {
    v = do_embed(text);
  } else {
    std::lock_guard lock(mutex_);
    v = do_embed(text);
  }
  if (static_cast<int>(v.size()) != dimension()) {
    throw BackendError("embedding has dimension " + std::to_string(v.size()) +
                       ", expected " + std::to_string(dimension()));
  }
  return v;
}

HashEmbeddingBackend::HashEmbeddingBackend(int dimension, std::uint64_t seed)
    : dimension_(dimension), seed_(seed) {
  if (dimension < 1) throw UsageError("embedding dimension must be >= 1");
}

Vector HashEmbeddingBackend::do_embed(std::string_view text) const {
  Vector sum(static_cast<std::size_t>(dimension_), 0.0);
  for (const auto& word : text::split_words(text::to_lower(text))) {
    const CounterRng rng(seed_, fnv1a(word.data(), word.size()));
    for (int i = 0; i < dimension_; ++i) {
      sum[static_cast<std::size_t>(i)] += rng.normal(static_cast<std::uint64_t>(i));
    }
  }
  double norm = 0.0;
  for (double x : sum) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (double& x : sum) x /= norm;
  }
  return sum;
}

TableEmbeddingBackend::TableEmbeddingBackend(int dimension,
                                             std::map<std::string, Vector> table)
    : dimension_(dimension), table_(std::move(table)) {}

Vector TableEmbeddingBackend::do_embed(std::string_view text) const {
  auto it = table_.find(std::string(text));
  if (it == table_.end()) {
    throw BackendError("no embedding for '" + std::string(text) + "'");
  }
  return it->second;
}

std::vector<std::string> title_words(std::string_view title) {
  std::vector<std::string> out;
  for (auto& w : text::split_words(text::to_lower(title))) {
    std::string_view v = w;
    while (!v.empty() && is_punct(v.front())) v.remove_prefix(1);
    while (!v.empty() && is_punct(v.back())) v.remove_suffix(1);
    if (!v.empty()) out.emplace_back(v);
  }
  return out;
}

std::vector<CandidatePhrase> extract_candidates(std::string_view title,
                                                const ExtractOptions& opts) {
  if (opts.ngram_min < 1 || opts.ngram_min > opts.ngram_max) {
    throw UsageError("invalid n-gram range " + std::to_string(opts.ngram_min) +
                     ".." + std::to_string(opts.ngram_max));
  }
  const auto words = title_words(title);
  const auto n_words = static_cast<int>(words.size());
  std::vector<CandidatePhrase> out;
  std::set<std::string> seen;
  for (int len = opts.ngram_min; len <= opts.ngram_max; ++len) {
    for (int start = 0; start + len <= n_words; ++start) {
      const auto& first = words[static_cast<std::size_t>(start)];
      const auto& last = words[static_cast<std::size_t>(start + len - 1)];
      if (opts.stopwords.contains(first) || opts.stopwords.contains(last)) continue;
      std::vector<std::string> slice(words.begin() + start, words.begin() + start + len);
      CandidatePhrase c{text::join(slice, " "), start, start + len};
      if (seen.insert(c.text).second) out.push_back(std::move(c));
    }
  }
  if (out.empty()) throw DataError("no candidates");
  return out;
}

double cosine(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw DataError("cosine of vectors with different dimensions");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::string extract_keyword(std::string_view title,
                            const EmbeddingBackend& backend,
                            const ExtractOptions& opts) {
  auto candidates = extract_candidates(title, opts);
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const CandidatePhrase& a, const CandidatePhrase& b) {
                     if (a.start != b.start) return a.start < b.start;
                     return a.length() < b.length();
                   });
  const Vector title_vec = backend.embed(text::join(title_words(title), " "));
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double s = cosine(title_vec, backend.embed(candidates[i].text));
    if (s > best_score) {
      best_score = s;
      best = i;
    }
  }
  return candidates[best].text;
}

std::vector<Vector> embed_batch(const std::vector<std::string>& texts,
                                const EmbeddingBackend& backend) {
  std::vector<Vector> out;
  out.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    try {
      out.push_back(backend.embed(texts[i]));
    } catch (const std::exception& e) {
      throw BackendError("embedding failed at index " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

std::set<std::string> load_stopwords(const std::filesystem::path& path) {
  std::set<std::string> out;
  for (const auto& line : io::lines(io::read_file(path))) {
    const auto w = text::trim(line);
    if (w.empty() || w.front() == '#') continue;
    out.insert(text::to_lower(w));
  }
  return out;
}

const std::set<std::string>& default_stopwords() {
  static const std::set<std::string> words = {
      "a",    "an",   "and",   "are",  "as",   "at",      "be",    "by",
      "for",  "from", "has",   "have", "in",   "into",    "is",    "it",
      "its",  "of",   "on",    "or",   "same", "such",    "that",  "the",
      "their", "then", "there", "these", "this", "thereof", "to",   "using",
      "via",  "was",  "which", "with", "within", "without"};
  return words;
}

KeywordCache::KeywordCache(std::filesystem::path path) : path_(std::move(path)) {
  if (!std::filesystem::exists(path_)) return;
  const auto all_lines = io::lines(io::read_file(path_));
  for (std::size_t i = 0; i < all_lines.size(); ++i) {
    if (all_lines[i].empty()) continue;
    const auto f = text::split(all_lines[i], '\t');
    if (f.size() != 2) {
      throw DataError(path_.string() + ": line " + std::to_string(i + 1) +
                      ": expected patent_id<TAB>keyword");
    }
    entries_[f[0]] = f[1];
  }
}

std::optional<std::string> KeywordCache::get(const std::string& patent_id) const {
  auto it = entries_.find(patent_id);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void KeywordCache::put(const std::string& patent_id, const std::string& keyword) {
  entries_[patent_id] = keyword;
  if (path_.empty()) return;
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  if (!out) throw DataError("cannot write " + path_.string());
  out << patent_id << '\t' << keyword << '\n';
}

}  // namespace ideagen::keywords
