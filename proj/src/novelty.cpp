#include "ideagen/novelty.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "ideagen/errors.hpp"
#include "ideagen/io.hpp"
#include "ideagen/keywords.hpp"
#include "ideagen/text.hpp"

namespace ideagen::novelty {

void TermVectorStore::add(std::string term, std::vector<double> vector) {
  term = text::to_lower(term);
  if (terms_.empty()) {
    if (vector.empty()) throw DataError("term '" + term + "' has an empty vector");
    dimension_ = static_cast<int>(vector.size());
  } else if (static_cast<int>(vector.size()) != dimension_) {
    throw DataError("term '" + term + "' has " + std::to_string(vector.size()) +
                    " components, expected " + std::to_string(dimension_));
  }
  if (index_.contains(term)) throw DataError("duplicate term '" + term + "'");
  double ss = 0.0;
  for (double x : vector) {
    if (!std::isfinite(x)) throw DataError("term '" + term + "' has a non-finite component");
    ss += x * x;
  }
  max_words_ = std::max(max_words_, static_cast<int>(text::split_words(term).size()));
  index_.emplace(term, terms_.size());
  terms_.push_back(std::move(term));
  vectors_.push_back(std::move(vector));
  norms_.push_back(std::sqrt(ss));
}

std::size_t TermVectorStore::index_of(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) throw DataError("unknown term '" + std::string(term) + "'");
  return it->second;
}

bool TermVectorStore::contains(std::string_view term) const {
  return index_.contains(std::string(term));
}

const std::vector<double>& TermVectorStore::vector(std::string_view term) const {
  return vectors_[index_of(term)];
}

double TermVectorStore::norm(std::string_view term) const { return norms_[index_of(term)]; }

TermVectorStore load_term_vectors(const std::filesystem::path& path) {
  const auto all_lines = io::lines(io::read_file(path));
  auto fail = [&](std::size_t line_no, const std::string& why) -> DataError {
    return DataError(path.string() + ": line " + std::to_string(line_no) + ": " + why);
  };
  if (all_lines.empty()) throw DataError(path.string() + ": empty term-vector file");
  const auto header = text::split_words(all_lines[0]);
  if (header.size() != 2) throw fail(1, "expected header 'N d'");
  long long n = 0, d = 0;
  try {
    n = text::parse_int(header[0]);
    d = text::parse_int(header[1]);
  } catch (const DataError& e) {
    throw fail(1, e.what());
  }
  if (n < 0 || d < 1) throw fail(1, "invalid header");

  TermVectorStore store;
  for (std::size_t i = 1; i < all_lines.size(); ++i) {
    const auto parts = text::split_words(all_lines[i]);
    if (parts.empty()) continue;
    std::string term = parts[0];
    std::replace(term.begin(), term.end(), '_', ' ');
    if (static_cast<long long>(parts.size() - 1) != d) {
      throw fail(i + 1, "term '" + term + "' has " + std::to_string(parts.size() - 1) +
                            " components, expected " + std::to_string(d));
    }
    std::vector<double> v;
    v.reserve(parts.size() - 1);
    try {
      for (std::size_t k = 1; k < parts.size(); ++k) v.push_back(text::parse_double(parts[k]));
      store.add(std::move(term), std::move(v));
    } catch (const DataError& e) {
      throw fail(i + 1, e.what());
    }
  }
  if (static_cast<long long>(store.size()) != n) {
    throw DataError(path.string() + ": header declares " + std::to_string(n) +
                    " terms, found " + std::to_string(store.size()));
  }
  return store;
}

void save_term_vectors(const TermVectorStore& store, const std::filesystem::path& path) {
  std::string out = std::to_string(store.size()) + ' ' + std::to_string(store.dimension()) + '\n';
  for (const auto& term : store.terms()) {
    std::string t = term;
    std::replace(t.begin(), t.end(), ' ', '_');
    out += t;
    for (double x : store.vector(term)) {
      out += ' ';
      out += text::format_double(x);
    }
    out += '\n';
  }
  io::write_file(path, out);
}

std::vector<std::string> extract_terms(std::string_view text, const TermVectorStore& store) {
  const auto words = keywords::title_words(text);
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  const std::size_t max_len = static_cast<std::size_t>(store.max_phrase_words());
  std::size_t i = 0;
  while (i < words.size()) {
    std::size_t matched = 0;
    for (std::size_t len = std::min(max_len, words.size() - i); len >= 1; --len) {
      std::vector<std::string> slice(words.begin() + static_cast<std::ptrdiff_t>(i),
                                     words.begin() + static_cast<std::ptrdiff_t>(i + len));
      auto phrase = text::join(slice, " ");
      if (store.contains(phrase)) {
        if (seen.insert(phrase).second) out.push_back(std::move(phrase));
        matched = len;
        break;
      }
    }
    i += matched ? matched : 1;
  }
  return out;
}

double relevancy(std::string_view a, std::string_view b, const TermVectorStore& store) {
  const auto& va = store.vector(a);
  const auto& vb = store.vector(b);
  const double denom = store.norm(a) * store.norm(b);
  if (denom == 0.0) return 0.0;
  double dot = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) dot += va[i] * vb[i];
  return dot / denom;
}

NoveltyOutcome idea_novelty(std::string_view text, const TermVectorStore& store,
                            std::uint64_t idea_index) {
  auto terms = extract_terms(text, store);
  const int tokens = static_cast<int>(text::split_words(text).size());
  if (terms.size() < 2) return Unscorable{idea_index, std::move(terms), tokens};

  NoveltyReport report;
  report.idea_index = idea_index;
  report.token_count = tokens;
  bool first = true;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    for (std::size_t j = i + 1; j < terms.size(); ++j) {
      const double r = relevancy(terms[i], terms[j], store);
      report.pair_scores.push_back({terms[i], terms[j], r});
      auto ordered = std::minmax(terms[i], terms[j]);
      std::pair<std::string, std::string> pair{ordered.first, ordered.second};
      if (first || r < report.min_score ||
          (r == report.min_score && pair < report.argmin_pair)) {
        report.min_score = r;
        report.argmin_pair = std::move(pair);
        first = false;
      }
    }
  }
  report.terms = std::move(terms);
  return report;
}

namespace {

// Linear interpolation between closest ranks over sorted data.
double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

DistributionSummary summarize(std::span<const double> values, int bin_count) {
  if (values.empty()) throw DataError("cannot summarize an empty sample");
  if (bin_count < 1) throw UsageError("bin_count must be >= 1");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  DistributionSummary s;
  s.count = sorted.size();
  double sum = 0.0;
  for (double v : sorted) sum += v;
  s.mean = sum / static_cast<double>(s.count);
  s.median = quantile(sorted, 0.5);
  s.q1 = quantile(sorted, 0.25);
  s.q3 = quantile(sorted, 0.75);
  s.min = sorted.front();
  s.max = sorted.back();

  const double width = (s.max - s.min) / bin_count;
  for (int b = 0; b <= bin_count; ++b) s.bin_edges.push_back(s.min + width * b);
  s.bin_edges.back() = s.max;
  s.bin_counts.assign(static_cast<std::size_t>(bin_count), 0);
  for (double v : sorted) {
    std::size_t b = 0;
    if (width > 0.0) {
      b = static_cast<std::size_t>((v - s.min) / width);
      b = std::min(b, static_cast<std::size_t>(bin_count - 1));
    }
    ++s.bin_counts[b];
  }
  return s;
}

NoveltyRow to_row(std::string_view run_id, const NoveltyOutcome& outcome) {
  NoveltyRow row;
  row.run_id = std::string(run_id);
  if (const auto* r = std::get_if<NoveltyReport>(&outcome)) {
    row.idea_index = r->idea_index;
    row.min_score = r->min_score;
    row.argmin_a = r->argmin_pair.first;
    row.argmin_b = r->argmin_pair.second;
    row.n_terms = r->terms.size();
    row.token_count = r->token_count;
  } else {
    const auto& u = std::get<Unscorable>(outcome);
    row.idea_index = u.idea_index;
    row.n_terms = u.terms.size();
    row.token_count = u.token_count;
  }
  return row;
}

void write_novelty_csv(const std::filesystem::path& path, std::span<const NoveltyRow> rows) {
  std::string out = "run_id,idea_index,min_score,argmin_a,argmin_b,n_terms,token_count\n";
  for (const auto& r : rows) {
    out += text::csv_escape(r.run_id) + ',' + std::to_string(r.idea_index) + ',' +
           (r.min_score ? text::format_double(*r.min_score) : std::string()) + ',' +
           text::csv_escape(r.argmin_a) + ',' + text::csv_escape(r.argmin_b) + ',' +
           std::to_string(r.n_terms) + ',' + std::to_string(r.token_count) + '\n';
  }
  io::write_file(path, out);
}

std::vector<NoveltyRow> read_novelty_csv(const std::filesystem::path& path) {
  std::vector<NoveltyRow> rows;
  const auto all_lines = io::lines(io::read_file(path));
  for (std::size_t i = 1; i < all_lines.size(); ++i) {
    if (all_lines[i].empty()) continue;
    const auto f = text::parse_csv_line(all_lines[i]);
    if (f.size() != 7) {
      throw DataError(path.string() + ": line " + std::to_string(i + 1) + ": expected 7 fields");
    }
    NoveltyRow r;
    r.run_id = f[0];
    r.idea_index = static_cast<std::uint64_t>(text::parse_int(f[1]));
    if (!f[2].empty()) r.min_score = text::parse_double(f[2]);
    r.argmin_a = f[3];
    r.argmin_b = f[4];
    r.n_terms = static_cast<std::size_t>(text::parse_int(f[5]));
    r.token_count = static_cast<int>(text::parse_int(f[6]));
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace ideagen::novelty
