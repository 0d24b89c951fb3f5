#include "ideagen/dataset.hpp"

#include <algorithm>
#include <map>

#include "ideagen/errors.hpp"
#include "ideagen/io.hpp"
#include "ideagen/keywords.hpp"
#include "ideagen/rng.hpp"
#include "ideagen/text.hpp"

namespace ideagen::dataset {

namespace {

bool is_word_subsequence(const std::vector<std::string>& needle,
                         const std::vector<std::string>& hay) {
  if (needle.empty() || needle.size() > hay.size()) return false;
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

std::string describe(const KeywordTitlePair& p) {
  return "(\"" + p.keyword + "\", \"" + p.title + "\")";
}

}  // namespace

BuildResult build_pairs(std::span<const corpus::PatentRecord> records,
                        const KeywordFn& keyword_fn) {
  BuildResult result;
  for (const auto& r : records) {
    std::string kw;
    try {
      kw = keyword_fn(r);
    } catch (const DataError&) {
      ++result.skipped;
      continue;
    }
    KeywordTitlePair pair{text::to_lower(kw), r.title};
    if (!is_word_subsequence(text::split_words(pair.keyword),
                             keywords::title_words(pair.title))) {
      throw DataError("keyword '" + pair.keyword + "' is not a phrase of title '" +
                      pair.title + "' (patent " + r.patent_id + ")");
    }
    result.pairs.push_back(std::move(pair));
  }
  // A lone failure is tolerated so tiny inputs are not judged by the rate.
  if (result.skipped > 1 && result.skipped * 10 > records.size()) {
    throw DataError("keyword extraction failed for " + std::to_string(result.skipped) +
                    " of " + std::to_string(records.size()) +
                    " titles (more than 10%); check the stopword list and corpus");
  }
  return result;
}

void validate_pair(const KeywordTitlePair& pair) {
  for (const std::string* field : {&pair.keyword, &pair.title}) {
    for (auto delim : {kStart, kEnd, kSeparator, std::string_view("\n"),
                       std::string_view("\r")}) {
      if (text::contains(*field, delim)) {
        throw DataError("pair " + describe(pair) + " contains delimiter '" +
                        std::string(delim) + "'");
      }
    }
    if (field->empty() || text::trim(*field) != *field) {
      throw DataError("pair " + describe(pair) + " has an empty or untrimmed field");
    }
  }
}

std::string format_example(const KeywordTitlePair& pair) {
  std::string out;
  out.reserve(kStart.size() + pair.keyword.size() + kSeparator.size() +
              pair.title.size() + kEnd.size());
  out.append(kStart).append(pair.keyword).append(kSeparator).append(pair.title).append(kEnd);
  return out;
}

DatasetManifest serialize_dataset(std::span<const KeywordTitlePair> pairs,
                                  const std::filesystem::path& path,
                                  std::uint64_t shuffle_seed,
                                  std::string_view domain_id,
                                  std::string_view source_corpus_hash) {
  if (pairs.empty()) throw DataError("refusing to write an empty dataset");
  for (const auto& p : pairs) validate_pair(p);

  std::string out;
  for (std::size_t idx : seeded_permutation(pairs.size(), shuffle_seed)) {
    out += format_example(pairs[idx]);
    out += '\n';
  }
  io::write_file(path, out);

  DatasetManifest m;
  m.domain_id = std::string(domain_id);
  m.n_pairs = pairs.size();
  m.source_corpus_hash = std::string(source_corpus_hash);
  m.created_at = io::utc_timestamp();
  m.shuffle_seed = shuffle_seed;
  io::write_file(manifest_path(path),
                 "domain_id=" + m.domain_id + "\nn_pairs=" + std::to_string(m.n_pairs) +
                     "\nsource_corpus_hash=" + m.source_corpus_hash +
                     "\ncreated_at=" + m.created_at +
                     "\nshuffle_seed=" + std::to_string(m.shuffle_seed) + "\n");
  return m;
}

KeywordTitlePair parse_example(std::string_view line) {
  if (!line.starts_with(kStart)) {
    throw DataError("offset 0: expected '" + std::string(kStart) + "'");
  }
  if (!line.ends_with(kEnd) || line.size() < kStart.size() + kEnd.size()) {
    throw DataError("offset " + std::to_string(line.size()) + ": expected '" +
                    std::string(kEnd) + "' at end of line");
  }
  const auto body = line.substr(kStart.size(), line.size() - kStart.size() - kEnd.size());
  const auto sep = body.find(kSeparator);
  if (sep == std::string_view::npos) {
    throw DataError("offset " + std::to_string(kStart.size()) + ": missing separator '" +
                    std::string(kSeparator) + "'");
  }
  KeywordTitlePair p{std::string(body.substr(0, sep)),
                     std::string(body.substr(sep + kSeparator.size()))};
  if (text::trim(p.keyword).empty()) {
    throw DataError("offset " + std::to_string(kStart.size()) + ": empty keyword");
  }
  if (text::trim(p.title).empty()) {
    throw DataError("offset " + std::to_string(kStart.size() + sep + kSeparator.size()) +
                    ": empty title");
  }
  return p;
}

std::vector<KeywordTitlePair> load_dataset(const std::filesystem::path& path) {
  std::vector<KeywordTitlePair> out;
  const auto all_lines = io::lines(io::read_file(path));
  for (std::size_t i = 0; i < all_lines.size(); ++i) {
    if (all_lines[i].empty()) continue;
    try {
      out.push_back(parse_example(all_lines[i]));
    } catch (const DataError& e) {
      throw DataError(path.string() + ": line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

std::filesystem::path manifest_path(const std::filesystem::path& dataset_path) {
  auto p = dataset_path;
  p += ".manifest";
  return p;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::map<std::string, std::string> kv;
  for (const auto& line : io::lines(io::read_file(path))) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  DatasetManifest m;
  m.domain_id = kv["domain_id"];
  m.n_pairs = static_cast<std::size_t>(text::parse_int(kv["n_pairs"]));
  m.source_corpus_hash = kv["source_corpus_hash"];
  m.created_at = kv["created_at"];
  m.shuffle_seed = std::stoull(kv["shuffle_seed"]);
  return m;
}

}  // namespace ideagen::dataset
