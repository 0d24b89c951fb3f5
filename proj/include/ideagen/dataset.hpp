#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ideagen/corpus.hpp"

namespace ideagen::dataset {

inline constexpr std::string_view kStart = "<|s|>";
inline constexpr std::string_view kEnd = "<|e|>";
inline constexpr std::string_view kSeparator = " => ";

struct KeywordTitlePair {
  std::string keyword;  // lowercase
  std::string title;    // original casing

  bool operator==(const KeywordTitlePair&) const = default;
};

struct DatasetManifest {
  std::string domain_id;
  std::size_t n_pairs = 0;
  std::string source_corpus_hash;
  std::string created_at;
  std::uint64_t shuffle_seed = 0;
};

struct BuildResult {
  std::vector<KeywordTitlePair> pairs;
  std::size_t skipped = 0;
};

using KeywordFn = std::function<std::string(const corpus::PatentRecord&)>;

// One pair per record, in record order. A record whose keyword_fn throws
// DataError is skipped and counted. More than one skip that also exceeds 10%
// of the records is a DataError (usually a stopword or corpus
// misconfiguration). A keyword that is not a contiguous word sequence of its
// title is rejected.
BuildResult build_pairs(std::span<const corpus::PatentRecord> records,
                        const KeywordFn& keyword_fn);

// `<|s|>keyword => title<|e|>`
std::string format_example(const KeywordTitlePair& pair);

// Throws DataError naming the pair when a field contains a delimiter, a
// newline, or is empty or untrimmed.
void validate_pair(const KeywordTitlePair& pair);

// Writes the pairs, permuted by shuffle_seed, one per line, and a
// `<path>.manifest` key=value file beside them.
DatasetManifest serialize_dataset(std::span<const KeywordTitlePair> pairs,
                                  const std::filesystem::path& path,
                                  std::uint64_t shuffle_seed,
                                  std::string_view domain_id = {},
                                  std::string_view source_corpus_hash = {});

// Inverse of format_example. Errors report the byte offset of the problem.
KeywordTitlePair parse_example(std::string_view line);

std::vector<KeywordTitlePair> load_dataset(const std::filesystem::path& path);

std::filesystem::path manifest_path(const std::filesystem::path& dataset_path);
DatasetManifest load_manifest(const std::filesystem::path& path);

}  // namespace ideagen::dataset
