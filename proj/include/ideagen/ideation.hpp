#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ideagen/lm.hpp"

namespace ideagen::ideation {

struct IdeaRecord {
  std::string text;
  std::string normalized;
  std::string target_keyword;
  std::string domain_id;
  std::string checkpoint;
  std::uint64_t sample_index = 0;
  bool truncated = false;

  bool empty() const { return text.empty(); }
  bool operator==(const IdeaRecord&) const = default;
};

struct IdeaSetStats {
  std::size_t n_generated = 0;
  std::size_t n_unique = 0;
  double pct_unique = 0.0;
};

// Lowercases, collapses internal whitespace, and strips trailing sentence
// punctuation and surrounding whitespace.
std::string normalize_idea(std::string_view text);

struct GenerateOptions {
  // 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
  // Called with the number of finished samples; serialized.
  std::function<void(std::size_t done, std::size_t total)> on_progress;
};

/// Draws config.n_samples completions for `keyword`, one IdeaRecord per
/// sample index in order. Sampling may run on several threads; each sample's
/// random stream depends only on (seed, sample_index), so output is the same
/// as a sequential run. Empty completions are kept. A backend failure
/// discards everything and reports how many samples had completed.
std::vector<IdeaRecord> generate_ideas(const lm::ModelBackend& backend,
                                       std::string_view keyword,
                                       std::string_view domain_id,
                                       std::string_view checkpoint,
                                       const lm::GenerationConfig& config,
                                       const GenerateOptions& options = {});

struct DedupResult {
  std::vector<IdeaRecord> unique;
  IdeaSetStats stats;
};

// Exact match on normalized text, first occurrence kept. Throws DataError
// on empty input.
DedupResult dedup_stats(std::span<const IdeaRecord> ideas);

// One decimal and a percent sign, e.g. "35.8%".
std::string format_pct(double pct);

void save_ideas(const std::filesystem::path& path, std::span<const IdeaRecord> ideas);
std::vector<IdeaRecord> load_ideas(const std::filesystem::path& path);

}  // namespace ideagen::ideation
