#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ideagen/lm.hpp"
#include "ideagen/toy_model.hpp"

namespace ideagen {

inline constexpr const char* kToolVersion = "0.1.0";

struct CorpusOptions {
  int min_words = 4;
  int latest = 20000;
};

struct KeywordOptions {
  int ngram_min = 1;
  int ngram_max = 2;
  std::filesystem::path stopwords;  // empty = built-in list
  int embedding_dim = 64;
  std::uint64_t embedding_seed = 0;
};

/// Everything a case study needs, with every default resolved. Loaded from
/// an INI-style file whose sections mirror the members below; relative
/// paths resolve against the file's directory.
struct StudyConfig {
  std::string target_keyword = "rolling toy";
  std::string target_domain;               // optional, enables ranking
  std::vector<std::string> domains;        // source domains to fine-tune
  std::map<std::string, std::filesystem::path> corpora;  // domain -> file
  std::filesystem::path domain_catalog;    // optional
  std::filesystem::path proximity;         // optional precomputed table
  std::filesystem::path term_vectors;
  std::filesystem::path runs_dir = "runs";

  CorpusOptions corpus;
  KeywordOptions keywords;
  std::uint64_t shuffle_seed = 0;
  lm::ToyModelConfig model;
  lm::FineTuneConfig finetune;
  lm::GenerationConfig generate;
  int histogram_bins = 20;
  double alpha = 0.05;
  // Domains compared as near/far. When both are empty and ranks are known,
  // the better-ranked half of `domains` is near.
  std::vector<std::string> near;
  std::vector<std::string> far;
  unsigned threads = 0;
};

// Overrides every seed (shuffle, model init, fine-tune order, sampling,
// embedding) with one value.
void apply_seed(StudyConfig& config, std::uint64_t seed);

// Parses the INI text; throws UsageError on unknown keys or bad values.
StudyConfig parse_study_config(const std::string& ini_text,
                               const std::filesystem::path& base_dir = {});
StudyConfig load_study_config(const std::filesystem::path& path);

nlohmann::ordered_json to_json(const lm::ToyModelConfig& c);
nlohmann::ordered_json to_json(const lm::FineTuneConfig& c);
nlohmann::ordered_json to_json(const lm::GenerationConfig& c);
nlohmann::ordered_json to_json(const CorpusOptions& c);
nlohmann::ordered_json to_json(const KeywordOptions& c);

lm::ToyModelConfig model_config_from_json(const nlohmann::json& j);
lm::FineTuneConfig finetune_config_from_json(const nlohmann::json& j);
lm::GenerationConfig generation_config_from_json(const nlohmann::json& j);
CorpusOptions corpus_options_from_json(const nlohmann::json& j);
KeywordOptions keyword_options_from_json(const nlohmann::json& j);

}  // namespace ideagen
