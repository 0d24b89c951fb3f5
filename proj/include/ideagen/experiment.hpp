#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ideagen/config.hpp"
#include "ideagen/ideation.hpp"
#include "ideagen/novelty.hpp"

namespace ideagen::experiment {

// Inputs of one per-domain pipeline run. Together with the tool version this
// is enough to re-execute the run.
struct RunSpec {
  std::string run_id;
  std::string target_keyword;
  std::string domain_id;
  std::string display_name;
  std::optional<int> rank;
  std::optional<double> proximity;
  std::filesystem::path corpus_path;
  std::filesystem::path term_vectors;
  std::filesystem::path runs_dir;
  CorpusOptions corpus;
  KeywordOptions keywords;
  std::uint64_t shuffle_seed = 0;
  lm::ToyModelConfig model;
  lm::FineTuneConfig finetune;
  lm::GenerationConfig generate;
  int histogram_bins = 20;
  unsigned threads = 0;
};

struct RunManifest {
  RunSpec spec;
  std::string corpus_hash;
  std::size_t records_ingested = 0;
  std::size_t records_selected = 0;
  bool undersized = false;
  std::size_t keyword_failures = 0;
  std::size_t n_pairs = 0;
  lm::CheckpointRef checkpoint;
  ideation::IdeaSetStats stats;
  std::size_t n_scorable = 0;
  std::string created_at;
  std::string tool_version = kToolVersion;

  std::filesystem::path run_dir() const { return spec.runs_dir / spec.run_id; }
  std::filesystem::path manifest_file() const { return run_dir() / "manifest.json"; }
  std::filesystem::path ideas_file() const { return run_dir() / "ideas.jsonl"; }
  std::filesystem::path novelty_file() const { return run_dir() / "novelty.csv"; }
  std::filesystem::path loss_file() const { return run_dir() / "loss.csv"; }
  std::filesystem::path dataset_file() const { return run_dir() / "dataset.txt"; }
};

nlohmann::ordered_json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);
RunManifest load_manifest(const std::filesystem::path& path);

// "<domain>__<keyword slug>"
std::string make_run_id(std::string_view domain_id, std::string_view keyword);

/// Runs one domain end to end: ingest, filter, select latest, extract
/// keywords, write the dataset, fine-tune the toy backend, sample ideas,
/// deduplicate, and score novelty of the unique ideas. Writes all artifacts
/// and manifest.json under <runs_dir>/<run_id>/.
RunManifest run_domain(const RunSpec& spec);

// Re-executes a manifest's run into another runs directory.
RunManifest replay(const RunManifest& manifest, const std::filesystem::path& runs_dir);

enum class Direction { kFarLower, kNearLower, kIndistinct };
std::string to_string(Direction d);

struct FieldComparison {
  std::vector<double> near_scores, far_scores;
  double median_near = 0.0, median_far = 0.0;
  // Mann-Whitney U of the far sample: pairs with far > near, ties count 1/2.
  double rank_sum_statistic = 0.0;
  double z = 0.0;
  double p_value = 1.0;
  double alpha = 0.05;
  Direction direction = Direction::kIndistinct;
};

/// Two-sided rank-sum test of far vs near min_score samples, using the
/// normal approximation with tie-corrected variance and no continuity
/// correction. Throws DataError("insufficient sample") when either side has
/// fewer than 3 values.
FieldComparison compare_fields(std::span<const double> near, std::span<const double> far,
                               double alpha = 0.05);

struct ReportRow {
  std::string domain_id;
  std::string display_name;
  std::optional<int> rank;
  std::optional<double> proximity;
  ideation::IdeaSetStats stats;
  std::vector<std::string> examples;  // first four non-empty unique ideas
  std::optional<novelty::DistributionSummary> min_score_summary;
  std::optional<novelty::DistributionSummary> token_summary;
};

// Rebuilds a table row from the run's persisted ideas and novelty files.
ReportRow report_row(const RunManifest& manifest, int histogram_bins);

// Min scores of a run's scorable unique ideas, read back from novelty.csv.
std::vector<double> persisted_min_scores(const RunManifest& manifest);

struct NamedComparison {
  std::string label;
  FieldComparison comparison;
};

/// Writes report.csv, report.txt, novelty_all.csv, loss_<domain>.csv,
/// hist_min_score_<domain>.csv, hist_tokens_<domain>.csv and
/// comparison.json into `out_dir`. Rows are ordered by rank, then domain id.
void export_report(std::span<const RunManifest> manifests,
                   std::span<const NamedComparison> comparisons,
                   const std::filesystem::path& out_dir, int histogram_bins = 20);

/// Pools persisted min scores of the near and far runs and compares them.
/// With both lists empty, ranked runs are split: the better-ranked half
/// (rounded down) is near. Returns nothing when either side has no runs;
/// an undersized sample is reported in `notes` instead of thrown.
std::vector<NamedComparison> near_far_comparisons(std::span<const RunManifest> manifests,
                                                  std::vector<std::string> near,
                                                  std::vector<std::string> far, double alpha,
                                                  std::vector<std::string>& notes);

struct DomainFailure {
  std::string domain_id;
  std::string message;
};

struct StudyResult {
  std::vector<RunManifest> manifests;
  std::vector<DomainFailure> failures;
  std::vector<NamedComparison> comparisons;
  std::vector<std::string> notes;
};

using ProgressFn = std::function<void(const std::string& message)>;

/// Runs every configured domain (a failing domain is recorded and the rest
/// continue), compares near vs far novelty when the split is known, and
/// exports the report to <runs_dir>/report.
StudyResult run_case_study(const StudyConfig& config, const ProgressFn& progress = {});

// Loads every <runs_dir>/*/manifest.json, sorted by run id.
std::vector<RunManifest> find_manifests(const std::filesystem::path& runs_dir);

}  // namespace ideagen::experiment
