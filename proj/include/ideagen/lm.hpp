#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ideagen/rng.hpp"

namespace ideagen::lm {

using Token = int;
using Logits = std::vector<double>;

struct FineTuneConfig {
  int steps = 20000;
  int batch_size = 1;
  double learning_rate = 3e-3;
  int log_every = 100;
  // 0 writes only the final checkpoint.
  int checkpoint_every = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct GenerationConfig {
  double temperature = 0.9;
  int top_k = 50;
  int max_new_tokens = 96;
  int n_samples = 500;
  std::uint64_t seed = 0;

  void validate() const;
};

struct LossPoint {
  int step = 0;
  double loss = 0.0;
  bool operator==(const LossPoint&) const = default;
};

struct LossTrace {
  std::vector<LossPoint> points;
};

void save_loss_trace(const LossTrace& trace, const std::filesystem::path& path);
LossTrace load_loss_trace(const std::filesystem::path& path);

// A causal language model that can be fine-tuned one batch at a time and
// queried for next-token logits. next_token_logits must be deterministic
// given the weights and context.
class ModelBackend {
 public:
  virtual ~ModelBackend() = default;

  virtual std::string kind() const = 0;
  virtual int vocab_size() const = 0;
  // Longest token sequence train_step accepts; longer examples are cut.
  virtual int context_limit() const = 0;

  virtual std::vector<Token> encode(std::string_view text) const = 0;
  virtual std::string decode(std::span<const Token> tokens) const = 0;
  virtual Token end_token() const = 0;
  // Tokens never sampled during generation (start/padding markers).
  virtual std::vector<Token> suppressed_tokens() const { return {}; }

  virtual Logits next_token_logits(std::span<const Token> context) const = 0;
  // Mean next-token cross-entropy over the batch; updates the weights.
  virtual double train_step(std::span<const std::vector<Token>> batch,
                            double learning_rate) = 0;

  // Whether next_token_logits may be called from several threads at once.
  virtual bool concurrent_safe() const { return true; }

  virtual void save(const std::filesystem::path& file) const = 0;
  virtual void load(const std::filesystem::path& file) = 0;
};

// ---- decoding -------------------------------------------------------------

// Keeps the k largest entries (lower index wins ties at the boundary) and
// sets the rest to -inf. k >= size is the identity.
Logits top_k_filter(std::span<const double> logits, int k);

// Probabilities actually used by sample_token: top-k filter, then divide by
// temperature, then softmax.
std::vector<double> sampling_distribution(std::span<const double> logits,
                                          double temperature, int top_k);

// Draws one token from sampling_distribution using rng.uniform(counter).
// Throws BackendError when every logit is -inf.
Token sample_token(std::span<const double> logits, double temperature, int top_k,
                   const CounterRng& rng, std::uint64_t counter);

struct Generation {
  std::string text;
  bool truncated = false;
};

/// Samples a completion for `<|s|>keyword => ` until the end token or
/// max_new_tokens. The random stream is keyed by (config.seed, sample_index)
/// and the counter by decoding step, so a given sample does not depend on
/// which other samples were drawn or in what order.
Generation generate_text(const ModelBackend& backend, std::string_view keyword,
                         const GenerationConfig& config, std::uint64_t sample_index);

// ---- fine-tuning ----------------------------------------------------------

struct CheckpointRef {
  std::string domain_id;
  int step = 0;
  std::filesystem::path dir;  // <root>/<domain_id>/<step>

  std::filesystem::path model_file() const { return dir / "model.bin"; }
};

std::filesystem::path checkpoint_dir(const std::filesystem::path& root,
                                     std::string_view domain_id, int step);
// Reads <root>/<domain_id>/latest. Throws DataError when absent.
CheckpointRef latest_checkpoint(const std::filesystem::path& root,
                                std::string_view domain_id);

struct FineTuneResult {
  CheckpointRef checkpoint;
  LossTrace trace;
  std::size_t dataset_size = 0;
  std::size_t examples_seen = 0;
  std::size_t truncated_examples = 0;
};

using StepCallback = std::function<void(int step, double loss)>;

/// Runs exactly config.steps optimizer steps over the dataset, shuffled once
/// by config.seed and then cycled. Logs the mean loss of each full
/// log_every window, writes checkpoints every checkpoint_every steps and at
/// the end under <checkpoint_root>/<domain_id>/<step>/, updates the
/// `latest` marker and writes loss.csv beside it.
FineTuneResult finetune(ModelBackend& backend, const std::filesystem::path& dataset_path,
                        const FineTuneConfig& config,
                        const std::filesystem::path& checkpoint_root,
                        std::string_view domain_id, const StepCallback& on_step = {});

}  // namespace ideagen::lm
