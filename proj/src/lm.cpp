#include "ideagen/lm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ideagen/dataset.hpp"
#include "ideagen/errors.hpp"
#include "ideagen/io.hpp"
#include "ideagen/text.hpp"

namespace ideagen::lm {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

void FineTuneConfig::validate() const {
  if (steps < 1) throw UsageError("finetune steps must be >= 1");
  if (batch_size < 1) throw UsageError("batch_size must be >= 1");
  if (log_every < 1) throw UsageError("log_every must be >= 1");
  if (checkpoint_every < 0) throw UsageError("checkpoint_every must be >= 0");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw UsageError("learning_rate must be positive");
  }
}

void GenerationConfig::validate() const {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw UsageError("temperature must be > 0");
  }
  if (top_k < 1) throw UsageError("top_k must be >= 1");
  if (n_samples < 1) throw UsageError("n_samples must be >= 1");
  if (max_new_tokens < 1) throw UsageError("max_new_tokens must be >= 1");
}

void save_loss_trace(const LossTrace& trace, const std::filesystem::path& path) {
  std::string out = "step,loss\n";
  for (const auto& p : trace.points) {
    out += std::to_string(p.step) + ',' + text::format_double(p.loss) + '\n';
  }
  io::write_file(path, out);
}

LossTrace load_loss_trace(const std::filesystem::path& path) {
  LossTrace trace;
  const auto all_lines = io::lines(io::read_file(path));
  for (std::size_t i = 1; i < all_lines.size(); ++i) {
    if (all_lines[i].empty()) continue;
    const auto f = text::split(all_lines[i], ',');
    if (f.size() != 2) throw DataError(path.string() + ": malformed loss row");
    trace.points.push_back(
        {static_cast<int>(text::parse_int(f[0])), text::parse_double(f[1])});
  }
  return trace;
}

Logits top_k_filter(std::span<const double> logits, int k) {
  Logits out(logits.begin(), logits.end());
  if (k < 1) throw UsageError("top_k must be >= 1");
  if (static_cast<std::size_t>(k) >= out.size()) return out;

  std::vector<std::size_t> idx(out.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return logits[a] > logits[b];
  });
  for (std::size_t r = static_cast<std::size_t>(k); r < idx.size(); ++r) {
    out[idx[r]] = kNegInf;
  }
  return out;
}

std::vector<double> sampling_distribution(std::span<const double> logits,
                                          double temperature, int top_k) {
  if (!(temperature > 0.0)) throw UsageError("temperature must be > 0");
  auto filtered = top_k_filter(logits, top_k);
  double mx = kNegInf;
  for (double v : filtered) {
    if (!std::isnan(v)) mx = std::max(mx, v);
  }
  if (mx == kNegInf) throw BackendError("all logits are -inf");

  std::vector<double> probs(filtered.size(), 0.0);
  double z = 0.0;
  for (std::size_t i = 0; i < filtered.size(); ++i) {
    if (filtered[i] == kNegInf || std::isnan(filtered[i])) continue;
    probs[i] = std::exp((filtered[i] - mx) / temperature);
    z += probs[i];
  }
  for (double& p : probs) p /= z;
  return probs;
}

Token sample_token(std::span<const double> logits, double temperature, int top_k,
                   const CounterRng& rng, std::uint64_t counter) {
  const auto probs = sampling_distribution(logits, temperature, top_k);
  const double u = rng.uniform(counter);
  double cum = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    cum += probs[i];
    last = i;
    if (u < cum) return static_cast<Token>(i);
  }
  return static_cast<Token>(last);
}

Generation generate_text(const ModelBackend& backend, std::string_view keyword,
                         const GenerationConfig& config, std::uint64_t sample_index) {
  config.validate();
  std::string prompt;
  prompt.append(dataset::kStart).append(keyword).append(dataset::kSeparator);
  std::vector<Token> context = backend.encode(prompt);
  const std::size_t prompt_len = context.size();
  const auto suppressed = backend.suppressed_tokens();
  const CounterRng rng(config.seed, sample_index);

  Generation gen;
  gen.truncated = true;
  for (int step = 0; step < config.max_new_tokens; ++step) {
    auto logits = backend.next_token_logits(context);
    if (static_cast<int>(logits.size()) != backend.vocab_size()) {
      throw BackendError("backend returned " + std::to_string(logits.size()) +
                         " logits for a vocabulary of " +
                         std::to_string(backend.vocab_size()));
    }
    for (Token t : suppressed) logits[static_cast<std::size_t>(t)] = kNegInf;
    const Token next = sample_token(logits, config.temperature, config.top_k, rng,
                                    static_cast<std::uint64_t>(step));
    if (next == backend.end_token()) {
      gen.truncated = false;
      break;
    }
    context.push_back(next);
  }
  const std::span<const Token> produced(context.data() + prompt_len,
                                        context.size() - prompt_len);
  gen.text = std::string(text::trim(backend.decode(produced)));
  return gen;
}

std::filesystem::path checkpoint_dir(const std::filesystem::path& root,
                                     std::string_view domain_id, int step) {
  return root / std::string(domain_id) / std::to_string(step);
}

CheckpointRef latest_checkpoint(const std::filesystem::path& root,
                                std::string_view domain_id) {
  const auto marker = root / std::string(domain_id) / "latest";
  if (!std::filesystem::exists(marker)) {
    throw DataError("no checkpoint for domain '" + std::string(domain_id) + "'");
  }
  CheckpointRef ref;
  ref.domain_id = std::string(domain_id);
  ref.step = static_cast<int>(text::parse_int(io::read_file(marker)));
  ref.dir = checkpoint_dir(root, domain_id, ref.step);
  if (!std::filesystem::exists(ref.model_file())) {
    throw DataError("checkpoint marker points at missing " + ref.model_file().string());
  }
  return ref;
}

namespace {

CheckpointRef write_checkpoint(const ModelBackend& backend,
                               const std::filesystem::path& root,
                               std::string_view domain_id, int step) {
  CheckpointRef ref{std::string(domain_id), step, checkpoint_dir(root, domain_id, step)};
  std::filesystem::create_directories(ref.dir);
  backend.save(ref.model_file());
  io::write_file(root / std::string(domain_id) / "latest", std::to_string(step) + "\n");
  return ref;
}

}  // namespace

FineTuneResult finetune(ModelBackend& backend, const std::filesystem::path& dataset_path,
                        const FineTuneConfig& config,
                        const std::filesystem::path& checkpoint_root,
                        std::string_view domain_id, const StepCallback& on_step) {
  config.validate();
  const auto pairs = dataset::load_dataset(dataset_path);
  if (pairs.empty()) throw DataError(dataset_path.string() + ": empty dataset");

  FineTuneResult result;
  result.dataset_size = pairs.size();
  std::vector<std::vector<Token>> examples;
  examples.reserve(pairs.size());
  const auto limit = static_cast<std::size_t>(backend.context_limit());
  for (const auto& p : pairs) {
    auto tokens = backend.encode(dataset::format_example(p));
    if (tokens.size() > limit) {
      tokens.resize(limit);
      ++result.truncated_examples;
    }
    examples.push_back(std::move(tokens));
  }
  const auto order = seeded_permutation(examples.size(), config.seed);

  std::vector<std::vector<Token>> batch(static_cast<std::size_t>(config.batch_size));
  std::size_t cursor = 0;
  double window_sum = 0.0;
  for (int step = 1; step <= config.steps; ++step) {
    for (auto& slot : batch) {
      slot = examples[order[cursor % order.size()]];
      ++cursor;
    }
    const double loss = backend.train_step(batch, config.learning_rate);
    if (!std::isfinite(loss)) {
      throw BackendError("non-finite loss at step " + std::to_string(step));
    }
    if (on_step) on_step(step, loss);
    window_sum += loss;
    if (step % config.log_every == 0) {
      result.trace.points.push_back({step, window_sum / config.log_every});
      window_sum = 0.0;
    }
    if (config.checkpoint_every > 0 && step % config.checkpoint_every == 0 &&
        step != config.steps) {
      write_checkpoint(backend, checkpoint_root, domain_id, step);
    }
  }
  result.examples_seen = cursor;
  result.checkpoint = write_checkpoint(backend, checkpoint_root, domain_id, config.steps);
  save_loss_trace(result.trace, checkpoint_root / std::string(domain_id) / "loss.csv");
  return result;
}

}  // namespace ideagen::lm
