#pragma once

#include <cstdint>
#include <vector>

#include "ideagen/lm.hpp"

namespace ideagen::lm {

// Byte-level vocabulary plus four markers. The literal delimiters "<|s|>",
// "<|e|>" and " => " encode to single marker tokens.
struct CharVocab {
  static constexpr Token kStart = 256;
  static constexpr Token kEnd = 257;
  static constexpr Token kPad = 258;
  static constexpr Token kSeparator = 259;
  static constexpr int kSize = 260;

  static std::vector<Token> encode(std::string_view text);
  static std::string decode(std::span<const Token> tokens);
};

struct ToyModelConfig {
  int window = 12;      // previous tokens seen by the model
  int embed_dim = 16;
  int hidden = 96;
  int max_sequence = 256;
  std::uint64_t init_seed = 0;
};

// Character-level fixed-window language model: token embeddings for the last
// `window` tokens, concatenated, then a tanh hidden layer and a softmax
// output layer. Trained with Adam.
class ToyCharModel final : public ModelBackend {
 public:
  explicit ToyCharModel(ToyModelConfig config = {});

  std::string kind() const override { return "toy-char"; }
  int vocab_size() const override { return CharVocab::kSize; }
  int context_limit() const override { return config_.max_sequence; }

  std::vector<Token> encode(std::string_view text) const override;
  std::string decode(std::span<const Token> tokens) const override;
  Token end_token() const override { return CharVocab::kEnd; }
  std::vector<Token> suppressed_tokens() const override;

  Logits next_token_logits(std::span<const Token> context) const override;
  double train_step(std::span<const std::vector<Token>> batch,
                    double learning_rate) override;

  void save(const std::filesystem::path& file) const override;
  void load(const std::filesystem::path& file) override;

  const ToyModelConfig& config() const { return config_; }
  std::size_t parameter_count() const { return params_.size(); }

 private:
  struct Forward;

  // Offsets into params_.
  std::size_t emb_ = 0, w1_ = 0, b1_ = 0, w2_ = 0, b2_ = 0;
  int input_dim() const { return config_.window * config_.embed_dim; }

  void window_of(std::span<const Token> tokens, std::size_t pos, Token* out) const;
  void forward(const Token* window, Forward& f) const;

  ToyModelConfig config_;
  std::vector<double> params_;
  std::vector<double> adam_m_, adam_v_;
  long long adam_t_ = 0;
};

}  // namespace ideagen::lm
