#pragma once

#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "ideagen/dataset.hpp"
#include "ideagen/io.hpp"
#include "ideagen/lm.hpp"

namespace ideagen::testing {

// Fresh directory under the system temp dir, removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("ideagen-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Byte-level backend whose output after the prompt separator is a fixed
// script; the token after the script is `end_token()` unless `endless`.
class ScriptedBackend : public lm::ModelBackend {
 public:
  static constexpr lm::Token kEnd = 256;

  explicit ScriptedBackend(std::string script, bool endless = false)
      : script_(std::move(script)), endless_(endless) {}

  std::string kind() const override { return "scripted"; }
  int vocab_size() const override { return 257; }
  int context_limit() const override { return 1 << 20; }
  std::vector<lm::Token> encode(std::string_view text) const override {
    return {text.begin(), text.end()};
  }
  std::string decode(std::span<const lm::Token> tokens) const override {
    std::string out;
    for (auto t : tokens) {
      if (t < 256) out.push_back(static_cast<char>(t));
    }
    return out;
  }
  lm::Token end_token() const override { return kEnd; }

  lm::Logits next_token_logits(std::span<const lm::Token> context) const override {
    const std::string sep(dataset::kSeparator);
    const std::string ctx = decode(context);
    const auto pos = ctx.rfind(sep);
    const std::size_t produced = pos == std::string::npos ? 0 : ctx.size() - pos - sep.size();
    lm::Logits logits(257, -std::numeric_limits<double>::infinity());
    if (produced < script_.size()) {
      logits[static_cast<unsigned char>(script_[produced])] = 0.0;
    } else if (endless_) {
      logits['x'] = 0.0;
    } else {
      logits[kEnd] = 0.0;
    }
    return logits;
  }
  double train_step(std::span<const std::vector<lm::Token>>, double) override { return 0.0; }
  void save(const std::filesystem::path& file) const override { io::write_file(file, script_); }
  void load(const std::filesystem::path& file) override { script_ = io::read_file(file); }

 private:
  std::string script_;
  bool endless_;
};

// Records every training batch as decoded text; loss values come from a
// caller-supplied function of the 1-based step.
class RecordingBackend : public lm::ModelBackend {
 public:
  explicit RecordingBackend(std::function<double(int)> loss = [](int step) { return 1.0 / step; })
      : loss_(std::move(loss)) {}

  std::string kind() const override { return "recording"; }
  int vocab_size() const override { return 257; }
  int context_limit() const override { return 1 << 20; }
  std::vector<lm::Token> encode(std::string_view text) const override {
    return {text.begin(), text.end()};
  }
  std::string decode(std::span<const lm::Token> tokens) const override {
    std::string out;
    for (auto t : tokens) {
      if (t < 256) out.push_back(static_cast<char>(t));
    }
    return out;
  }
  lm::Token end_token() const override { return 256; }
  lm::Logits next_token_logits(std::span<const lm::Token>) const override {
    return lm::Logits(257, 0.0);
  }
  double train_step(std::span<const std::vector<lm::Token>> batch, double) override {
    for (const auto& ex : batch) seen.push_back(decode(ex));
    return loss_(static_cast<int>(seen.size()));
  }
  void save(const std::filesystem::path& file) const override {
    io::write_file(file, std::to_string(seen.size()));
  }
  void load(const std::filesystem::path&) override {}

  std::vector<std::string> seen;

 private:
  std::function<double(int)> loss_;
};

// Independent cosine used as an oracle; deliberately not shared with src/.
inline double brute_cosine(const std::vector<double>& a, const std::vector<double>& b) {
  long double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<long double>(a[i]) * b[i];
    na += static_cast<long double>(a[i]) * a[i];
    nb += static_cast<long double>(b[i]) * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return static_cast<double>(dot / (std::sqrt(na) * std::sqrt(nb)));
}

}  // namespace ideagen::testing
