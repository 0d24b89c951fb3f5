#include "ideagen/toy_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ideagen/dataset.hpp"
#include "ideagen/errors.hpp"
#include "ideagen/io.hpp"

namespace ideagen::lm {

std::vector<Token> CharVocab::encode(std::string_view text) {
  std::vector<Token> out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text.substr(i).starts_with(dataset::kStart)) {
      out.push_back(kStart);
      i += dataset::kStart.size();
    } else if (text.substr(i).starts_with(dataset::kEnd)) {
      out.push_back(kEnd);
      i += dataset::kEnd.size();
    } else if (text.substr(i).starts_with(dataset::kSeparator)) {
      out.push_back(kSeparator);
      i += dataset::kSeparator.size();
    } else {
      out.push_back(static_cast<unsigned char>(text[i]));
      ++i;
    }
  }
  return out;
}

std::string CharVocab::decode(std::span<const Token> tokens) {
  std::string out;
  for (Token t : tokens) {
    if (t >= 0 && t < 256) {
      out.push_back(static_cast<char>(t));
    } else if (t == kStart) {
      out.append(dataset::kStart);
    } else if (t == kEnd) {
      out.append(dataset::kEnd);
    } else if (t == kSeparator) {
      out.append(dataset::kSeparator);
    }
  }
  return out;
}

struct ToyCharModel::Forward {
  std::vector<double> x, h, logits;
};

ToyCharModel::ToyCharModel(ToyModelConfig config) : config_(config) {
  if (config_.window < 1 || config_.embed_dim < 1 || config_.hidden < 1 ||
      config_.max_sequence < 2) {
    throw UsageError("invalid toy model configuration");
  }
  const std::size_t V = CharVocab::kSize;
  const auto E = static_cast<std::size_t>(config_.embed_dim);
  const auto H = static_cast<std::size_t>(config_.hidden);
  const auto D = static_cast<std::size_t>(input_dim());
  emb_ = 0;
  w1_ = emb_ + V * E;
  b1_ = w1_ + D * H;
  w2_ = b1_ + H;
  b2_ = w2_ + H * V;
  params_.assign(b2_ + V, 0.0);

  const CounterRng rng(config_.init_seed, 0x746f79ULL);
  std::uint64_t c = 0;
  for (std::size_t i = 0; i < V * E; ++i) params_[emb_ + i] = 0.5 * rng.normal(c++);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(D));
  for (std::size_t i = 0; i < D * H; ++i) params_[w1_ + i] = s1 * rng.normal(c++);
  const double s2 = 0.5 / std::sqrt(static_cast<double>(H));
  for (std::size_t i = 0; i < H * V; ++i) params_[w2_ + i] = s2 * rng.normal(c++);

  adam_m_.assign(params_.size(), 0.0);
  adam_v_.assign(params_.size(), 0.0);
}

std::vector<Token> ToyCharModel::encode(std::string_view text) const {
  return CharVocab::encode(text);
}

std::string ToyCharModel::decode(std::span<const Token> tokens) const {
  return CharVocab::decode(tokens);
}

std::vector<Token> ToyCharModel::suppressed_tokens() const {
  // A title never contains a delimiter, so only the end token may close it.
  return {CharVocab::kStart, CharVocab::kPad, CharVocab::kSeparator};
}

void ToyCharModel::window_of(std::span<const Token> tokens, std::size_t pos,
                             Token* out) const {
  const auto W = static_cast<std::size_t>(config_.window);
  for (std::size_t k = 0; k < W; ++k) {
    // position pos - W + k
    if (pos + k < W) {
      out[k] = CharVocab::kPad;
    } else {
      const Token t = tokens[pos + k - W];
      out[k] = (t >= 0 && t < CharVocab::kSize) ? t : CharVocab::kPad;
    }
  }
}

void ToyCharModel::forward(const Token* window, Forward& f) const {
  const std::size_t V = CharVocab::kSize;
  const auto E = static_cast<std::size_t>(config_.embed_dim);
  const auto H = static_cast<std::size_t>(config_.hidden);
  const auto D = static_cast<std::size_t>(input_dim());
  const auto W = static_cast<std::size_t>(config_.window);
  const double* p = params_.data();

  f.x.resize(D);
  for (std::size_t k = 0; k < W; ++k) {
    const double* row = p + emb_ + static_cast<std::size_t>(window[k]) * E;
    std::copy(row, row + E, f.x.begin() + static_cast<std::ptrdiff_t>(k * E));
  }
  f.h.assign(p + b1_, p + b1_ + H);
  for (std::size_t i = 0; i < D; ++i) {
    const double xi = f.x[i];
    if (xi == 0.0) continue;
    const double* w = p + w1_ + i * H;
    for (std::size_t j = 0; j < H; ++j) f.h[j] += xi * w[j];
  }
  for (double& v : f.h) v = std::tanh(v);
  f.logits.assign(p + b2_, p + b2_ + V);
  for (std::size_t j = 0; j < H; ++j) {
    const double hj = f.h[j];
    const double* w = p + w2_ + j * V;
    for (std::size_t v = 0; v < V; ++v) f.logits[v] += hj * w[v];
  }
}

Logits ToyCharModel::next_token_logits(std::span<const Token> context) const {
  std::vector<Token> window(static_cast<std::size_t>(config_.window));
  window_of(context, context.size(), window.data());
  Forward f;
  forward(window.data(), f);
  return f.logits;
}

double ToyCharModel::train_step(std::span<const std::vector<Token>> batch,
                                double learning_rate) {
  const std::size_t V = CharVocab::kSize;
  const auto E = static_cast<std::size_t>(config_.embed_dim);
  const auto H = static_cast<std::size_t>(config_.hidden);
  const auto D = static_cast<std::size_t>(input_dim());
  const auto W = static_cast<std::size_t>(config_.window);

  std::vector<double> grad(params_.size(), 0.0);
  std::vector<Token> window(W);
  std::vector<double> probs(V), dh(H), dx(D);
  Forward f;
  double loss_sum = 0.0;
  std::size_t positions = 0;

  for (const auto& full : batch) {
    const auto len = std::min(full.size(), static_cast<std::size_t>(config_.max_sequence));
    const std::span<const Token> seq(full.data(), len);
    for (std::size_t pos = 1; pos < len; ++pos) {
      const Token target = seq[pos];
      window_of(seq, pos, window.data());
      forward(window.data(), f);

      const double mx = *std::max_element(f.logits.begin(), f.logits.end());
      double z = 0.0;
      for (std::size_t v = 0; v < V; ++v) {
        probs[v] = std::exp(f.logits[v] - mx);
        z += probs[v];
      }
      for (double& pv : probs) pv /= z;
      loss_sum += -(f.logits[static_cast<std::size_t>(target)] - mx - std::log(z));
      ++positions;

      // d loss / d logits = probs - onehot(target)
      probs[static_cast<std::size_t>(target)] -= 1.0;
      for (std::size_t v = 0; v < V; ++v) grad[b2_ + v] += probs[v];
      for (std::size_t j = 0; j < H; ++j) {
        const double* w = params_.data() + w2_ + j * V;
        double* g = grad.data() + w2_ + j * V;
        const double hj = f.h[j];
        double acc = 0.0;
        for (std::size_t v = 0; v < V; ++v) {
          g[v] += hj * probs[v];
          acc += w[v] * probs[v];
        }
        dh[j] = acc * (1.0 - hj * hj);
      }
      for (std::size_t j = 0; j < H; ++j) grad[b1_ + j] += dh[j];
      for (std::size_t i = 0; i < D; ++i) {
        const double* w = params_.data() + w1_ + i * H;
        double* g = grad.data() + w1_ + i * H;
        const double xi = f.x[i];
        double acc = 0.0;
        for (std::size_t j = 0; j < H; ++j) {
          g[j] += xi * dh[j];
          acc += w[j] * dh[j];
        }
        dx[i] = acc;
      }
      for (std::size_t k = 0; k < W; ++k) {
        double* g = grad.data() + emb_ + static_cast<std::size_t>(window[k]) * E;
        for (std::size_t e = 0; e < E; ++e) g[e] += dx[k * E + e];
      }
    }
  }
  if (positions == 0) return 0.0;

  const double scale = 1.0 / static_cast<double>(positions);
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  ++adam_t_;
  const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(adam_t_));
  const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(adam_t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const double g = grad[i] * scale;
    adam_m_[i] = kBeta1 * adam_m_[i] + (1.0 - kBeta1) * g;
    adam_v_[i] = kBeta2 * adam_v_[i] + (1.0 - kBeta2) * g * g;
    params_[i] -= learning_rate * (adam_m_[i] / c1) / (std::sqrt(adam_v_[i] / c2) + kEps);
  }
  return loss_sum * scale;
}

void ToyCharModel::save(const std::filesystem::path& file) const {
  std::ostringstream header;
  header << "toy-char v1 " << CharVocab::kSize << ' ' << config_.window << ' '
         << config_.embed_dim << ' ' << config_.hidden << ' ' << config_.max_sequence
         << ' ' << params_.size() << '\n';
  std::string blob = header.str();
  const auto offset = blob.size();
  blob.resize(offset + params_.size() * sizeof(double));
  std::memcpy(blob.data() + offset, params_.data(), params_.size() * sizeof(double));
  io::write_file(file, blob);
}

void ToyCharModel::load(const std::filesystem::path& file) {
  const auto blob = io::read_file(file);
  const auto nl = blob.find('\n');
  if (nl == std::string::npos) throw BackendError(file.string() + ": not a toy-char checkpoint");
  std::istringstream header(blob.substr(0, nl));
  std::string magic, version;
  int vocab = 0;
  ToyModelConfig cfg = config_;
  std::size_t n_params = 0;
  header >> magic >> version >> vocab >> cfg.window >> cfg.embed_dim >> cfg.hidden >>
      cfg.max_sequence >> n_params;
  if (!header || magic != "toy-char" || version != "v1" || vocab != CharVocab::kSize) {
    throw BackendError(file.string() + ": not a toy-char v1 checkpoint");
  }
  ToyCharModel fresh(cfg);
  if (fresh.params_.size() != n_params ||
      blob.size() - nl - 1 != n_params * sizeof(double)) {
    throw BackendError(file.string() + ": checkpoint size does not match its header");
  }
  std::memcpy(fresh.params_.data(), blob.data() + nl + 1, n_params * sizeof(double));
  *this = std::move(fresh);
}

}  // namespace ideagen::lm
