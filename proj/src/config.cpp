#include "ideagen/config.hpp"

#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "ideagen/errors.hpp"
#include "ideagen/io.hpp"
#include "ideagen/text.hpp"

namespace ideagen {

namespace pt = boost::property_tree;

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  for (const auto& part : text::split(s, ',')) {
    const auto t = text::trim(part);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

class Section {
 public:
  Section(const pt::ptree& tree, std::string name) : name_(std::move(name)) {
    if (auto child = tree.get_child_optional(name_)) node_ = &*child;
  }

  std::optional<std::string> raw(const std::string& key) {
    used_.insert(key);
    if (!node_) return std::nullopt;
    auto v = node_->get_optional<std::string>(key);
    if (!v) return std::nullopt;
    return std::string(text::trim(*v));
  }

  void str(const std::string& key, std::string& out) {
    if (auto v = raw(key)) out = *v;
  }
  void path(const std::string& key, const std::filesystem::path& base,
            std::filesystem::path& out) {
    if (auto v = raw(key)) out = resolve(base, *v);
  }
  template <typename Int>
  void integer(const std::string& key, Int& out) {
    if (auto v = raw(key)) {
      try {
        out = static_cast<Int>(text::parse_int(*v));
      } catch (const DataError&) {
        throw UsageError("[" + name_ + "] " + key + ": expected an integer, got '" + *v + "'");
      }
    }
  }
  void u64(const std::string& key, std::uint64_t& out) {
    if (auto v = raw(key)) {
      try {
        std::size_t used = 0;
        out = std::stoull(*v, &used);
        if (used != v->size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw UsageError("[" + name_ + "] " + key + ": expected an unsigned integer");
      }
    }
  }
  void real(const std::string& key, double& out) {
    if (auto v = raw(key)) {
      try {
        out = text::parse_double(*v);
      } catch (const DataError&) {
        throw UsageError("[" + name_ + "] " + key + ": expected a number, got '" + *v + "'");
      }
    }
  }
  void list(const std::string& key, std::vector<std::string>& out) {
    if (auto v = raw(key)) out = split_list(*v);
  }

  void reject_unknown() const {
    if (!node_) return;
    for (const auto& [key, _] : *node_) {
      if (!used_.contains(key)) {
        throw UsageError("unknown config key [" + name_ + "] " + key);
      }
    }
  }

 private:
  std::string name_;
  const pt::ptree* node_ = nullptr;
  std::set<std::string> used_;
};

}  // namespace

void apply_seed(StudyConfig& c, std::uint64_t seed) {
  c.shuffle_seed = seed;
  c.model.init_seed = seed;
  c.finetune.seed = seed;
  c.generate.seed = seed;
  c.keywords.embedding_seed = seed;
}

StudyConfig parse_study_config(const std::string& ini_text,
                               const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in(ini_text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  static const std::set<std::string> kSections = {
      "study", "corpora", "corpus", "keywords", "dataset", "model",
      "finetune", "generate", "novelty", "compare", "service"};
  for (const auto& [name, _] : tree) {
    if (!kSections.contains(name)) throw UsageError("unknown config section [" + name + "]");
  }

  StudyConfig c;
  Section study(tree, "study");
  study.str("target_keyword", c.target_keyword);
  study.str("target_domain", c.target_domain);
  study.list("domains", c.domains);
  study.path("domain_catalog", base_dir, c.domain_catalog);
  study.path("proximity", base_dir, c.proximity);
  study.path("term_vectors", base_dir, c.term_vectors);
  study.path("runs_dir", base_dir, c.runs_dir);
  study.integer("threads", c.threads);
  study.reject_unknown();

  if (auto corpora = tree.get_child_optional("corpora")) {
    for (const auto& [domain, value] : *corpora) {
      c.corpora[domain] = resolve(base_dir, std::string(text::trim(value.data())));
    }
  }

  Section corpus(tree, "corpus");
  corpus.integer("min_words", c.corpus.min_words);
  corpus.integer("latest", c.corpus.latest);
  corpus.reject_unknown();

  Section kw(tree, "keywords");
  kw.integer("ngram_min", c.keywords.ngram_min);
  kw.integer("ngram_max", c.keywords.ngram_max);
  kw.path("stopwords", base_dir, c.keywords.stopwords);
  kw.integer("embedding_dim", c.keywords.embedding_dim);
  kw.u64("embedding_seed", c.keywords.embedding_seed);
  kw.reject_unknown();

  Section ds(tree, "dataset");
  ds.u64("shuffle_seed", c.shuffle_seed);
  ds.reject_unknown();

  Section model(tree, "model");
  model.integer("window", c.model.window);
  model.integer("embed_dim", c.model.embed_dim);
  model.integer("hidden", c.model.hidden);
  model.integer("max_sequence", c.model.max_sequence);
  model.u64("init_seed", c.model.init_seed);
  model.reject_unknown();

  Section ft(tree, "finetune");
  ft.integer("steps", c.finetune.steps);
  ft.integer("batch_size", c.finetune.batch_size);
  ft.real("learning_rate", c.finetune.learning_rate);
  ft.integer("log_every", c.finetune.log_every);
  ft.integer("checkpoint_every", c.finetune.checkpoint_every);
  ft.u64("seed", c.finetune.seed);
  ft.reject_unknown();

  Section gen(tree, "generate");
  gen.real("temperature", c.generate.temperature);
  gen.integer("top_k", c.generate.top_k);
  gen.integer("max_new_tokens", c.generate.max_new_tokens);
  gen.integer("n_samples", c.generate.n_samples);
  gen.u64("seed", c.generate.seed);
  gen.reject_unknown();

  Section nov(tree, "novelty");
  nov.integer("bins", c.histogram_bins);
  nov.reject_unknown();

  Section cmp(tree, "compare");
  cmp.real("alpha", c.alpha);
  cmp.list("near", c.near);
  cmp.list("far", c.far);
  cmp.reject_unknown();

  c.finetune.validate();
  c.generate.validate();
  return c;
}

StudyConfig load_study_config(const std::filesystem::path& path) {
  std::string content;
  try {
    content = io::read_file(path);
  } catch (const DataError& e) {
    throw UsageError(e.what());
  }
  return parse_study_config(content, path.parent_path());
}

nlohmann::ordered_json to_json(const lm::ToyModelConfig& c) {
  return {{"backend", "toy-char"},       {"window", c.window},
          {"embed_dim", c.embed_dim},    {"hidden", c.hidden},
          {"max_sequence", c.max_sequence}, {"init_seed", c.init_seed}};
}

nlohmann::ordered_json to_json(const lm::FineTuneConfig& c) {
  return {{"steps", c.steps},
          {"batch_size", c.batch_size},
          {"learning_rate", c.learning_rate},
          {"optimizer", "adam(0.9,0.999,1e-8)"},
          {"log_every", c.log_every},
          {"checkpoint_every", c.checkpoint_every},
          {"seed", c.seed}};
}

nlohmann::ordered_json to_json(const lm::GenerationConfig& c) {
  return {{"temperature", c.temperature}, {"top_k", c.top_k},
          {"max_new_tokens", c.max_new_tokens}, {"n_samples", c.n_samples},
          {"seed", c.seed}};
}

nlohmann::ordered_json to_json(const CorpusOptions& c) {
  return {{"min_words", c.min_words}, {"latest", c.latest}};
}

nlohmann::ordered_json to_json(const KeywordOptions& c) {
  return {{"ngram_min", c.ngram_min},
          {"ngram_max", c.ngram_max},
          {"stopwords", c.stopwords.string()},
          {"embedding", "hash-bow"},
          {"embedding_dim", c.embedding_dim},
          {"embedding_seed", c.embedding_seed}};
}

lm::ToyModelConfig model_config_from_json(const nlohmann::json& j) {
  lm::ToyModelConfig c;
  c.window = j.at("window").get<int>();
  c.embed_dim = j.at("embed_dim").get<int>();
  c.hidden = j.at("hidden").get<int>();
  c.max_sequence = j.at("max_sequence").get<int>();
  c.init_seed = j.at("init_seed").get<std::uint64_t>();
  return c;
}

lm::FineTuneConfig finetune_config_from_json(const nlohmann::json& j) {
  lm::FineTuneConfig c;
  c.steps = j.at("steps").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.log_every = j.at("log_every").get<int>();
  c.checkpoint_every = j.at("checkpoint_every").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

lm::GenerationConfig generation_config_from_json(const nlohmann::json& j) {
  lm::GenerationConfig c;
  c.temperature = j.at("temperature").get<double>();
  c.top_k = j.at("top_k").get<int>();
  c.max_new_tokens = j.at("max_new_tokens").get<int>();
  c.n_samples = j.at("n_samples").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

CorpusOptions corpus_options_from_json(const nlohmann::json& j) {
  return {j.at("min_words").get<int>(), j.at("latest").get<int>()};
}

KeywordOptions keyword_options_from_json(const nlohmann::json& j) {
  KeywordOptions c;
  c.ngram_min = j.at("ngram_min").get<int>();
  c.ngram_max = j.at("ngram_max").get<int>();
  c.stopwords = j.at("stopwords").get<std::string>();
  c.embedding_dim = j.at("embedding_dim").get<int>();
  c.embedding_seed = j.at("embedding_seed").get<std::uint64_t>();
  return c;
}

}  // namespace ideagen
