// Command-line front end for the ideation pipeline.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 backend error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <set>

#include <CLI11.hpp>

#include "ideagen/config.hpp"
#include "ideagen/corpus.hpp"
#include "ideagen/dataset.hpp"
#include "ideagen/errors.hpp"
#include "ideagen/experiment.hpp"
#include "ideagen/ideation.hpp"
#include "ideagen/io.hpp"
#include "ideagen/keywords.hpp"
#include "ideagen/novelty.hpp"
#include "ideagen/service.hpp"
#include "ideagen/text.hpp"
#include "ideagen/toy_model.hpp"

namespace fs = std::filesystem;
using namespace ideagen;

namespace {

struct Globals {
  fs::path config;
  std::optional<std::uint64_t> seed;
  fs::path runs_dir;
};

StudyConfig base_config(const Globals& g) {
  StudyConfig c = g.config.empty() ? StudyConfig{} : load_study_config(g.config);
  if (g.seed) apply_seed(c, *g.seed);
  if (!g.runs_dir.empty()) c.runs_dir = g.runs_dir;
  return c;
}

void warn(const std::string& msg) { std::cerr << "warning: " << msg << "\n"; }

keywords::ExtractOptions extract_options(const KeywordOptions& k) {
  keywords::ExtractOptions o;
  o.ngram_min = k.ngram_min;
  o.ngram_max = k.ngram_max;
  o.stopwords = k.stopwords.empty() ? keywords::default_stopwords() : keywords::load_stopwords(k.stopwords);
  return o;
}

std::vector<corpus::PatentRecord> select_records(const fs::path& path, const std::string& domain,
                                                 const CorpusOptions& opts) {
  const auto records = corpus::ingest_corpus(path, domain);
  const auto filtered = corpus::filter_titles(records, opts.min_words);
  auto sel = corpus::select_latest(filtered, opts.latest);
  std::cerr << "ingested " << records.size() << ", " << filtered.size() << " with >= "
            << opts.min_words << " words, selected " << sel.records.size() << "\n";
  if (sel.undersized) {
    warn("corpus has fewer than " + std::to_string(opts.latest) + " eligible records; using all " +
         std::to_string(sel.records.size()));
  }
  return std::move(sel.records);
}

void print_summary(const char* label, const novelty::DistributionSummary& s) {
  std::printf("%s: n=%zu mean=%.4f median=%.4f q1=%.4f q3=%.4f min=%.4f max=%.4f\n", label,
              s.count, s.mean, s.median, s.q1, s.q3, s.min, s.max);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Keyword-conditioned design idea generation from patent-title corpora"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  std::uint64_t seed_value = 0;
  app.add_option("--config", g.config, "Config file (INI sections per module)");
  auto* seed_opt = app.add_option("--seed", seed_value, "Override every random seed");
  app.add_option("--runs-dir", g.runs_dir, "Runs directory (default: runs)");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Read, length-filter and select the latest patents");
  fs::path ingest_corpus, ingest_out;
  std::string ingest_domain;
  std::optional<int> ingest_min_words, ingest_latest;
  ingest->add_option("--corpus", ingest_corpus, "Corpus file")->required();
  ingest->add_option("--domain", ingest_domain, "Expected domain id");
  ingest->add_option("--min-words", ingest_min_words, "Minimum title words");
  ingest->add_option("--latest", ingest_latest, "Number of most recent patents to keep");
  ingest->add_option("--out", ingest_out, "Write the selected records here");

  // proximity
  auto* proximity = app.add_subcommand("proximity", "Compute a co-classification proximity table");
  std::vector<fs::path> prox_corpora;
  fs::path prox_catalog, prox_out;
  proximity->add_option("--corpus", prox_corpora, "Corpus files (any domains)")->required();
  proximity->add_option("--domains", prox_catalog, "Domain catalog file");
  proximity->add_option("--out", prox_out, "Output table (default <runs-dir>/proximity.tsv)");

  // rank
  auto* rank = app.add_subcommand("rank", "List domains by proximity to a target");
  fs::path rank_table, rank_catalog;
  std::string rank_target;
  rank->add_option("--table", rank_table, "Proximity table (default <runs-dir>/proximity.tsv)");
  rank->add_option("--target", rank_target, "Target domain id")->required();
  rank->add_option("--domains", rank_catalog, "Domain catalog file");

  // prepare
  auto* prepare = app.add_subcommand("prepare", "Extract keywords and write the fine-tuning dataset");
  fs::path prep_corpus, prep_out, prep_stopwords;
  std::string prep_domain;
  prepare->add_option("--corpus", prep_corpus, "Corpus file")->required();
  prepare->add_option("--domain", prep_domain, "Domain id")->required();
  prepare->add_option("--out", prep_out, "Dataset file (default <runs-dir>/datasets/<domain>.txt)");
  prepare->add_option("--stopwords", prep_stopwords, "Stopword file");

  // finetune
  auto* finetune = app.add_subcommand("finetune", "Fine-tune the toy backend on a dataset");
  fs::path ft_dataset;
  std::string ft_domain;
  std::optional<int> ft_steps, ft_log_every, ft_ckpt_every;
  std::optional<double> ft_lr;
  finetune->add_option("--dataset", ft_dataset, "Dataset file")->required();
  finetune->add_option("--domain", ft_domain, "Domain id")->required();
  finetune->add_option("--steps", ft_steps, "Training steps");
  finetune->add_option("--log-every", ft_log_every, "Loss logging interval");
  finetune->add_option("--checkpoint-every", ft_ckpt_every, "Checkpoint interval (0 = end only)");
  finetune->add_option("--learning-rate", ft_lr, "Adam learning rate");

  // generate
  auto* generate = app.add_subcommand("generate", "Sample ideas from a fine-tuned domain model");
  std::string gen_domain, gen_keyword, gen_run_id;
  std::optional<int> gen_n, gen_top_k, gen_max_tokens;
  std::optional<double> gen_temperature;
  generate->add_option("--domain", gen_domain, "Domain id")->required();
  generate->add_option("--keyword", gen_keyword, "Target keyword");
  generate->add_option("-n,--n-samples", gen_n, "Number of samples");
  generate->add_option("--temperature", gen_temperature, "Sampling temperature");
  generate->add_option("--top-k", gen_top_k, "Top-k cutoff");
  generate->add_option("--max-new-tokens", gen_max_tokens, "Token limit per idea");
  generate->add_option("--run-id", gen_run_id, "Run id (default <domain>__<keyword>)");

  // score
  auto* score = app.add_subcommand("score", "Score idea novelty against term vectors");
  fs::path score_ideas, score_terms, score_out;
  bool score_all = false;
  score->add_option("--ideas", score_ideas, "ideas.jsonl file")->required();
  score->add_option("--terms", score_terms, "Term-vector file");
  score->add_option("--out", score_out, "Novelty CSV (default beside the ideas file)");
  score->add_flag("--all", score_all, "Score duplicates too (default: unique ideas only)");

  auto* study = app.add_subcommand("study", "Run the full per-domain case study");
  auto* report = app.add_subcommand("report", "Rebuild the report from persisted runs");

  // serve
  auto* serve = app.add_subcommand("serve", "Start the HTTP service");
  std::optional<int> serve_port;
  fs::path serve_table, serve_catalog, serve_terms;
  serve->add_option("--port", serve_port, "Port (also IDEATION_PORT)");
  serve->add_option("--table", serve_table, "Proximity table");
  serve->add_option("--domains", serve_catalog, "Domain catalog file");
  serve->add_option("--terms", serve_terms, "Term-vector file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::kUsage);
  }
  if (seed_opt->count()) g.seed = seed_value;

  try {
    StudyConfig cfg = base_config(g);

    if (ingest->parsed()) {
      if (ingest_min_words) cfg.corpus.min_words = *ingest_min_words;
      if (ingest_latest) cfg.corpus.latest = *ingest_latest;
      const auto records = select_records(ingest_corpus, ingest_domain, cfg.corpus);
      if (!ingest_out.empty()) corpus::write_corpus(ingest_out, records);
      std::cout << records.size() << "\n";

    } else if (proximity->parsed()) {
      std::vector<corpus::PatentRecord> all;
      for (const auto& p : prox_corpora) {
        auto recs = corpus::ingest_corpus(p);
        all.insert(all.end(), recs.begin(), recs.end());
      }
      std::vector<corpus::Domain> domains;
      if (!prox_catalog.empty()) {
        domains = corpus::load_domains(prox_catalog);
      } else {
        std::set<std::string> ids;
        for (const auto& r : all) ids.insert(r.domain_id);
        for (const auto& id : ids) domains.push_back({id, id, {}});
      }
      const auto table = corpus::compute_proximity(all, domains);
      for (const auto& w : table.warnings) warn(w);
      const auto out = prox_out.empty() ? cfg.runs_dir / "proximity.tsv" : prox_out;
      corpus::save_proximity(table, out);
      std::cout << out.string() << "\n";

    } else if (rank->parsed()) {
      const auto table = corpus::load_proximity(rank_table.empty() ? cfg.runs_dir / "proximity.tsv" : rank_table);
      std::vector<corpus::Domain> catalog;
      if (!rank_catalog.empty()) catalog = corpus::load_domains(rank_catalog);
      for (const auto& rd : corpus::rank_domains(table, rank_target, catalog)) {
        std::cout << rd.rank << '\t' << rd.domain.domain_id << '\t' << rd.domain.display_name << '\t'
                  << text::format_double(rd.proximity) << "\n";
      }

    } else if (prepare->parsed()) {
      if (!prep_stopwords.empty()) cfg.keywords.stopwords = prep_stopwords;
      const auto records = select_records(prep_corpus, prep_domain, cfg.corpus);
      const auto opts = extract_options(cfg.keywords);
      const keywords::HashEmbeddingBackend embedder(cfg.keywords.embedding_dim, cfg.keywords.embedding_seed);
      keywords::KeywordCache cache(cfg.runs_dir / "keyword_cache" / (prep_domain + ".tsv"));
      const auto built = dataset::build_pairs(records, [&](const corpus::PatentRecord& r) {
        if (auto hit = cache.get(r.patent_id)) return *hit;
        auto kw = keywords::extract_keyword(r.title, embedder, opts);
        cache.put(r.patent_id, kw);
        return kw;
      });
      if (built.skipped) warn(std::to_string(built.skipped) + " titles had no keyword candidates");
      const auto out = prep_out.empty() ? cfg.runs_dir / "datasets" / (prep_domain + ".txt") : prep_out;
      const auto m = dataset::serialize_dataset(built.pairs, out, cfg.shuffle_seed, prep_domain,
                                                io::file_hash(prep_corpus));
      std::cout << out.string() << " (" << m.n_pairs << " pairs)\n";

    } else if (finetune->parsed()) {
      if (ft_steps) cfg.finetune.steps = *ft_steps;
      if (ft_log_every) cfg.finetune.log_every = *ft_log_every;
      if (ft_ckpt_every) cfg.finetune.checkpoint_every = *ft_ckpt_every;
      if (ft_lr) cfg.finetune.learning_rate = *ft_lr;
      lm::ToyCharModel model(cfg.model);
      const auto result = lm::finetune(model, ft_dataset, cfg.finetune, cfg.runs_dir / "checkpoints", ft_domain,
                                       [&](int step, double loss) {
                                         if (step % cfg.finetune.log_every == 0) {
                                           std::fprintf(stderr, "step %d loss %.4f\n", step, loss);
                                         }
                                       });
      if (result.truncated_examples) {
        warn(std::to_string(result.truncated_examples) + " examples truncated at the context limit");
      }
      std::cout << result.checkpoint.dir.string() << "\n";

    } else if (generate->parsed()) {
      if (!gen_keyword.empty()) cfg.target_keyword = gen_keyword;
      if (gen_n) cfg.generate.n_samples = *gen_n;
      if (gen_temperature) cfg.generate.temperature = *gen_temperature;
      if (gen_top_k) cfg.generate.top_k = *gen_top_k;
      if (gen_max_tokens) cfg.generate.max_new_tokens = *gen_max_tokens;
      cfg.generate.validate();
      const auto ref = lm::latest_checkpoint(cfg.runs_dir / "checkpoints", gen_domain);
      lm::ToyCharModel model;
      model.load(ref.model_file());
      const auto ideas = ideation::generate_ideas(
          model, cfg.target_keyword, gen_domain,
          "checkpoints/" + gen_domain + "/" + std::to_string(ref.step), cfg.generate);
      const auto run_id = gen_run_id.empty() ? experiment::make_run_id(gen_domain, cfg.target_keyword) : gen_run_id;
      const auto out = cfg.runs_dir / run_id / "ideas.jsonl";
      ideation::save_ideas(out, ideas);
      const auto dedup = ideation::dedup_stats(ideas);
      std::cout << out.string() << "\n"
                << ideation::format_pct(dedup.stats.pct_unique) << " unique (" << dedup.stats.n_unique << "/"
                << dedup.stats.n_generated << ")\n";

    } else if (score->parsed()) {
      const auto terms = score_terms.empty() ? cfg.term_vectors : score_terms;
      if (terms.empty()) throw UsageError("score needs --terms or term_vectors in the config");
      const auto store = novelty::load_term_vectors(terms);
      const auto ideas = ideation::load_ideas(score_ideas);
      const auto selected = score_all ? ideas : ideation::dedup_stats(ideas).unique;
      const auto run_id = score_ideas.parent_path().filename().string();
      std::vector<novelty::NoveltyRow> rows;
      std::vector<double> mins, tokens;
      for (const auto& idea : selected) {
        rows.push_back(novelty::to_row(run_id, novelty::idea_novelty(idea.text, store, idea.sample_index)));
        if (rows.back().min_score) mins.push_back(*rows.back().min_score);
        tokens.push_back(rows.back().token_count);
      }
      const auto out = score_out.empty() ? score_ideas.parent_path() / "novelty.csv" : score_out;
      novelty::write_novelty_csv(out, rows);
      std::cout << out.string() << "\n" << mins.size() << " of " << rows.size() << " ideas scorable\n";
      if (!mins.empty()) print_summary("min term relevancy", novelty::summarize(mins, cfg.histogram_bins));
      if (!tokens.empty()) print_summary("tokens", novelty::summarize(tokens, cfg.histogram_bins));

    } else if (study->parsed()) {
      if (g.config.empty()) throw UsageError("study needs --config");
      const auto result = experiment::run_case_study(cfg, [](const std::string& m) { std::cerr << m << "\n"; });
      for (const auto& n : result.notes) warn(n);
      for (const auto& f : result.failures) std::cerr << "failed: " << f.domain_id << ": " << f.message << "\n";
      if (!result.manifests.empty()) {
        std::cout << io::read_file(cfg.runs_dir / "report" / "report.txt");
      }
      if (result.manifests.empty()) throw DataError("every domain failed");
      if (!result.failures.empty()) return static_cast<int>(ExitCode::kData);

    } else if (report->parsed()) {
      const auto manifests = experiment::find_manifests(cfg.runs_dir);
      std::vector<std::string> notes;
      const auto comparisons = experiment::near_far_comparisons(manifests, cfg.near, cfg.far, cfg.alpha, notes);
      for (const auto& n : notes) warn(n);
      experiment::export_report(manifests, comparisons, cfg.runs_dir / "report", cfg.histogram_bins);
      std::cout << io::read_file(cfg.runs_dir / "report" / "report.txt");

    } else if (serve->parsed()) {
      auto sc = service::load_service_config(g.config);
      service::apply_environment(sc);
      if (!g.runs_dir.empty()) sc.runs_dir = g.runs_dir;
      if (serve_port) sc.port = *serve_port;
      if (!serve_table.empty()) sc.proximity = serve_table;
      if (!serve_catalog.empty()) sc.domain_catalog = serve_catalog;
      if (!serve_terms.empty()) sc.term_vectors = serve_terms;
      service::Session session(sc);
      std::cerr << "listening on " << sc.host << ":" << sc.port << "\n";
      if (!service::serve(session)) throw UsageError("cannot listen on port " + std::to_string(sc.port));
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kUsage);
  } catch (const BackendError& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kBackend);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kData);
  }
  return static_cast<int>(ExitCode::kOk);
}
