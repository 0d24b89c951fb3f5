#include "ideagen/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "ideagen/corpus.hpp"
#include "ideagen/dataset.hpp"
#include "ideagen/errors.hpp"
#include "ideagen/io.hpp"
#include "ideagen/keywords.hpp"
#include "ideagen/text.hpp"
#include "ideagen/toy_model.hpp"

namespace ideagen::experiment {

using ideagen::to_json;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string checkpoint_rel(const lm::CheckpointRef& ref) {
  return "checkpoints/" + ref.domain_id + "/" + std::to_string(ref.step);
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::filesystem::path keyword_cache_path(const RunSpec& spec) {
  const auto key = to_json(spec.keywords).dump();
  return spec.runs_dir / "keyword_cache" /
         (spec.domain_id + "-" + io::hex64(fnv1a(key.data(), key.size())) + ".tsv");
}

}  // namespace

std::string make_run_id(std::string_view domain_id, std::string_view keyword) {
  std::string slug;
  for (char c : text::to_lower(keyword)) {
    const bool alnum = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
    if (alnum) {
      slug.push_back(c);
    } else if (!slug.empty() && slug.back() != '-') {
      slug.push_back('-');
    }
  }
  while (!slug.empty() && slug.back() == '-') slug.pop_back();
  return std::string(domain_id) + "__" + (slug.empty() ? "idea" : slug);
}

ordered_json to_json(const RunManifest& m) {
  const auto& s = m.spec;
  ordered_json j;
  j["run_id"] = s.run_id;
  j["tool_version"] = m.tool_version;
  j["created_at"] = m.created_at;
  j["target_keyword"] = s.target_keyword;
  j["domain_id"] = s.domain_id;
  j["display_name"] = s.display_name;
  j["rank"] = s.rank ? json(*s.rank) : json(nullptr);
  j["proximity"] = s.proximity ? json(*s.proximity) : json(nullptr);
  j["inputs"] = {{"corpus", s.corpus_path.string()},
                 {"corpus_hash", m.corpus_hash},
                 {"term_vectors", s.term_vectors.string()},
                 {"runs_dir", s.runs_dir.string()}};
  j["configs"] = {{"corpus", to_json(s.corpus)},
                  {"keywords", to_json(s.keywords)},
                  {"dataset", {{"shuffle_seed", s.shuffle_seed}}},
                  {"model", to_json(s.model)},
                  {"finetune", to_json(s.finetune)},
                  {"generate", to_json(s.generate)},
                  {"novelty", {{"histogram_bins", s.histogram_bins}, {"scope", "unique ideas"}}},
                  {"threads", s.threads}};
  j["corpus_stats"] = {{"records_ingested", m.records_ingested},
                       {"records_selected", m.records_selected},
                       {"undersized", m.undersized}};
  j["dataset"] = {{"path", "dataset.txt"},
                  {"manifest", "dataset.txt.manifest"},
                  {"n_pairs", m.n_pairs},
                  {"keyword_failures", m.keyword_failures}};
  j["checkpoint"] = {{"path", checkpoint_rel(m.checkpoint)}, {"step", m.checkpoint.step}};
  j["stats"] = {{"n_generated", m.stats.n_generated},
                {"n_unique", m.stats.n_unique},
                {"pct_unique", m.stats.pct_unique},
                {"n_scorable", m.n_scorable}};
  j["artifacts"] = {{"ideas", "ideas.jsonl"}, {"novelty", "novelty.csv"}, {"loss", "loss.csv"}};
  return j;
}

RunManifest manifest_from_json(const json& j) {
  RunManifest m;
  auto& s = m.spec;
  try {
    s.run_id = j.at("run_id").get<std::string>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.created_at = j.at("created_at").get<std::string>();
    s.target_keyword = j.at("target_keyword").get<std::string>();
    s.domain_id = j.at("domain_id").get<std::string>();
    s.display_name = j.at("display_name").get<std::string>();
    if (!j.at("rank").is_null()) s.rank = j.at("rank").get<int>();
    if (!j.at("proximity").is_null()) s.proximity = j.at("proximity").get<double>();
    const auto& in = j.at("inputs");
    s.corpus_path = in.at("corpus").get<std::string>();
    m.corpus_hash = in.at("corpus_hash").get<std::string>();
    s.term_vectors = in.at("term_vectors").get<std::string>();
    s.runs_dir = in.at("runs_dir").get<std::string>();
    const auto& cfg = j.at("configs");
    s.corpus = corpus_options_from_json(cfg.at("corpus"));
    s.keywords = keyword_options_from_json(cfg.at("keywords"));
    s.shuffle_seed = cfg.at("dataset").at("shuffle_seed").get<std::uint64_t>();
    s.model = model_config_from_json(cfg.at("model"));
    s.finetune = finetune_config_from_json(cfg.at("finetune"));
    s.generate = generation_config_from_json(cfg.at("generate"));
    s.histogram_bins = cfg.at("novelty").at("histogram_bins").get<int>();
    s.threads = cfg.at("threads").get<unsigned>();
    const auto& cs = j.at("corpus_stats");
    m.records_ingested = cs.at("records_ingested").get<std::size_t>();
    m.records_selected = cs.at("records_selected").get<std::size_t>();
    m.undersized = cs.at("undersized").get<bool>();
    m.n_pairs = j.at("dataset").at("n_pairs").get<std::size_t>();
    m.keyword_failures = j.at("dataset").at("keyword_failures").get<std::size_t>();
    m.checkpoint.domain_id = s.domain_id;
    m.checkpoint.step = j.at("checkpoint").at("step").get<int>();
    m.checkpoint.dir = s.runs_dir / j.at("checkpoint").at("path").get<std::string>();
    const auto& st = j.at("stats");
    m.stats.n_generated = st.at("n_generated").get<std::size_t>();
    m.stats.n_unique = st.at("n_unique").get<std::size_t>();
    m.stats.pct_unique = st.at("pct_unique").get<double>();
    m.n_scorable = st.at("n_scorable").get<std::size_t>();
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed run manifest: ") + e.what());
  }
  return m;
}

RunManifest load_manifest(const std::filesystem::path& path) {
  try {
    return manifest_from_json(json::parse(io::read_file(path)));
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

RunManifest run_domain(const RunSpec& spec) {
  RunManifest m;
  m.spec = spec;
  const auto run_dir = m.run_dir();
  std::filesystem::remove_all(run_dir);
  std::filesystem::create_directories(run_dir);

  // corpus
  const auto records = corpus::ingest_corpus(spec.corpus_path, spec.domain_id);
  m.records_ingested = records.size();
  m.corpus_hash = io::file_hash(spec.corpus_path);
  const auto filtered = corpus::filter_titles(records, spec.corpus.min_words);
  const auto selection = corpus::select_latest(filtered, spec.corpus.latest);
  m.records_selected = selection.records.size();
  m.undersized = selection.undersized;

  // keywords + dataset
  keywords::ExtractOptions opts;
  opts.ngram_min = spec.keywords.ngram_min;
  opts.ngram_max = spec.keywords.ngram_max;
  opts.stopwords = spec.keywords.stopwords.empty()
                       ? keywords::default_stopwords()
                       : keywords::load_stopwords(spec.keywords.stopwords);
  const keywords::HashEmbeddingBackend embedder(spec.keywords.embedding_dim,
                                                spec.keywords.embedding_seed);
  keywords::KeywordCache cache(keyword_cache_path(spec));
  const auto built = dataset::build_pairs(selection.records, [&](const corpus::PatentRecord& r) {
    if (auto hit = cache.get(r.patent_id)) return *hit;
    auto kw = keywords::extract_keyword(r.title, embedder, opts);
    cache.put(r.patent_id, kw);
    return kw;
  });
  m.keyword_failures = built.skipped;
  m.n_pairs = built.pairs.size();
  dataset::serialize_dataset(built.pairs, m.dataset_file(), spec.shuffle_seed, spec.domain_id,
                             m.corpus_hash);

  // fine-tune
  lm::ToyCharModel model(spec.model);
  const auto ft = lm::finetune(model, m.dataset_file(), spec.finetune,
                               spec.runs_dir / "checkpoints", spec.domain_id);
  m.checkpoint = ft.checkpoint;
  lm::save_loss_trace(ft.trace, m.loss_file());

  // generate + dedup
  ideation::GenerateOptions gen_opts;
  gen_opts.threads = spec.threads;
  const auto ideas = ideation::generate_ideas(model, spec.target_keyword, spec.domain_id,
                                              checkpoint_rel(m.checkpoint), spec.generate,
                                              gen_opts);
  ideation::save_ideas(m.ideas_file(), ideas);
  const auto dedup = ideation::dedup_stats(ideas);
  m.stats = dedup.stats;

  // novelty of the unique ideas
  const auto store = novelty::load_term_vectors(spec.term_vectors);
  std::vector<novelty::NoveltyRow> rows;
  for (const auto& idea : dedup.unique) {
    rows.push_back(novelty::to_row(spec.run_id,
                                   novelty::idea_novelty(idea.text, store, idea.sample_index)));
    if (rows.back().min_score) ++m.n_scorable;
  }
  novelty::write_novelty_csv(m.novelty_file(), rows);

  m.created_at = io::utc_timestamp();
  io::write_file(m.manifest_file(), to_json(m).dump(2) + "\n");
  return m;
}

RunManifest replay(const RunManifest& manifest, const std::filesystem::path& runs_dir) {
  RunSpec spec = manifest.spec;
  spec.runs_dir = runs_dir;
  return run_domain(spec);
}

std::string to_string(Direction d) {
  switch (d) {
    case Direction::kFarLower:
      return "far_lower";
    case Direction::kNearLower:
      return "near_lower";
    case Direction::kIndistinct:
      break;
  }
  return "indistinct";
}

FieldComparison compare_fields(std::span<const double> near, std::span<const double> far,
                               double alpha) {
  if (near.size() < 3 || far.size() < 3) throw DataError("insufficient sample");
  FieldComparison c;
  c.near_scores.assign(near.begin(), near.end());
  c.far_scores.assign(far.begin(), far.end());
  c.alpha = alpha;
  c.median_near = median_of(c.near_scores);
  c.median_far = median_of(c.far_scores);

  // Pool and rank, averaging ranks across ties.
  struct Obs {
    double v;
    bool is_far;
  };
  std::vector<Obs> pooled;
  for (double v : near) pooled.push_back({v, false});
  for (double v : far) pooled.push_back({v, true});
  std::sort(pooled.begin(), pooled.end(), [](const Obs& a, const Obs& b) { return a.v < b.v; });

  const double n1 = static_cast<double>(near.size());
  const double n2 = static_cast<double>(far.size());
  const double n = n1 + n2;
  double rank_sum_far = 0.0;
  double tie_term = 0.0;
  for (std::size_t i = 0; i < pooled.size();) {
    std::size_t j = i;
    while (j < pooled.size() && pooled[j].v == pooled[i].v) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    for (std::size_t k = i; k < j; ++k) {
      if (pooled[k].is_far) rank_sum_far += avg_rank;
    }
    i = j;
  }
  c.rank_sum_statistic = rank_sum_far - n2 * (n2 + 1.0) / 2.0;

  const double mean = n1 * n2 / 2.0;
  const double var = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (var > 0.0) {
    c.z = (c.rank_sum_statistic - mean) / std::sqrt(var);
    c.p_value = std::erfc(std::abs(c.z) / std::sqrt(2.0));
  } else {
    c.z = 0.0;
    c.p_value = 1.0;
  }

  if (c.p_value < alpha && c.median_far < c.median_near) {
    c.direction = Direction::kFarLower;
  } else if (c.p_value < alpha && c.median_near < c.median_far) {
    c.direction = Direction::kNearLower;
  }
  return c;
}

std::vector<double> persisted_min_scores(const RunManifest& manifest) {
  std::vector<double> out;
  for (const auto& row : novelty::read_novelty_csv(manifest.novelty_file())) {
    if (row.min_score) out.push_back(*row.min_score);
  }
  return out;
}

ReportRow report_row(const RunManifest& manifest, int histogram_bins) {
  ReportRow row;
  row.domain_id = manifest.spec.domain_id;
  row.display_name = manifest.spec.display_name;
  row.rank = manifest.spec.rank;
  row.proximity = manifest.spec.proximity;

  const auto ideas = ideation::load_ideas(manifest.ideas_file());
  const auto dedup = ideation::dedup_stats(ideas);
  row.stats = dedup.stats;
  for (const auto& idea : dedup.unique) {
    if (row.examples.size() == 4) break;
    if (!idea.empty()) row.examples.push_back(idea.text);
  }

  const auto rows = novelty::read_novelty_csv(manifest.novelty_file());
  std::vector<double> scores, tokens;
  for (const auto& r : rows) {
    if (r.min_score) scores.push_back(*r.min_score);
    tokens.push_back(static_cast<double>(r.token_count));
  }
  if (!scores.empty()) row.min_score_summary = novelty::summarize(scores, histogram_bins);
  if (!tokens.empty()) row.token_summary = novelty::summarize(tokens, histogram_bins);
  return row;
}

namespace {

std::string histogram_csv(const novelty::DistributionSummary& s) {
  std::string out = "bin_lo,bin_hi,count\n";
  for (std::size_t b = 0; b < s.bin_counts.size(); ++b) {
    out += text::format_double(s.bin_edges[b]) + ',' + text::format_double(s.bin_edges[b + 1]) +
           ',' + std::to_string(s.bin_counts[b]) + '\n';
  }
  return out;
}

std::string summary_line(const std::string& domain, const std::string& metric,
                         const novelty::DistributionSummary& s) {
  return text::csv_escape(domain) + ',' + metric + ',' + std::to_string(s.count) + ',' +
         text::format_double(s.mean) + ',' + text::format_double(s.median) + ',' +
         text::format_double(s.q1) + ',' + text::format_double(s.q3) + ',' +
         text::format_double(s.min) + ',' + text::format_double(s.max) + '\n';
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace

void export_report(std::span<const RunManifest> manifests,
                   std::span<const NamedComparison> comparisons,
                   const std::filesystem::path& out_dir, int histogram_bins) {
  if (manifests.empty()) throw DataError("no runs to report");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw DataError("cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<const RunManifest*> order;
  for (const auto& m : manifests) order.push_back(&m);
  std::sort(order.begin(), order.end(), [](const RunManifest* a, const RunManifest* b) {
    const int ra = a->spec.rank.value_or(std::numeric_limits<int>::max());
    const int rb = b->spec.rank.value_or(std::numeric_limits<int>::max());
    if (ra != rb) return ra < rb;
    return a->spec.domain_id < b->spec.domain_id;
  });

  std::string csv =
      "rank,domain_id,display_name,proximity,n_generated,n_unique,pct_unique,"
      "n_scorable,median_min_score,median_tokens,example_1,example_2,example_3,example_4\n";
  std::string txt = "Idea generation results for target keyword";
  txt += manifests.empty() ? "\n" : " \"" + manifests.front().spec.target_keyword + "\"\n\n";
  std::string summary = "domain_id,metric,count,mean,median,q1,q3,min,max\n";
  std::vector<novelty::NoveltyRow> all_rows;

  for (const RunManifest* m : order) {
    const auto row = report_row(*m, histogram_bins);
    const std::string rank = row.rank ? std::to_string(*row.rank) : "";
    const std::string prox = row.proximity ? text::format_double(*row.proximity) : "";
    const std::string med_score =
        row.min_score_summary ? text::format_double(row.min_score_summary->median) : "";
    const std::string med_tokens =
        row.token_summary ? text::format_double(row.token_summary->median) : "";
    csv += rank + ',' + text::csv_escape(row.domain_id) + ',' +
           text::csv_escape(row.display_name) + ',' + prox + ',' +
           std::to_string(row.stats.n_generated) + ',' + std::to_string(row.stats.n_unique) +
           ',' + ideation::format_pct(row.stats.pct_unique) + ',' +
           std::to_string(row.min_score_summary ? row.min_score_summary->count : 0) + ',' +
           med_score + ',' + med_tokens;
    for (std::size_t e = 0; e < 4; ++e) {
      csv += ',';
      if (e < row.examples.size()) csv += text::csv_escape(row.examples[e]);
    }
    csv += '\n';

    txt += row.display_name + (row.rank ? " (rank " + rank + ")" : std::string()) + "\n";
    txt += "  unique ideas: " + ideation::format_pct(row.stats.pct_unique) + " (" +
           std::to_string(row.stats.n_unique) + "/" + std::to_string(row.stats.n_generated) +
           ")\n";
    if (row.min_score_summary) {
      txt += "  min term relevancy: median " + fixed(row.min_score_summary->median, 3) +
             ", mean " + fixed(row.min_score_summary->mean, 3) + " over " +
             std::to_string(row.min_score_summary->count) + " scorable ideas\n";
    }
    for (const auto& ex : row.examples) txt += "  - " + ex + "\n";
    txt += "\n";

    if (row.min_score_summary) {
      io::write_file(out_dir / ("hist_min_score_" + row.domain_id + ".csv"),
                     histogram_csv(*row.min_score_summary));
      summary += summary_line(row.domain_id, "min_score", *row.min_score_summary);
    }
    if (row.token_summary) {
      io::write_file(out_dir / ("hist_tokens_" + row.domain_id + ".csv"),
                     histogram_csv(*row.token_summary));
      summary += summary_line(row.domain_id, "token_count", *row.token_summary);
    }
    io::write_file(out_dir / ("loss_" + row.domain_id + ".csv"), io::read_file(m->loss_file()));
    for (auto& r : novelty::read_novelty_csv(m->novelty_file())) all_rows.push_back(std::move(r));
  }

  ordered_json cmp = ordered_json::array();
  for (const auto& nc : comparisons) {
    const auto& c = nc.comparison;
    cmp.push_back({{"label", nc.label},
                   {"n_near", c.near_scores.size()},
                   {"n_far", c.far_scores.size()},
                   {"median_near", c.median_near},
                   {"median_far", c.median_far},
                   {"rank_sum_statistic", c.rank_sum_statistic},
                   {"z", c.z},
                   {"p_value", c.p_value},
                   {"alpha", c.alpha},
                   {"direction", to_string(c.direction)}});
    txt += "Near vs far (" + nc.label + "): " + to_string(c.direction) + ", median near " +
           fixed(c.median_near, 3) + ", median far " + fixed(c.median_far, 3) + ", U = " +
           text::format_double(c.rank_sum_statistic) + ", p = " + fixed(c.p_value, 4) +
           " (alpha " + text::format_double(c.alpha) + ")\n";
  }
  txt += "\nReference mean term relevancy " + text::format_double(novelty::kReferenceMeanRelevancy) +
         " applies to the reference technology term network only; term vectors used: " +
         manifests.front().spec.term_vectors.string() + "\n";

  io::write_file(out_dir / "report.csv", csv);
  io::write_file(out_dir / "report.txt", txt);
  io::write_file(out_dir / "summary.csv", summary);
  io::write_file(out_dir / "comparison.json", cmp.dump(2) + "\n");
  novelty::write_novelty_csv(out_dir / "novelty_all.csv", all_rows);
}

std::vector<RunManifest> find_manifests(const std::filesystem::path& runs_dir) {
  std::vector<RunManifest> out;
  if (!std::filesystem::is_directory(runs_dir)) {
    throw DataError("runs directory not found: " + runs_dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(runs_dir)) {
    const auto f = entry.path() / "manifest.json";
    if (entry.is_directory() && std::filesystem::exists(f)) files.push_back(f);
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) out.push_back(load_manifest(f));
  return out;
}

std::vector<NamedComparison> near_far_comparisons(std::span<const RunManifest> manifests,
                                                  std::vector<std::string> near,
                                                  std::vector<std::string> far, double alpha,
                                                  std::vector<std::string>& notes) {
  if (near.empty() && far.empty()) {
    std::vector<const RunManifest*> with_rank;
    for (const auto& m : manifests) {
      if (m.spec.rank) with_rank.push_back(&m);
    }
    std::sort(with_rank.begin(), with_rank.end(), [](const RunManifest* a, const RunManifest* b) {
      return *a->spec.rank < *b->spec.rank;
    });
    const std::size_t half = with_rank.size() / 2;
    for (std::size_t i = 0; i < with_rank.size(); ++i) {
      (i < half ? near : far).push_back(with_rank[i]->spec.domain_id);
    }
  }
  std::vector<NamedComparison> out;
  if (near.empty() || far.empty()) return out;

  std::vector<double> near_scores, far_scores;
  for (const auto& m : manifests) {
    const auto& id = m.spec.domain_id;
    std::vector<double>* pool = nullptr;
    if (std::find(near.begin(), near.end(), id) != near.end()) {
      pool = &near_scores;
    } else if (std::find(far.begin(), far.end(), id) != far.end()) {
      pool = &far_scores;
    }
    if (!pool) continue;
    const auto scores = persisted_min_scores(m);
    pool->insert(pool->end(), scores.begin(), scores.end());
  }
  const std::string label = text::join(near, "+") + " vs " + text::join(far, "+");
  try {
    out.push_back({label, compare_fields(near_scores, far_scores, alpha)});
  } catch (const DataError& e) {
    notes.push_back("comparison " + label + " skipped: " + e.what());
  }
  return out;
}

StudyResult run_case_study(const StudyConfig& config, const ProgressFn& progress) {
  auto say = [&](const std::string& msg) {
    if (progress) progress(msg);
  };
  if (config.domains.empty()) throw UsageError("study lists no domains");
  if (config.term_vectors.empty()) throw UsageError("study needs term_vectors");
  for (const auto& d : config.domains) {
    if (!config.corpora.contains(d)) throw UsageError("no corpus configured for domain '" + d + "'");
  }

  StudyResult result;
  std::vector<corpus::Domain> catalog;
  if (!config.domain_catalog.empty()) catalog = corpus::load_domains(config.domain_catalog);

  // Proximity ranks relative to the target domain, when available.
  std::map<std::string, corpus::RankedDomain> ranked;
  if (!config.target_domain.empty()) {
    corpus::ProximityTable table;
    if (!config.proximity.empty()) {
      table = corpus::load_proximity(config.proximity);
    } else {
      std::vector<corpus::PatentRecord> all;
      std::vector<corpus::Domain> domains;
      for (const auto& [id, path] : config.corpora) {
        std::vector<corpus::PatentRecord> recs;
        try {
          recs = corpus::ingest_corpus(path, id);
        } catch (const DataError& e) {
          // The domain's own run reports the failure; rank the others.
          result.notes.push_back(std::string("proximity skips ") + id + ": " + e.what());
          continue;
        }
        corpus::Domain d{id, id, {}};
        std::set<std::string> codes;
        for (const auto& r : recs) codes.insert(r.class_codes.begin(), r.class_codes.end());
        d.class_codes.assign(codes.begin(), codes.end());
        domains.push_back(std::move(d));
        all.insert(all.end(), std::make_move_iterator(recs.begin()),
                   std::make_move_iterator(recs.end()));
      }
      table = corpus::compute_proximity(all, domains);
      for (const auto& w : table.warnings) result.notes.push_back(w);
    }
    if (table.provenance() == corpus::Provenance::kComputed) {
      corpus::save_proximity(table, config.runs_dir / "proximity.tsv");
    }
    for (auto& rd : corpus::rank_domains(table, config.target_domain, catalog)) {
      ranked[rd.domain.domain_id] = rd;
    }
  }

  for (const auto& domain : config.domains) {
    RunSpec spec;
    spec.run_id = make_run_id(domain, config.target_keyword);
    spec.target_keyword = config.target_keyword;
    spec.domain_id = domain;
    spec.display_name = domain;
    for (const auto& d : catalog) {
      if (d.domain_id == domain) spec.display_name = d.display_name;
    }
    if (auto it = ranked.find(domain); it != ranked.end()) {
      spec.rank = it->second.rank;
      spec.proximity = it->second.proximity;
    }
    spec.corpus_path = config.corpora.at(domain);
    spec.term_vectors = config.term_vectors;
    spec.runs_dir = config.runs_dir;
    spec.corpus = config.corpus;
    spec.keywords = config.keywords;
    spec.shuffle_seed = config.shuffle_seed;
    spec.model = config.model;
    spec.finetune = config.finetune;
    spec.generate = config.generate;
    spec.histogram_bins = config.histogram_bins;
    spec.threads = config.threads;

    say("domain " + domain + ": running");
    try {
      result.manifests.push_back(run_domain(spec));
      const auto& st = result.manifests.back().stats;
      say("domain " + domain + ": " + ideation::format_pct(st.pct_unique) + " unique (" +
          std::to_string(st.n_unique) + "/" + std::to_string(st.n_generated) + ")");
    } catch (const std::exception& e) {
      result.failures.push_back({domain, e.what()});
      say("domain " + domain + ": failed: " + e.what());
    }
  }

  result.comparisons = near_far_comparisons(result.manifests, config.near, config.far,
                                            config.alpha, result.notes);

  if (!result.manifests.empty()) {
    export_report(result.manifests, result.comparisons, config.runs_dir / "report",
                  config.histogram_bins);
  }
  return result;
}

}  // namespace ideagen::experiment
