#include "ideagen/fixture.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "ideagen/corpus.hpp"
#include "ideagen/errors.hpp"
#include "ideagen/io.hpp"
#include "ideagen/novelty.hpp"
#include "ideagen/rng.hpp"
#include "ideagen/text.hpp"

namespace ideagen::fixture {

namespace {

struct DomainSpec {
  std::string display;
  std::vector<std::string> codes;
  std::vector<std::string> adjectives;
  std::vector<std::string> nouns;
  std::vector<std::string> features;
};

const std::map<std::string, DomainSpec>& specs() {
  static const std::map<std::string, DomainSpec> s = {
      {"toys",
       {"Toys",
        {"A63H", "A63B"},
        {"rolling", "musical", "wooden", "plush", "remote controlled", "educational"},
        {"rolling toy", "toy vehicle", "spinning top", "building block", "toy figure", "ball track"},
        {"flywheel", "sound module", "magnetic coupling", "detachable wheels", "light effects"}}},
      {"weapons",
       {"Weapons",
        {"F41A", "F41B", "F41J"},
        {"compact", "adjustable", "lightweight", "modular", "electronic", "foldable"},
        {"launcher", "dart board", "air gun", "projectile", "moving target", "trigger assembly"},
        {"recoil damper", "sighting device", "magazine", "safety catch", "barrel insert"}}},
      {"agriculture",
       {"Agriculture",
        {"A01B", "A01D", "A01F"},
        {"towed", "self-propelled", "hydraulic", "rotary", "harvesting", "automatic"},
        {"bale wrapper", "seed drill", "harvester header", "plough", "hay rake", "saddle"},
        {"pressure adjustment", "bump stop", "liquid container", "cutting blade", "depth wheel"}}},
      {"lighting",
       {"Lighting",
        {"F21V", "F21S", "H05B"},
        {"dimmable", "color changing", "solar powered", "waterproof", "portable", "recessed"},
        {"led unit", "light source", "lamp housing", "light fixture", "reflector", "lens array"},
        {"heat sink", "diffuser", "motion sensor", "driver circuit", "mounting bracket"}}},
      {"lubricants",
       {"Fuels & Lubricants",
        {"C10M", "C10L", "C10G"},
        {"synthetic", "low viscosity", "biodegradable", "high temperature", "sulfur free", "refined"},
        {"lubricant", "grease composition", "diesel fuel", "engine oil", "fuel additive", "base oil"},
        {"friction modifier", "antiwear agent", "detergent additive", "polymer thickener",
         "corrosion inhibitor"}}},
  };
  return s;
}

const DomainSpec& spec_for(const std::string& id) {
  auto it = specs().find(id);
  if (it == specs().end()) throw UsageError("unknown fixture domain '" + id + "'");
  return it->second;
}

std::string capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

template <typename T>
const T& pick(const std::vector<T>& v, const CounterRng& rng, std::uint64_t counter) {
  return v[static_cast<std::size_t>(rng.uniform(counter) * static_cast<double>(v.size())) % v.size()];
}

std::string make_title(const DomainSpec& d, const CounterRng& rng, std::uint64_t i) {
  const auto& adj = pick(d.adjectives, rng, 8 * i);
  const auto& noun = pick(d.nouns, rng, 8 * i + 1);
  const auto& feat = pick(d.features, rng, 8 * i + 2);
  const auto form = static_cast<int>(rng.uniform(8 * i + 3) * 6.0);
  switch (form) {
    case 0:
      return capitalize(adj + " " + noun + " with " + feat);
    case 1:
      return capitalize(noun + " " + feat + " and method");
    case 2:
      return capitalize(adj + " " + noun + " having a " + feat);
    case 3:
      return capitalize(noun + " with " + feat + " and " + pick(d.features, rng, 8 * i + 4));
    case 4:
      return capitalize(adj + " " + noun + " system");
    default:
      // Often three words or fewer; exercises the length filter.
      return capitalize(adj + " " + noun);
  }
}

}  // namespace

std::vector<std::string> available_domains() {
  std::vector<std::string> out;
  for (const auto& [id, _] : specs()) out.push_back(id);
  return out;
}

std::vector<std::string> toy_titles(const std::string& domain_id, int n, std::uint64_t seed) {
  const auto& d = spec_for(domain_id);
  const CounterRng rng(seed, fnv1a(domain_id.data(), domain_id.size()));
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(make_title(d, rng, static_cast<std::uint64_t>(i)));
  return out;
}

ToyStudyFiles write_toy_study(const std::filesystem::path& dir, const ToyStudyOptions& o) {
  ToyStudyFiles files;
  files.dir = dir;
  std::filesystem::create_directories(dir / "corpora");

  std::vector<std::string> all_domains = o.source_domains;
  if (!o.target_domain.empty()) all_domains.insert(all_domains.begin(), o.target_domain);

  // Catalog and corpora. Source domains share the target's first class code
  // on a domain-dependent fraction of patents, so proximity ranks differ.
  std::vector<corpus::Domain> catalog;
  const std::string shared_code = o.target_domain.empty() ? "" : spec_for(o.target_domain).codes[0];
  for (std::size_t di = 0; di < all_domains.size(); ++di) {
    const auto& id = all_domains[di];
    const auto& d = spec_for(id);
    catalog.push_back({id, d.display, d.codes});
    const CounterRng rng(o.seed, fnv1a(id.data(), id.size()) ^ 0xC0DEULL);
    const auto titles = toy_titles(id, o.titles_per_domain, o.seed);
    const double share = id == o.target_domain ? 0.0 : 0.4 / static_cast<double>(di);
    std::vector<corpus::PatentRecord> records;
    for (int i = 0; i < o.titles_per_domain; ++i) {
      const auto u = static_cast<std::uint64_t>(i);
      corpus::PatentRecord r;
      char idbuf[32];
      std::snprintf(idbuf, sizeof(idbuf), "US%07d", 1000000 + static_cast<int>(di) * 100000 + i);
      r.patent_id = idbuf;
      r.domain_id = id;
      r.title = titles[u];
      const int day = static_cast<int>(rng.uniform(4 * u) * 2900.0);
      const auto date = std::chrono::sys_days{std::chrono::year{2014} / 1 / 1} + std::chrono::days{day};
      r.grant_date = corpus::Date{date};
      r.class_codes.push_back(pick(d.codes, rng, 4 * u + 1));
      if (rng.uniform(4 * u + 2) < 0.5) r.class_codes.push_back(pick(d.codes, rng, 4 * u + 3));
      if (!shared_code.empty() && rng.uniform(4 * u + 5) < share) r.class_codes.push_back(shared_code);
      std::sort(r.class_codes.begin(), r.class_codes.end());
      r.class_codes.erase(std::unique(r.class_codes.begin(), r.class_codes.end()), r.class_codes.end());
      records.push_back(std::move(r));
    }
    const auto path = dir / "corpora" / (id + ".tsv");
    corpus::write_corpus(path, records);
    files.corpora.push_back(path);
  }
  files.catalog = dir / "domains.tsv";
  corpus::save_domains(files.catalog, catalog);

  // Term vectors: each domain's phrases cluster around a domain centroid.
  novelty::TermVectorStore store;
  std::set<std::string> added;
  const CounterRng vrng(o.seed, 0x7E57ULL);
  std::uint64_t counter = 0;
  for (const auto& id : available_domains()) {
    const auto& d = spec_for(id);
    std::vector<double> centroid(static_cast<std::size_t>(o.term_dimension));
    for (auto& c : centroid) c = vrng.normal(counter++);
    auto add_term = [&](const std::string& term) {
      if (!added.insert(term).second) return;
      std::vector<double> v(centroid);
      for (auto& x : v) x += 0.6 * vrng.normal(counter++);
      store.add(term, std::move(v));
    };
    for (const auto* list : {&d.adjectives, &d.nouns, &d.features}) {
      for (const auto& phrase : *list) {
        add_term(phrase);
        for (const auto& w : text::split_words(phrase)) add_term(w);
      }
    }
  }
  files.term_vectors = dir / "terms.txt";
  novelty::save_term_vectors(store, files.term_vectors);

  std::string ini;
  ini += "[study]\n";
  ini += "target_keyword = rolling toy\n";
  if (!o.target_domain.empty()) ini += "target_domain = " + o.target_domain + "\n";
  ini += "domains = " + text::join(o.source_domains, ",") + "\n";
  ini += "domain_catalog = domains.tsv\n";
  ini += "term_vectors = terms.txt\n";
  ini += "runs_dir = runs\n\n";
  ini += "[corpora]\n";
  for (const auto& id : all_domains) ini += id + " = corpora/" + id + ".tsv\n";
  ini += "\n[corpus]\nmin_words = 4\nlatest = 20000\n\n";
  ini += "[finetune]\nsteps = " + std::to_string(o.finetune_steps) + "\nlog_every = 100\n\n";
  ini += "[generate]\ntemperature = 0.9\ntop_k = 50\nn_samples = " + std::to_string(o.n_samples) +
         "\nmax_new_tokens = " + std::to_string(o.max_new_tokens) + "\nseed = " +
         std::to_string(o.seed) + "\n\n";
  ini += "[novelty]\nbins = 10\n\n[compare]\nalpha = 0.05\n\n";
  ini += "[service]\nruns_dir = runs\nproximity = runs/proximity.tsv\ndomain_catalog = domains.tsv\n"
         "term_vectors = terms.txt\n";
  files.config = dir / "study.ini";
  io::write_file(files.config, ini);
  return files;
}

}  // namespace ideagen::fixture
