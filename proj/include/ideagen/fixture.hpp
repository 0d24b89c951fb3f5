#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ideagen::fixture {

// Synthetic patent-title corpora, a domain catalog, a term-vector file and
// a study config for desk-scale runs. Titles are template-generated from
// per-domain phrase lists; some are deliberately three words or fewer so the
// length filter has work to do.
struct ToyStudyOptions {
  std::vector<std::string> source_domains = {"weapons", "lubricants"};
  std::string target_domain = "toys";
  int titles_per_domain = 100;
  int finetune_steps = 2000;
  int n_samples = 50;
  int max_new_tokens = 64;
  int term_dimension = 8;
  std::uint64_t seed = 7;
};

// Domain ids known to the generator.
std::vector<std::string> available_domains();

struct ToyStudyFiles {
  std::filesystem::path dir;
  std::filesystem::path config;        // study.ini
  std::filesystem::path catalog;       // domains.tsv
  std::filesystem::path term_vectors;  // terms.txt
  std::vector<std::filesystem::path> corpora;
};

// Writes everything under `dir` (runs go to dir/runs).
ToyStudyFiles write_toy_study(const std::filesystem::path& dir, const ToyStudyOptions& options);

// Titles only, for tests that need realistic strings.
std::vector<std::string> toy_titles(const std::string& domain_id, int n, std::uint64_t seed);

}  // namespace ideagen::fixture
