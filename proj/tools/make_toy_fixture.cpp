// Writes a synthetic desk-scale study (corpora, catalog, term vectors,
// study.ini) into a directory.

#include <iostream>

#include <CLI11.hpp>

#include "ideagen/fixture.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Write a synthetic toy study"};
  ideagen::fixture::ToyStudyOptions o;
  std::string dir;
  app.add_option("dir", dir, "Output directory")->required();
  app.add_option("--domains", o.source_domains, "Source domains")->delimiter(',');
  app.add_option("--target", o.target_domain, "Target domain");
  app.add_option("--titles", o.titles_per_domain, "Titles per domain");
  app.add_option("--steps", o.finetune_steps, "Fine-tuning steps");
  app.add_option("--samples", o.n_samples, "Samples per domain");
  app.add_option("--seed", o.seed, "Seed");
  CLI11_PARSE(app, argc, argv);
  try {
    const auto files = ideagen::fixture::write_toy_study(dir, o);
    std::cout << files.config.string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
