#include "ideagen/ideation.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>
#include <unordered_set>

#include <json.hpp>

#include "ideagen/errors.hpp"
#include "ideagen/io.hpp"
#include "ideagen/text.hpp"

namespace ideagen::ideation {

namespace {

bool is_trailing_punct(char c) {
  return c == '.' || c == '!' || c == '?' || c == ',' || c == ';' || c == ':';
}

}  // namespace

std::string normalize_idea(std::string_view text) {
  std::string out = text::join(text::split_words(text::to_lower(text)), " ");
  while (!out.empty() && (is_trailing_punct(out.back()) || out.back() == ' ')) {
    out.pop_back();
  }
  return out;
}

std::vector<IdeaRecord> generate_ideas(const lm::ModelBackend& backend,
                                       std::string_view keyword,
                                       std::string_view domain_id,
                                       std::string_view checkpoint,
                                       const lm::GenerationConfig& config,
                                       const GenerateOptions& options) {
  config.validate();
  const auto total = static_cast<std::size_t>(config.n_samples);
  std::vector<IdeaRecord> records(total);

  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  if (threads == 0 || !backend.concurrent_safe()) threads = 1;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::atomic<bool> failed{false};
  std::mutex mutex;
  std::exception_ptr error;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= total || failed.load()) return;
      try {
        const auto gen = lm::generate_text(backend, keyword, config, i);
        IdeaRecord& r = records[i];
        r.text = text::sanitize_utf8(gen.text);
        r.normalized = normalize_idea(r.text);
        r.target_keyword = std::string(keyword);
        r.domain_id = std::string(domain_id);
        r.checkpoint = std::string(checkpoint);
        r.sample_index = i;
        r.truncated = gen.truncated;
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!error) error = std::current_exception();
        failed = true;
        return;
      }
      const auto n = done.fetch_add(1) + 1;
      if (options.on_progress) {
        std::lock_guard lock(mutex);
        options.on_progress(n, total);
      }
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  if (error) {
    std::string what = "unknown error";
    try {
      std::rethrow_exception(error);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    throw BackendError("generation failed after " + std::to_string(done.load()) + " of " +
                       std::to_string(total) + " samples: " + what);
  }
  return records;
}

DedupResult dedup_stats(std::span<const IdeaRecord> ideas) {
  if (ideas.empty()) throw DataError("dedup_stats needs at least one idea");
  DedupResult result;
  std::unordered_set<std::string> seen;
  for (const auto& idea : ideas) {
    if (seen.insert(idea.normalized).second) result.unique.push_back(idea);
  }
  result.stats.n_generated = ideas.size();
  result.stats.n_unique = result.unique.size();
  result.stats.pct_unique = 100.0 * static_cast<double>(result.stats.n_unique) /
                            static_cast<double>(result.stats.n_generated);
  return result;
}

std::string format_pct(double pct) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f%%", pct);
  return buf;
}

void save_ideas(const std::filesystem::path& path, std::span<const IdeaRecord> ideas) {
  std::string out;
  for (const auto& r : ideas) {
    nlohmann::ordered_json j;
    j["sample_index"] = r.sample_index;
    j["text"] = r.text;
    j["normalized"] = r.normalized;
    j["truncated"] = r.truncated;
    j["empty"] = r.empty();
    j["target_keyword"] = r.target_keyword;
    j["domain_id"] = r.domain_id;
    j["checkpoint"] = r.checkpoint;
    out += j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
    out += '\n';
  }
  io::write_file(path, out);
}

std::vector<IdeaRecord> load_ideas(const std::filesystem::path& path) {
  std::vector<IdeaRecord> out;
  const auto all_lines = io::lines(io::read_file(path));
  for (std::size_t i = 0; i < all_lines.size(); ++i) {
    if (all_lines[i].empty()) continue;
    try {
      const auto j = nlohmann::json::parse(all_lines[i]);
      IdeaRecord r;
      r.sample_index = j.at("sample_index").get<std::uint64_t>();
      r.text = j.at("text").get<std::string>();
      r.normalized = j.at("normalized").get<std::string>();
      r.truncated = j.at("truncated").get<bool>();
      r.target_keyword = j.at("target_keyword").get<std::string>();
      r.domain_id = j.at("domain_id").get<std::string>();
      r.checkpoint = j.at("checkpoint").get<std::string>();
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ": line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace ideagen::ideation
