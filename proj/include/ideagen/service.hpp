#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "ideagen/corpus.hpp"
#include "ideagen/ideation.hpp"
#include "ideagen/lm.hpp"
#include "ideagen/novelty.hpp"

namespace httplib {
class Server;
}

namespace ideagen::service {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path runs_dir = "runs";  // checkpoints under runs_dir/checkpoints
  std::filesystem::path proximity;          // proximity table file
  std::filesystem::path domain_catalog;     // optional display names
  std::filesystem::path term_vectors;       // optional; ideas unscored without it
  int max_new_tokens = 96;
};

// Reads the [service] section of a config file (port, host, runs_dir,
// proximity, domain_catalog, term_vectors, max_new_tokens). Relative paths
// resolve against the file's directory.
ServiceConfig load_service_config(const std::filesystem::path& config_file);
// IDEATION_PORT and IDEATION_RUNS_DIR override the file.
void apply_environment(ServiceConfig& config);

enum class JobStatus { kQueued, kRunning, kDone, kFailed };
std::string to_string(JobStatus s);

struct GenerateRequest {
  std::string target_keyword;
  std::string domain_id;
  lm::GenerationConfig config;
};

// Status plus payload. Handlers are plain functions of the session so they
// can be exercised without a socket; the HTTP layer only forwards.
struct Response {
  int status = 200;
  nlohmann::ordered_json body;
};

/// Session state for the interactive ideation workflow: proximity-ranked
/// domains, lazily loaded checkpoints (each loaded once), the term-vector
/// store, and an asynchronous job queue drained by one worker thread.
class Session {
 public:
  explicit Session(ServiceConfig config);
  ~Session();

  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  Response domains(const std::string& target) const;
  Response submit(const std::string& body);
  Response job_status(const std::string& job_id) const;
  Response job_ideas(const std::string& job_id) const;
  Response health() const;

  std::vector<JobStatus> transitions(const std::string& job_id) const;
  bool has_checkpoint(const std::string& domain_id) const;
  std::size_t loaded_checkpoints() const;

  // Blocks until the job is done or failed, or the timeout elapses.
  bool wait(const std::string& job_id, std::chrono::milliseconds timeout) const;

  const ServiceConfig& config() const { return config_; }

 private:
  struct Job;

  std::shared_ptr<const lm::ModelBackend> checkpoint_model(const std::string& domain_id);
  std::shared_ptr<Job> find(const std::string& job_id) const;
  void set_status(Job& job, JobStatus s);
  void run_job(Job& job);
  void worker_loop();

  ServiceConfig config_;
  std::optional<corpus::ProximityTable> table_;
  std::vector<corpus::Domain> catalog_;
  std::optional<novelty::TermVectorStore> store_;

  mutable std::mutex models_mutex_;
  std::map<std::string, std::shared_ptr<const lm::ModelBackend>> models_;

  mutable std::mutex jobs_mutex_;
  mutable std::condition_variable jobs_cv_;
  std::map<std::string, std::shared_ptr<Job>> jobs_;
  std::deque<std::shared_ptr<Job>> queue_;
  std::uint64_t next_job_ = 1;
  bool stopping_ = false;
  std::thread worker_;
};

// Registers GET /healthz, GET /domains, POST /generate, GET /jobs/<id> and
// GET /jobs/<id>/ideas on `server`, forwarding to `session`.
void install_routes(httplib::Server& server, Session& session);

// Runs the HTTP server until stopped. Returns false when binding fails.
bool serve(Session& session);

}  // namespace ideagen::service
