#include "ideagen/service.hpp"

#include <cstdlib>
#include <set>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <httplib.h>

#include "ideagen/errors.hpp"
#include "ideagen/text.hpp"
#include "ideagen/toy_model.hpp"

namespace ideagen::service {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

Response error(int status, const std::string& message) {
  return {status, ordered_json{{"error", message}}};
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

std::string to_string(JobStatus s) {
  switch (s) {
    case JobStatus::kQueued:
      return "queued";
    case JobStatus::kRunning:
      return "running";
    case JobStatus::kDone:
      return "done";
    case JobStatus::kFailed:
      break;
  }
  return "failed";
}

ServiceConfig load_service_config(const std::filesystem::path& config_file) {
  ServiceConfig c;
  if (config_file.empty()) return c;
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(config_file.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  const auto base = config_file.parent_path();
  if (auto s = tree.get_child_optional("service")) {
    for (const auto& [key, node] : *s) {
      const std::string v(text::trim(node.data()));
      if (key == "host") {
        c.host = v;
      } else if (key == "port") {
        c.port = static_cast<int>(text::parse_int(v));
      } else if (key == "runs_dir") {
        c.runs_dir = resolve(base, v);
      } else if (key == "proximity") {
        c.proximity = resolve(base, v);
      } else if (key == "domain_catalog") {
        c.domain_catalog = resolve(base, v);
      } else if (key == "term_vectors") {
        c.term_vectors = resolve(base, v);
      } else if (key == "max_new_tokens") {
        c.max_new_tokens = static_cast<int>(text::parse_int(v));
      } else {
        throw UsageError("unknown config key [service] " + key);
      }
    }
  }
  return c;
}

void apply_environment(ServiceConfig& config) {
  if (const char* port = std::getenv("IDEATION_PORT"); port && *port) {
    try {
      config.port = static_cast<int>(text::parse_int(port));
    } catch (const DataError&) {
      throw UsageError(std::string("IDEATION_PORT is not a number: ") + port);
    }
  }
  if (const char* dir = std::getenv("IDEATION_RUNS_DIR"); dir && *dir) {
    config.runs_dir = dir;
  }
}

struct Session::Job {
  std::string id;
  GenerateRequest request;
  JobStatus status = JobStatus::kQueued;
  double progress = 0.0;
  std::string error;
  std::vector<JobStatus> transitions{JobStatus::kQueued};
  ordered_json ideas = ordered_json::array();
  ideation::IdeaSetStats stats;
};

Session::Session(ServiceConfig config) : config_(std::move(config)) {
  if (!config_.proximity.empty()) table_ = corpus::load_proximity(config_.proximity);
  if (!config_.domain_catalog.empty()) catalog_ = corpus::load_domains(config_.domain_catalog);
  if (!config_.term_vectors.empty()) store_ = novelty::load_term_vectors(config_.term_vectors);
  worker_ = std::thread([this] { worker_loop(); });
}

Session::~Session() {
  {
    std::lock_guard lock(jobs_mutex_);
    stopping_ = true;
  }
  jobs_cv_.notify_all();
  if (worker_.joinable()) worker_.join();
}

bool Session::has_checkpoint(const std::string& domain_id) const {
  try {
    lm::latest_checkpoint(config_.runs_dir / "checkpoints", domain_id);
    return true;
  } catch (const DataError&) {
    return false;
  }
}

std::size_t Session::loaded_checkpoints() const {
  std::lock_guard lock(models_mutex_);
  return models_.size();
}

std::shared_ptr<const lm::ModelBackend> Session::checkpoint_model(const std::string& domain_id) {
  std::lock_guard lock(models_mutex_);
  if (auto it = models_.find(domain_id); it != models_.end()) return it->second;
  const auto ref = lm::latest_checkpoint(config_.runs_dir / "checkpoints", domain_id);
  auto model = std::make_shared<lm::ToyCharModel>();
  model->load(ref.model_file());
  models_.emplace(domain_id, model);
  return model;
}

Response Session::health() const { return {200, ordered_json{{"status", "ok"}}}; }

Response Session::domains(const std::string& target) const {
  if (target.empty()) return error(400, "missing query parameter 'target'");
  if (!table_) return error(503, "no proximity table loaded");
  if (!table_->has_domain(target)) return error(404, "unknown domain '" + target + "'");
  ordered_json body = ordered_json::array();
  for (const auto& rd : corpus::rank_domains(*table_, target, catalog_)) {
    body.push_back({{"domain_id", rd.domain.domain_id},
                    {"display_name", rd.domain.display_name},
                    {"rank", rd.rank},
                    {"proximity", rd.proximity},
                    {"has_checkpoint", has_checkpoint(rd.domain.domain_id)}});
  }
  return {200, body};
}

Response Session::submit(const std::string& body) {
  json req;
  try {
    req = json::parse(body);
  } catch (const json::parse_error&) {
    return error(400, "request body is not valid JSON");
  }
  if (!req.is_object()) return error(400, "request body must be an object");

  GenerateRequest r;
  r.config.max_new_tokens = config_.max_new_tokens;
  auto get_string = [&](const char* key, std::string& out) -> std::optional<Response> {
    if (!req.contains(key) || !req[key].is_string() || text::trim(req[key].get<std::string>()).empty()) {
      return error(400, std::string("'") + key + "' must be a non-empty string");
    }
    out = std::string(text::trim(req[key].get<std::string>()));
    return std::nullopt;
  };
  if (auto e = get_string("target_keyword", r.target_keyword)) return *e;
  if (auto e = get_string("domain_id", r.domain_id)) return *e;

  if (!req.contains("n_samples") || !req["n_samples"].is_number_integer() ||
      req["n_samples"].get<long long>() < 1) {
    return error(400, "'n_samples' must be an integer >= 1");
  }
  r.config.n_samples = req["n_samples"].get<int>();
  if (!req.contains("seed") || !req["seed"].is_number_unsigned()) {
    return error(400, "'seed' must be a non-negative integer");
  }
  r.config.seed = req["seed"].get<std::uint64_t>();
  if (req.contains("temperature")) {
    if (!req["temperature"].is_number() || !(req["temperature"].get<double>() > 0.0)) {
      return error(400, "'temperature' must be a number > 0");
    }
    r.config.temperature = req["temperature"].get<double>();
  }
  if (req.contains("top_k")) {
    if (!req["top_k"].is_number_integer() || req["top_k"].get<long long>() < 1) {
      return error(400, "'top_k' must be an integer >= 1");
    }
    r.config.top_k = req["top_k"].get<int>();
  }
  if (req.contains("max_new_tokens")) {
    if (!req["max_new_tokens"].is_number_integer() || req["max_new_tokens"].get<long long>() < 1) {
      return error(400, "'max_new_tokens' must be an integer >= 1");
    }
    r.config.max_new_tokens = req["max_new_tokens"].get<int>();
  }
  if (!has_checkpoint(r.domain_id)) return error(409, "domain not fine-tuned");

  auto job = std::make_shared<Job>();
  job->request = std::move(r);
  {
    std::lock_guard lock(jobs_mutex_);
    job->id = "job-" + std::to_string(next_job_++);
    jobs_.emplace(job->id, job);
    queue_.push_back(job);
  }
  jobs_cv_.notify_all();
  return {202, ordered_json{{"job_id", job->id}}};
}

std::shared_ptr<Session::Job> Session::find(const std::string& job_id) const {
  std::lock_guard lock(jobs_mutex_);
  auto it = jobs_.find(job_id);
  return it == jobs_.end() ? nullptr : it->second;
}

Response Session::job_status(const std::string& job_id) const {
  auto job = find(job_id);
  if (!job) return error(404, "unknown job '" + job_id + "'");
  std::lock_guard lock(jobs_mutex_);
  ordered_json body{{"job_id", job->id},
                    {"status", to_string(job->status)},
                    {"progress", job->progress}};
  if (job->status == JobStatus::kFailed) body["error"] = job->error;
  if (job->status == JobStatus::kDone) {
    body["stats"] = {{"n_generated", job->stats.n_generated},
                     {"n_unique", job->stats.n_unique},
                     {"pct_unique", job->stats.pct_unique}};
  }
  return {200, body};
}

Response Session::job_ideas(const std::string& job_id) const {
  auto job = find(job_id);
  if (!job) return error(404, "unknown job '" + job_id + "'");
  std::lock_guard lock(jobs_mutex_);
  if (job->status == JobStatus::kFailed) return error(409, "job failed: " + job->error);
  if (job->status != JobStatus::kDone) return error(409, "job not finished");
  return {200, job->ideas};
}

std::vector<JobStatus> Session::transitions(const std::string& job_id) const {
  auto job = find(job_id);
  if (!job) return {};
  std::lock_guard lock(jobs_mutex_);
  return job->transitions;
}

bool Session::wait(const std::string& job_id, std::chrono::milliseconds timeout) const {
  auto job = find(job_id);
  if (!job) return false;
  std::unique_lock lock(jobs_mutex_);
  return jobs_cv_.wait_for(lock, timeout, [&] {
    return job->status == JobStatus::kDone || job->status == JobStatus::kFailed;
  });
}

void Session::set_status(Job& job, JobStatus s) {
  {
    std::lock_guard lock(jobs_mutex_);
    job.status = s;
    job.transitions.push_back(s);
    if (s == JobStatus::kDone) job.progress = 1.0;
  }
  jobs_cv_.notify_all();
}

void Session::run_job(Job& job) {
  set_status(job, JobStatus::kRunning);
  try {
    const auto model = checkpoint_model(job.request.domain_id);
    const auto ref = lm::latest_checkpoint(config_.runs_dir / "checkpoints", job.request.domain_id);
    ideation::GenerateOptions opts;
    opts.on_progress = [&](std::size_t done, std::size_t total) {
      std::lock_guard lock(jobs_mutex_);
      job.progress = std::max(job.progress, static_cast<double>(done) / static_cast<double>(total));
    };
    const auto ideas = ideation::generate_ideas(
        *model, job.request.target_keyword, job.request.domain_id,
        "checkpoints/" + ref.domain_id + "/" + std::to_string(ref.step), job.request.config, opts);
    const auto dedup = ideation::dedup_stats(ideas);

    std::set<std::uint64_t> unique_indices;
    for (const auto& u : dedup.unique) unique_indices.insert(u.sample_index);

    ordered_json out = ordered_json::array();
    for (const auto& idea : ideas) {
      ordered_json item{{"sample_index", idea.sample_index},
                        {"text", idea.text},
                        {"is_unique", unique_indices.contains(idea.sample_index)},
                        {"truncated", idea.truncated}};
      item["min_score"] = nullptr;
      item["argmin_pair"] = nullptr;
      item["token_count"] = text::split_words(idea.text).size();
      if (store_) {
        const auto outcome = novelty::idea_novelty(idea.text, *store_, idea.sample_index);
        if (const auto* r = std::get_if<novelty::NoveltyReport>(&outcome)) {
          item["min_score"] = r->min_score;
          item["argmin_pair"] = {r->argmin_pair.first, r->argmin_pair.second};
          item["token_count"] = r->token_count;
        } else {
          item["token_count"] = std::get<novelty::Unscorable>(outcome).token_count;
        }
      }
      out.push_back(std::move(item));
    }
    {
      std::lock_guard lock(jobs_mutex_);
      job.ideas = std::move(out);
      job.stats = dedup.stats;
    }
    set_status(job, JobStatus::kDone);
  } catch (const std::exception& e) {
    {
      std::lock_guard lock(jobs_mutex_);
      job.error = e.what();
    }
    set_status(job, JobStatus::kFailed);
  }
}

void Session::worker_loop() {
  for (;;) {
    std::shared_ptr<Job> job;
    {
      std::unique_lock lock(jobs_mutex_);
      jobs_cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (stopping_) return;
      job = queue_.front();
      queue_.pop_front();
    }
    run_job(*job);
  }
}

void install_routes(httplib::Server& server, Session& session) {
  auto reply = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body.dump(-1, ' ', false, json::error_handler_t::replace),
                    "application/json; charset=utf-8");
  };
  server.Get("/healthz", [&, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, session.health());
  });
  server.Get("/domains", [&, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, session.domains(req.has_param("target") ? req.get_param_value("target") : ""));
  });
  server.Post("/generate", [&, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, session.submit(req.body));
  });
  server.Get(R"(/jobs/([^/]+))", [&, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, session.job_status(req.matches[1]));
  });
  server.Get(R"(/jobs/([^/]+)/ideas)",
             [&, reply](const httplib::Request& req, httplib::Response& res) {
               reply(res, session.job_ideas(req.matches[1]));
             });
}

bool serve(Session& session) {
  httplib::Server server;
  install_routes(server, session);
  return server.listen(session.config().host, session.config().port);
}

}  // namespace ideagen::service
