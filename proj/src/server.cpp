// Copyright 2026 The benchkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "benchkit/server.hpp"

#include <filesystem>
#include <random>
#include <regex>
#include <set>

#include "benchkit/error.hpp"
#include "benchkit/report.hpp"
#include "benchkit/util.hpp"
#include "httplib.h"

namespace benchkit {
namespace {

namespace fs = std::filesystem;

/// Request-level failure with an HTTP status and stable code.
class ApiError : public Error {
 public:
  ApiError(int status, std::string code, const std::string& message)
      : Error(message), status_(status), code_(std::move(code)) {}
  int status() const { return status_; }
  const std::string& code() const { return code_; }

 private:
  int status_;
  std::string code_;
};

ApiResponse JsonResponse(const Json& body, int status = 200) {
  return ApiResponse{status, "application/json", body.dump()};
}

ApiResponse ErrorResponse(int status, const std::string& code, const std::string& message) {
  return JsonResponse(Json{{"error", {{"code", code}, {"message", message}}}}, status);
}

int StatusFor(const std::string& code) {
  if (code == "DUPLICATE_VOTE" || code == "TASK_CLOSED" || code == "NO_OPEN_TASKS") return 409;
  if (code == "UNKNOWN_TASK" || code == "UNKNOWN_ID") return 404;
  if (code == "BAD_REQUEST") return 400;
  return 500;
}

/// Local file path for a uri, if it names one.
std::optional<fs::path> LocalPath(const std::string& uri) {
  std::string p = uri;
  if (p.rfind("file://", 0) == 0) p = p.substr(7);
  else if (p.find("://") != std::string::npos || p.rfind("mock:", 0) == 0) return std::nullopt;
  std::error_code ec;
  if (p.empty() || !fs::is_regular_file(p, ec)) return std::nullopt;
  return fs::path(p);
}

std::string ContentTypeFor(const fs::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".webp") return "image/webp";
  return "application/octet-stream";
}

template <typename T, typename Load>
std::vector<T> LoadIfPresent(const fs::path& p, Load load) {
  std::error_code ec;
  if (!fs::exists(p, ec)) return {};
  return load(p.string());
}

Json ParseBody(const std::string& body) {
  Json j = Json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ApiError(400, "BAD_REQUEST", "request body must be a JSON object");
  }
  return j;
}

std::string RequireString(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string() || it->get<std::string>().empty()) {
    throw ApiError(400, "BAD_REQUEST", std::string("missing string field '") + key + "'");
  }
  return it->get<std::string>();
}

}  // namespace

std::string ErrorCode(const std::exception& e) {
  if (const auto* a = dynamic_cast<const ApiError*>(&e)) return a->code();
  if (dynamic_cast<const DuplicateVoteError*>(&e)) return "DUPLICATE_VOTE";
  if (dynamic_cast<const UnknownTaskError*>(&e)) return "UNKNOWN_TASK";
  if (dynamic_cast<const TaskClosedError*>(&e)) return "TASK_CLOSED";
  if (dynamic_cast<const NoOpenTasksError*>(&e)) return "NO_OPEN_TASKS";
  if (dynamic_cast<const UnknownIdError*>(&e)) return "UNKNOWN_ID";
  if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const Json::exception*>(&e)) {
    return "BAD_REQUEST";
  }
  return "INTERNAL";
}

void ServerConfig::ApplyEnvironment() {
  auto env = [](const char* name) -> std::optional<std::string> {
    const char* v = std::getenv(name);
    return v != nullptr && *v != '\0' ? std::optional<std::string>(v) : std::nullopt;
  };
  try {
    if (auto v = env("BENCHKIT_BIND")) bind_address = *v;
    if (auto v = env("BENCHKIT_PORT")) port = std::stoi(*v);
    if (auto v = env("BENCHKIT_DATA_DIR")) data_dir = *v;
    if (auto v = env("BENCHKIT_SESSION_TTL_S")) session_ttl_s = std::stoll(*v);
  } catch (const std::logic_error&) {
    throw ConfigError("invalid numeric value in server environment");
  }
  if (auto v = env("BENCHKIT_RATER_TOKEN")) rater_token = *v;
  if (auto v = env("BENCHKIT_ADMIN_TOKEN")) admin_token = *v;
}

// ---------------------------------------------------------------------------

std::string ServerSnapshot::ContentId(const std::string& uri) {
  if (auto p = LocalPath(uri)) return Sha256File(p->string()).substr(0, 32);
  return Sha256Hex("uri:" + uri).substr(0, 32);
}

ServerSnapshot ServerSnapshot::Build(std::optional<Catalog> catalog, std::vector<TryOnPair> pairs,
                                     std::vector<GenerationResult> results,
                                     std::vector<SampleEvaluation> evaluations) {
  ServerSnapshot s;
  s.catalog = std::move(catalog);
  s.pairs = std::move(pairs);
  s.results = std::move(results);
  s.evaluations = std::move(evaluations);
  std::map<std::string, std::vector<SampleEvaluation>> by_system;
  for (const auto& e : s.evaluations) by_system[e.system_id].push_back(e);
  for (const auto& [system, evals] : by_system) {
    for (Split split : {Split::kAll, Split::kSingle, Split::kMulti}) {
      auto summary = SummarizeEvaluations(system, evals, split);
      if (summary.n_pairs > 0) s.summaries.push_back(std::move(summary));
    }
  }
  auto add = [&](const std::string& uri) {
    if (!uri.empty()) s.images.emplace(ContentId(uri), uri);
  };
  if (s.catalog) {
    for (const auto& m : s.catalog->models()) add(m.image_uri);
    for (const auto& g : s.catalog->garments()) add(g.image_uri);
  }
  for (const auto& r : s.results) add(r.image_uri);
  return s;
}

ServerSnapshot ServerSnapshot::Load(const std::string& data_dir) {
  const fs::path dir(data_dir);
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw ConfigError("data dir " + data_dir + " is not a directory");
  std::optional<Catalog> catalog;
  if (fs::exists(dir / "catalog.jsonl", ec)) {
    TagTaxonomy taxonomy = DefaultTaxonomy();
    if (fs::exists(dir / "taxonomy.json", ec)) taxonomy = LoadTaxonomy((dir / "taxonomy.json").string());
    catalog = LoadCatalog({(dir / "catalog.jsonl").string()}, taxonomy);
  }
  return Build(std::move(catalog), LoadIfPresent<TryOnPair>(dir / "pairs.jsonl", LoadPairs),
               LoadIfPresent<GenerationResult>(dir / "generations.jsonl", LoadGenerationResults),
               LoadIfPresent<SampleEvaluation>(dir / "evaluations.jsonl", LoadEvaluations));
}

// ---------------------------------------------------------------------------

ApiService::ApiService(ServerConfig config)
    : ApiService(config, ServerSnapshot::Load(config.data_dir), nullptr) {}

ApiService::ApiService(ServerConfig config, ServerSnapshot snapshot,
                       std::shared_ptr<GsbStore> study)
    : config_(std::move(config)),
      snapshot_(std::make_shared<const ServerSnapshot>(std::move(snapshot))),
      study_(std::move(study)) {
  if (config_.session_ttl_s <= 0) throw ConfigError("session TTL must be positive");
  if (!study_) {
    const fs::path dir(config_.data_dir);
    auto tasks = LoadIfPresent<GsbTask>(dir / "gsb_tasks.jsonl", LoadGsbTasks);
    study_ = std::make_shared<GsbStore>(
        std::move(tasks), std::make_shared<Journal>((dir / "gsb_votes.jsonl").string()),
        config_.votes_per_task);
  }
  for (const auto& t : study_->Tasks()) {
    for (const auto* uri : {&t.person_uri, &t.result_a_uri, &t.result_b_uri}) {
      if (!uri->empty()) task_images_.emplace(ServerSnapshot::ContentId(*uri), *uri);
    }
    for (const auto& g : t.garment_uris) task_images_.emplace(ServerSnapshot::ContentId(g), g);
  }
}

std::shared_ptr<const ServerSnapshot> ApiService::snapshot() const {
  std::lock_guard lock(snapshot_mu_);
  return snapshot_;
}

void ApiService::Reload() {
  auto fresh = std::make_shared<const ServerSnapshot>(ServerSnapshot::Load(config_.data_dir));
  std::lock_guard lock(snapshot_mu_);
  snapshot_ = std::move(fresh);
}

std::int64_t ApiService::Now() const {
  if (config_.now_ms) return config_.now_ms();
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::string ApiService::ImageRef(const std::string& uri) const {
  return "/api/images/" + ServerSnapshot::ContentId(uri);
}

ApiResponse ApiService::Handle(const ApiRequest& r) {
  static const std::regex kPair(R"(^/api/pairs/([^/]+)$)");
  static const std::regex kNext(R"(^/api/gsb/sessions/([^/]+)/next$)");
  static const std::regex kImage(R"(^/api/images/([0-9a-f]+)$)");
  std::smatch m;
  try {
    const bool rater_route = r.path.rfind("/api/gsb/", 0) == 0 || r.path.rfind("/api/images/", 0) == 0;
    if (rater_route && !config_.rater_token.empty() &&
        r.authorization != "Bearer " + config_.rater_token) {
      throw ApiError(401, "UNAUTHORIZED", "missing or invalid rater token");
    }
    if (r.method == "GET") {
      if (r.path == "/api/health") return Health();
      if (r.path == "/api/leaderboard") return GetLeaderboard(r);
      if (std::regex_match(r.path, m, kPair)) return GetPair(m[1]);
      if (std::regex_match(r.path, m, kNext)) return NextTask(m[1]);
      if (std::regex_match(r.path, m, kImage)) return GetImage(m[1]);
    } else if (r.method == "POST") {
      if (r.path == "/api/gsb/sessions") return PostSession(r);
      if (r.path == "/api/gsb/votes") return PostVote(r);
      if (r.path == "/api/admin/reload") {
        if (config_.admin_token.empty() || r.authorization != "Bearer " + config_.admin_token) {
          throw ApiError(401, "UNAUTHORIZED", "admin token required");
        }
        Reload();
        return JsonResponse({{"status", "reloaded"}});
      }
    }
    return ErrorResponse(404, "NOT_FOUND", "no route for " + r.method + " " + r.path);
  } catch (const ApiError& e) {
    return ErrorResponse(e.status(), e.code(), e.what());
  } catch (const std::exception& e) {
    const auto code = ErrorCode(e);
    return ErrorResponse(StatusFor(code), code, e.what());
  }
}

ApiResponse ApiService::Health() {
  auto snap = snapshot();
  return JsonResponse({{"status", "ok"},
                       {"pairs", snap->pairs.size()},
                       {"results", snap->results.size()},
                       {"evaluations", snap->evaluations.size()},
                       {"gsb_tasks", study_->Tasks().size()}});
}

ApiResponse ApiService::GetLeaderboard(const ApiRequest& r) {
  std::string label = "single";
  if (auto it = r.query.find("split"); it != r.query.end() && !it->second.empty()) label = it->second;
  auto split = ParseEnum<Split>(label);
  if (!split) throw ApiError(400, "BAD_REQUEST", "split must be single, multi or all");
  return JsonResponse(ToJson(BuildLeaderboard(snapshot()->summaries, *split)));
}

ApiResponse ApiService::GetPair(const std::string& id) {
  auto snap = snapshot();
  for (const auto& p : snap->pairs) {
    if (p.pair_id != id) continue;
    Json results = Json::array();
    for (const auto& r : snap->results) {
      if (r.pair_id == id) results.push_back(ToJson(r));
    }
    Json evals = Json::array();
    for (const auto& e : snap->evaluations) {
      if (e.pair_id != id) continue;
      Json j = ToJson(e);
      j.erase("transcripts");
      evals.push_back(std::move(j));
    }
    return JsonResponse({{"pair", ToJson(p)}, {"results", results}, {"evaluations", evals}});
  }
  throw ApiError(404, "UNKNOWN_PAIR", "unknown pair '" + id + "'");
}

void ApiService::ExpireSessions(std::int64_t now) {
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    it = it->second.expires_ms <= now ? sessions_.erase(it) : std::next(it);
  }
}

RatingSession ApiService::CreateSession(const std::string& rater_id, const std::string& study_id) {
  if (study_id != config_.study_id) throw ApiError(404, "UNKNOWN_STUDY", "unknown study '" + study_id + "'");
  std::lock_guard lock(session_mu_);
  const auto now = Now();
  ExpireSessions(now);
  std::set<std::string> held;
  for (const auto& [id, s] : sessions_) {
    if (s.rater_id != rater_id) continue;
    for (std::size_t i = s.next; i < s.queue.size(); ++i) held.insert(s.queue[i]);
  }
  RatingSession s;
  for (const auto& t : study_->Tasks()) {
    if (t.status == TaskStatus::kOpen && !held.contains(t.task_id) &&
        !study_->HasVoted(t.task_id, rater_id)) {
      s.queue.push_back(t.task_id);
    }
  }
  if (s.queue.empty()) throw NoOpenTasksError("no open tasks for rater " + rater_id);
  const std::uint64_t n = ++session_counter_;
  Rng rng(config_.seed ^ (n * 0x9E3779B97F4A7C15ULL));
  Shuffle(rng, s.queue);
  std::random_device rd;
  s.session_id = Sha256Hex(std::to_string(rd()) + ':' + std::to_string(rd()) + ':' +
                           std::to_string(n) + ':' + rater_id)
                     .substr(0, 32);
  s.rater_id = rater_id;
  s.study_id = study_id;
  s.created_ms = now;
  s.expires_ms = now + config_.session_ttl_s * 1000;
  sessions_[s.session_id] = s;
  return s;
}

ApiResponse ApiService::PostSession(const ApiRequest& r) {
  const Json body = ParseBody(r.body);
  const auto rater = RequireString(body, "rater_id");
  const auto s = CreateSession(rater, body.value("study_id", config_.study_id));
  return JsonResponse({{"session_id", s.session_id},
                       {"progress", {{"done", s.done}, {"total", s.total()}}},
                       {"expires_ms", s.expires_ms}},
                      201);
}

ApiResponse ApiService::NextTask(const std::string& session_id) {
  std::lock_guard lock(session_mu_);
  const auto now = Now();
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw ApiError(404, "UNKNOWN_SESSION", "unknown session");
  RatingSession& s = it->second;
  if (s.expires_ms <= now) {
    sessions_.erase(it);
    throw ApiError(410, "SESSION_EXPIRED", "session expired");
  }
  s.expires_ms = now + config_.session_ttl_s * 1000;
  while (s.next < s.queue.size() &&
         (study_->Status(s.queue[s.next]) == TaskStatus::kDone ||
          study_->HasVoted(s.queue[s.next], s.rater_id))) {
    ++s.next;
  }
  Json body{{"session_id", s.session_id}, {"progress", {{"done", s.done}, {"total", s.total()}}}};
  if (s.next >= s.queue.size()) {
    body["task"] = nullptr;
    body["complete"] = true;
  } else {
    body["task"] = RaterPayload(*study_->Find(s.queue[s.next]),
                                [this](const std::string& uri) { return ImageRef(uri); });
    body["complete"] = false;
  }
  return JsonResponse(body);
}

ApiResponse ApiService::PostVote(const ApiRequest& r) {
  const Json body = ParseBody(r.body);
  GsbVote vote;
  vote.task_id = RequireString(body, "task_id");
  const auto choice = ParseEnum<GsbChoice>(RequireString(body, "choice"));
  if (!choice) throw ApiError(400, "BAD_REQUEST", "choice must be left_better, same or right_better");
  vote.choice = *choice;
  vote.timestamp_ms = Now();

  std::lock_guard lock(session_mu_);
  RatingSession* session = nullptr;
  if (body.contains("session_id")) {
    auto it = sessions_.find(RequireString(body, "session_id"));
    if (it == sessions_.end()) throw ApiError(404, "UNKNOWN_SESSION", "unknown session");
    if (it->second.expires_ms <= vote.timestamp_ms) {
      sessions_.erase(it);
      throw ApiError(410, "SESSION_EXPIRED", "session expired");
    }
    session = &it->second;
    vote.rater_id = session->rater_id;
  } else {
    vote.rater_id = RequireString(body, "rater_id");
  }
  study_->RecordVote(vote);
  Json out{{"status", "recorded"}, {"task_id", vote.task_id}};
  if (session != nullptr) {
    ++session->done;
    if (session->next < session->queue.size() && session->queue[session->next] == vote.task_id) {
      ++session->next;
    }
    session->expires_ms = vote.timestamp_ms + config_.session_ttl_s * 1000;
    out["progress"] = {{"done", session->done}, {"total", session->total()}};
  }
  return JsonResponse(out, 201);
}

ApiResponse ApiService::GetImage(const std::string& content_id) {
  auto snap = snapshot();
  std::string uri;
  if (auto it = snap->images.find(content_id); it != snap->images.end()) uri = it->second;
  else if (auto jt = task_images_.find(content_id); jt != task_images_.end()) uri = jt->second;
  else throw ApiError(404, "UNKNOWN_IMAGE", "unknown image");
  auto path = LocalPath(uri);
  if (!path) throw ApiError(404, "IMAGE_UNAVAILABLE", "image is not stored locally");
  return ApiResponse{200, ContentTypeFor(*path), ReadFile(path->string())};
}

// ---------------------------------------------------------------------------

struct BenchServer::Impl {
  std::shared_ptr<ApiService> service;
  httplib::Server server;
};

BenchServer::BenchServer(std::shared_ptr<ApiService> service) : impl_(std::make_unique<Impl>()) {
  impl_->service = std::move(service);
  auto handler = [svc = impl_->service](const httplib::Request& req, httplib::Response& res) {
    ApiRequest r{req.method, req.path, {}, req.body, req.get_header_value("Authorization")};
    for (const auto& [k, v] : req.params) r.query[k] = v;
    const auto out = svc->Handle(r);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  impl_->server.Get(".*", handler);
  impl_->server.Post(".*", handler);
}

BenchServer::~BenchServer() { Stop(); }

int BenchServer::Bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw ConfigError("cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw ConfigError("cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void BenchServer::Listen() { impl_->server.listen_after_bind(); }

void BenchServer::Stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace benchkit
