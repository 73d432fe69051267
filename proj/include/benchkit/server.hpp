// Copyright 2026 The benchkit Authors.
// SPDX-License-Identifier: Apache-2.0

// HTTP API over the catalog, pairs, results, leaderboards and the GSB rating
// workflow. Routing is done by ApiService::Handle so the API can be exercised
// without a socket; BenchServer binds it to an httplib listener.

#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "benchkit/catalog.hpp"
#include "benchkit/generation.hpp"
#include "benchkit/gsb.hpp"
#include "benchkit/judge.hpp"
#include "benchkit/pairing.hpp"

namespace benchkit {

struct ServerConfig {
  std::string bind_address = "127.0.0.1";
  int port = 8080;
  std::string data_dir = ".";
  std::int64_t session_ttl_s = 1800;
  std::uint64_t seed = 0;
  std::string study_id = "default";
  std::size_t votes_per_task = 1;
  std::string rater_token;  // empty: rater routes are open
  std::string admin_token;  // empty: admin routes are disabled
  std::function<std::int64_t()> now_ms;  // injectable clock; wall clock when empty

  /// Applies BENCHKIT_BIND, BENCHKIT_PORT, BENCHKIT_DATA_DIR, BENCHKIT_SESSION_TTL_S,
  /// BENCHKIT_RATER_TOKEN and BENCHKIT_ADMIN_TOKEN when set.
  void ApplyEnvironment();
};

/// Immutable read model served by GET routes. Files are read from the data
/// directory: catalog.jsonl, pairs.jsonl, generations.jsonl and
/// evaluations.jsonl; absent files give empty collections.
struct ServerSnapshot {
  std::optional<Catalog> catalog;
  std::vector<TryOnPair> pairs;
  std::vector<GenerationResult> results;
  std::vector<SampleEvaluation> evaluations;
  std::vector<BenchmarkSummary> summaries;  // per system, all three splits
  std::map<std::string, std::string> images;  // content id -> uri

  static ServerSnapshot Load(const std::string& data_dir);
  static ServerSnapshot Build(std::optional<Catalog> catalog, std::vector<TryOnPair> pairs,
                              std::vector<GenerationResult> results,
                              std::vector<SampleEvaluation> evaluations);
  /// Opaque id for an image uri: the SHA-256 of the file bytes for readable
  /// local files, otherwise of the uri itself.
  static std::string ContentId(const std::string& uri);
};

struct RatingSession {
  std::string session_id;
  std::string rater_id;
  std::string study_id;
  std::vector<std::string> queue;  // task ids, shuffled
  std::size_t next = 0;            // queue position
  std::size_t done = 0;
  std::int64_t created_ms = 0;
  std::int64_t expires_ms = 0;
  std::size_t total() const { return queue.size(); }
};

struct ApiRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
  std::string authorization;  // raw Authorization header
};

struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

class ApiService {
 public:
  /// Loads the snapshot and the study (gsb_tasks.jsonl + gsb_votes.jsonl)
  /// from config.data_dir.
  explicit ApiService(ServerConfig config);
  ApiService(ServerConfig config, ServerSnapshot snapshot, std::shared_ptr<GsbStore> study);

  ApiResponse Handle(const ApiRequest& request);

  RatingSession CreateSession(const std::string& rater_id, const std::string& study_id);
  /// Rebuilds the read snapshot from disk.
  void Reload();

  std::shared_ptr<GsbStore> study() const { return study_; }
  std::shared_ptr<const ServerSnapshot> snapshot() const;

 private:
  std::int64_t Now() const;
  ApiResponse Health();
  ApiResponse GetLeaderboard(const ApiRequest& r);
  ApiResponse GetPair(const std::string& id);
  ApiResponse PostSession(const ApiRequest& r);
  ApiResponse NextTask(const std::string& session_id);
  ApiResponse PostVote(const ApiRequest& r);
  ApiResponse GetImage(const std::string& content_id);
  void ExpireSessions(std::int64_t now);
  std::string ImageRef(const std::string& uri) const;

  ServerConfig config_;
  mutable std::mutex snapshot_mu_;
  std::shared_ptr<const ServerSnapshot> snapshot_;
  std::map<std::string, std::string> task_images_;  // content id -> uri for study images
  std::shared_ptr<GsbStore> study_;
  std::mutex session_mu_;
  std::map<std::string, RatingSession> sessions_;
  std::uint64_t session_counter_ = 0;
};

/// Stable error codes used in {"error": {"code", "message"}} bodies.
std::string ErrorCode(const std::exception& e);

class BenchServer {
 public:
  explicit BenchServer(std::shared_ptr<ApiService> service);
  ~BenchServer();

  /// Binds host:port (port 0 picks a free one) and returns the bound port.
  int Bind(const std::string& host, int port);
  /// Serves until Stop(); call after Bind.
  void Listen();
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace benchkit
