// Copyright 2026 The benchkit Authors.
// SPDX-License-Identifier: Apache-2.0

// Contracts for every external model the harness talks to (media analysis,
// tagging VLM, face swapper, swap verifier, try-on generators, judge VLM),
// plus two families of implementations: HTTP clients speaking a JSON
// request/response protocol, and scripted mocks replaying canned responses
// from a fixture file.

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "benchkit/jsonl.hpp"

namespace benchkit {

struct MediaInfo {
  int width = 0;
  int height = 0;
  int subject_count = 1;
  std::uint64_t phash = 0;
  bool nsfw = false;
};

class MediaAnalyzer {
 public:
  virtual ~MediaAnalyzer() = default;
  /// Throws AdapterError when the analyzer cannot be reached.
  virtual MediaInfo Analyze(const std::string& entry_id, const std::string& image_uri) = 0;
};

struct TaggingRequest {
  std::string entry_id;
  std::string image_uri;
  std::string kind;        // "model" | "garment"
  Json dimensions;         // [{name, values, open}]
  Json current_tags;       // existing labels, for context only
  int attempt = 0;
  std::string repair_hint;  // parse error from the previous attempt, if any
};

class TaggingClient {
 public:
  virtual ~TaggingClient() = default;
  /// Raw structured output text from the tagging VLM.
  virtual std::string Propose(const TaggingRequest& request) = 0;
};

struct SwapRequest {
  std::string entry_id;
  std::string image_uri;
  std::string surrogate_id;
  std::string surrogate_license_ref;
  Json guidance = Json::object();  // opaque to the harness
  int attempt = 0;
};

class FaceSwapper {
 public:
  virtual ~FaceSwapper() = default;
  /// Returns the swapped image's URI.
  virtual std::string Swap(const SwapRequest& request) = 0;
};

struct VerifyRequest {
  std::string entry_id;
  std::string original_uri;
  std::string swapped_uri;
  int attempt = 0;
};

class SwapVerifier {
 public:
  virtual ~SwapVerifier() = default;
  virtual bool Verify(const VerifyRequest& request) = 0;
};

struct GenerationRequest {
  std::string pair_id;
  std::string prompt;
  std::string person_image;
  std::vector<std::string> garment_images;  // slot order
};

struct GenerationResponse {
  enum class Kind { kImage, kRefusal };
  Kind kind = Kind::kImage;
  std::string image_uri;    // set when the service returns a location
  std::string image_bytes;  // set when the service returns the payload
  std::string refusal_reason;
  std::optional<double> server_time_s;
};

class Generator {
 public:
  virtual ~Generator() = default;
  /// Throws AdapterError on transport failure or timeout (retryable).
  virtual GenerationResponse Generate(const GenerationRequest& request) = 0;
};

struct JudgeImage {
  std::string role;  // person | garment | result
  std::string uri;
  std::string garment_id;  // set for role == garment
  friend bool operator==(const JudgeImage&, const JudgeImage&) = default;
};

struct JudgeRequest {
  std::string stage;  // stage1 | stage2 | limb_recheck
  std::string pair_id;
  std::string prompt;
  std::vector<JudgeImage> images;
  double temperature = 0.0;
  int attempt = 0;
};

class JudgeClient {
 public:
  virtual ~JudgeClient() = default;
  /// Raw response text; parsing and schema checks happen in the judge module.
  virtual std::string Complete(const JudgeRequest& request) = 0;
};

Json ToJson(const TaggingRequest& r);
Json ToJson(const SwapRequest& r);
Json ToJson(const VerifyRequest& r);
Json ToJson(const GenerationRequest& r);
Json ToJson(const JudgeRequest& r);

// ---------------------------------------------------------------------------
// Scripted mocks

/// Canned responses keyed by request key. Fixture layout:
///   {"responses": {"<key>": [r0, r1, ...]}, "default": r}
/// The n-th request for a key gets the n-th entry; once a sequence runs out
/// its last entry repeats. Keys without a sequence get `default`.
class ScriptedResponses {
 public:
  ScriptedResponses() = default;
  explicit ScriptedResponses(Json fixture);
  static ScriptedResponses FromFile(const std::string& path);

  Json Next(const std::string& key);
  bool Has(const std::string& key) const;
  /// Number of requests served per key so far.
  std::size_t CallCount(const std::string& key) const;
  std::size_t TotalCalls() const;

 private:
  Json fixture_;
  std::unique_ptr<std::mutex> mu_ = std::make_unique<std::mutex>();
  std::map<std::string, std::size_t> served_;
};

/// Common transcript capture so tests can assert what was sent.
template <typename Request>
class Transcript {
 public:
  void Record(const Request& r) {
    std::lock_guard lock(mu_);
    requests_.push_back(r);
  }
  std::vector<Request> requests() const {
    std::lock_guard lock(mu_);
    return requests_;
  }

 private:
  mutable std::mutex mu_;
  std::vector<Request> requests_;
};

/// Response: {"width","height","subject_count","phash" (hex string),"nsfw"}
/// or {"error": "..."}; keyed by entry id.
class ScriptedMediaAnalyzer : public MediaAnalyzer {
 public:
  explicit ScriptedMediaAnalyzer(ScriptedResponses script) : script_(std::move(script)) {}
  MediaInfo Analyze(const std::string& entry_id, const std::string& image_uri) override;
  ScriptedResponses& script() { return script_; }

 private:
  ScriptedResponses script_;
};

/// Response: a structured object (returned serialised), {"raw": "<text>"}
/// returned verbatim, or {"error": "..."}; keyed by entry id.
class ScriptedTagger : public TaggingClient {
 public:
  explicit ScriptedTagger(ScriptedResponses script) : script_(std::move(script)) {}
  std::string Propose(const TaggingRequest& request) override;
  ScriptedResponses& script() { return script_; }
  Transcript<TaggingRequest> transcript;

 private:
  ScriptedResponses script_;
};

/// Response: {"swapped_uri": "..."} or {"error": "..."}; keyed by entry id.
/// A missing swapped_uri yields "<image_uri>#swap-<attempt>".
class ScriptedSwapper : public FaceSwapper {
 public:
  explicit ScriptedSwapper(ScriptedResponses script) : script_(std::move(script)) {}
  std::string Swap(const SwapRequest& request) override;
  ScriptedResponses& script() { return script_; }
  Transcript<SwapRequest> transcript;

 private:
  ScriptedResponses script_;
};

/// Response: {"pass": bool} or {"error": "..."}; keyed by entry id.
class ScriptedVerifier : public SwapVerifier {
 public:
  explicit ScriptedVerifier(ScriptedResponses script) : script_(std::move(script)) {}
  bool Verify(const VerifyRequest& request) override;
  ScriptedResponses& script() { return script_; }
  Transcript<VerifyRequest> transcript;

 private:
  ScriptedResponses script_;
};

/// Response keyed by pair id:
///   {"kind": "ok", "image_uri"?, "sleep_s"?, "sleep_s_by_ref_count"?: {"2": s},
///    "server_time_s"?}
///   {"kind": "refusal", "reason": "..."}
///   {"kind": "error", "reason": "..."}  -> AdapterError
/// Without an image_uri the result is "mock://<system>/<pair_id>.png".
class ScriptedGenerator : public Generator {
 public:
  ScriptedGenerator(std::string system_id, ScriptedResponses script)
      : system_id_(std::move(system_id)), script_(std::move(script)) {}
  GenerationResponse Generate(const GenerationRequest& request) override;
  ScriptedResponses& script() { return script_; }
  Transcript<GenerationRequest> transcript;

 private:
  std::string system_id_;
  ScriptedResponses script_;
};

/// Response keyed by "<pair_id>:<stage>": a structured object (serialised),
/// {"raw": "<text>"} verbatim, or {"error": "..."}. When no key matches,
/// "<stage>" alone is tried before `default`.
class ScriptedJudge : public JudgeClient {
 public:
  explicit ScriptedJudge(ScriptedResponses script) : script_(std::move(script)) {}
  std::string Complete(const JudgeRequest& request) override;
  ScriptedResponses& script() { return script_; }
  Transcript<JudgeRequest> transcript;

 private:
  ScriptedResponses script_;
};

// ---------------------------------------------------------------------------
// HTTP clients

struct HttpEndpoint {
  std::string url;  // scheme://host[:port]/path
  double timeout_s = 120.0;
  std::string bearer_token;
};

/// POSTs `body` as JSON and parses the JSON reply. Non-2xx statuses and
/// transport failures raise AdapterError.
Json PostJson(const HttpEndpoint& endpoint, const Json& body);

std::unique_ptr<MediaAnalyzer> MakeHttpMediaAnalyzer(HttpEndpoint endpoint);
std::unique_ptr<TaggingClient> MakeHttpTagger(HttpEndpoint endpoint);
std::unique_ptr<FaceSwapper> MakeHttpSwapper(HttpEndpoint endpoint);
std::unique_ptr<SwapVerifier> MakeHttpVerifier(HttpEndpoint endpoint);
std::unique_ptr<Generator> MakeHttpGenerator(HttpEndpoint endpoint);
std::unique_ptr<JudgeClient> MakeHttpJudge(HttpEndpoint endpoint);

/// Adapter spec strings: "mock:<fixture.json>" or an http(s) URL. When
/// `spec` is empty, BENCHKIT_<ROLE>_ENDPOINT is consulted (ROLE upper-cased,
/// e.g. JUDGE), and BENCHKIT_<ROLE>_TOKEN supplies a bearer token.
std::string ResolveAdapterSpec(const std::string& spec, const std::string& role);
HttpEndpoint EndpointFromSpec(const std::string& spec, const std::string& role);
bool IsMockSpec(const std::string& spec);
std::string MockFixturePath(const std::string& spec);

std::unique_ptr<MediaAnalyzer> MakeMediaAnalyzer(const std::string& spec);
std::unique_ptr<TaggingClient> MakeTagger(const std::string& spec);
std::unique_ptr<FaceSwapper> MakeSwapper(const std::string& spec);
std::unique_ptr<SwapVerifier> MakeVerifier(const std::string& spec);
std::unique_ptr<Generator> MakeGenerator(const std::string& system_id, const std::string& spec);
/// Also accepts "synthetic" or "synthetic:<seed>" (see SyntheticJudge).
std::unique_ptr<JudgeClient> MakeJudge(const std::string& spec);

std::string Base64Encode(std::string_view bytes);
std::string Base64Decode(std::string_view text);

}  // namespace benchkit
