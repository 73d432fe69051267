// Copyright 2026 The benchkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "benchkit/adapters.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <thread>

#include "benchkit/error.hpp"
#include "benchkit/synthetic.hpp"
#include "benchkit/util.hpp"

namespace benchkit {

Json ToJson(const TaggingRequest& r) {
  return Json{{"entry_id", r.entry_id},       {"image_uri", r.image_uri},
              {"kind", r.kind},               {"dimensions", r.dimensions},
              {"current_tags", r.current_tags}, {"attempt", r.attempt},
              {"repair_hint", r.repair_hint}};
}

Json ToJson(const SwapRequest& r) {
  return Json{{"entry_id", r.entry_id},
              {"image_uri", r.image_uri},
              {"surrogate_id", r.surrogate_id},
              {"surrogate_license_ref", r.surrogate_license_ref},
              {"guidance", r.guidance},
              {"attempt", r.attempt}};
}

Json ToJson(const VerifyRequest& r) {
  return Json{{"entry_id", r.entry_id},
              {"original_uri", r.original_uri},
              {"swapped_uri", r.swapped_uri},
              {"attempt", r.attempt}};
}

Json ToJson(const GenerationRequest& r) {
  return Json{{"pair_id", r.pair_id},
              {"prompt", r.prompt},
              {"person_image", r.person_image},
              {"garment_images", r.garment_images}};
}

Json ToJson(const JudgeRequest& r) {
  Json images = Json::array();
  for (const auto& im : r.images) {
    Json j{{"role", im.role}, {"uri", im.uri}};
    if (!im.garment_id.empty()) j["garment_id"] = im.garment_id;
    images.push_back(std::move(j));
  }
  return Json{{"stage", r.stage},   {"pair_id", r.pair_id},         {"prompt", r.prompt},
              {"images", images},   {"temperature", r.temperature}, {"attempt", r.attempt}};
}

// ---------------------------------------------------------------------------

ScriptedResponses::ScriptedResponses(Json fixture) : fixture_(std::move(fixture)) {
  if (!fixture_.is_object()) throw ConfigError("mock fixture must be an object");
}

ScriptedResponses ScriptedResponses::FromFile(const std::string& path) {
  try {
    return ScriptedResponses(Json::parse(ReadFile(path)));
  } catch (const Json::parse_error& e) {
    throw ConfigError("malformed mock fixture '" + path + "': " + e.what());
  }
}

Json ScriptedResponses::Next(const std::string& key) {
  std::size_t index;
  {
    std::lock_guard lock(*mu_);
    index = served_[key]++;
  }
  if (auto r = fixture_.find("responses"); r != fixture_.end() && r->contains(key)) {
    const Json& seq = (*r)[key];
    if (!seq.is_array()) return seq;
    if (seq.empty()) throw ConfigError("empty response sequence for '" + key + "'");
    return seq[std::min(index, seq.size() - 1)];
  }
  if (auto d = fixture_.find("default"); d != fixture_.end()) return *d;
  throw AdapterError("mock has no response for '" + key + "'");
}

bool ScriptedResponses::Has(const std::string& key) const {
  auto r = fixture_.find("responses");
  return r != fixture_.end() && r->contains(key);
}

std::size_t ScriptedResponses::CallCount(const std::string& key) const {
  std::lock_guard lock(*mu_);
  auto it = served_.find(key);
  return it == served_.end() ? 0 : it->second;
}

std::size_t ScriptedResponses::TotalCalls() const {
  std::lock_guard lock(*mu_);
  std::size_t n = 0;
  for (const auto& [k, v] : served_) n += v;
  return n;
}

namespace {

void ThrowIfError(const Json& r) {
  if (r.is_object() && r.contains("error")) {
    throw AdapterError("mock adapter error: " + r["error"].dump());
  }
}

std::string RawOrDump(const Json& r) {
  if (r.is_object() && r.contains("raw") && r["raw"].is_string()) return r["raw"].get<std::string>();
  return r.dump();
}

void SleepSeconds(double s) {
  if (s > 0) std::this_thread::sleep_for(std::chrono::duration<double>(s));
}

}  // namespace

MediaInfo ScriptedMediaAnalyzer::Analyze(const std::string& entry_id, const std::string&) {
  const Json r = script_.Next(entry_id);
  ThrowIfError(r);
  MediaInfo info;
  info.width = r.value("width", 1024);
  info.height = r.value("height", 1024);
  info.subject_count = r.value("subject_count", 1);
  info.nsfw = r.value("nsfw", false);
  if (auto p = r.find("phash"); p != r.end()) {
    info.phash = p->is_string() ? std::stoull(p->get<std::string>(), nullptr, 16)
                                : p->get<std::uint64_t>();
  }
  return info;
}

std::string ScriptedTagger::Propose(const TaggingRequest& request) {
  transcript.Record(request);
  const Json r = script_.Next(request.entry_id);
  ThrowIfError(r);
  return RawOrDump(r);
}

std::string ScriptedSwapper::Swap(const SwapRequest& request) {
  transcript.Record(request);
  const Json r = script_.Next(request.entry_id);
  ThrowIfError(r);
  if (r.is_object() && r.contains("swapped_uri")) return r["swapped_uri"].get<std::string>();
  return request.image_uri + "#swap-" + std::to_string(request.attempt);
}

bool ScriptedVerifier::Verify(const VerifyRequest& request) {
  transcript.Record(request);
  const Json r = script_.Next(request.entry_id);
  ThrowIfError(r);
  return r.value("pass", false);
}

GenerationResponse ScriptedGenerator::Generate(const GenerationRequest& request) {
  transcript.Record(request);
  const Json r = script_.Next(request.pair_id);
  const std::string kind = r.value("kind", "ok");
  double sleep_s = r.value("sleep_s", 0.0);
  if (auto by = r.find("sleep_s_by_ref_count"); by != r.end()) {
    const std::string refs = std::to_string(request.garment_images.size() + 1);
    if (by->contains(refs)) sleep_s = (*by)[refs].get<double>();
  }
  SleepSeconds(sleep_s);
  if (kind == "error") throw AdapterError("generator error: " + r.value("reason", "unspecified"));
  GenerationResponse out;
  if (kind == "refusal") {
    out.kind = GenerationResponse::Kind::kRefusal;
    out.refusal_reason = r.value("reason", "refused");
    return out;
  }
  out.image_uri = r.value("image_uri", "mock://" + system_id_ + "/" + request.pair_id + ".png");
  if (r.contains("server_time_s")) out.server_time_s = r["server_time_s"].get<double>();
  return out;
}

std::string ScriptedJudge::Complete(const JudgeRequest& request) {
  transcript.Record(request);
  const std::string keyed = request.pair_id + ":" + request.stage;
  const Json r = script_.Next(script_.Has(keyed) ? keyed : request.stage);
  ThrowIfError(r);
  return RawOrDump(r);
}

// ---------------------------------------------------------------------------

std::string Base64Encode(std::string_view bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(bytes.data()),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::string Base64Decode(std::string_view text) {
  if (text.size() % 4 != 0) throw AdapterError("invalid base64 length");
  std::string out(3 * text.size() / 4, '\0');
  const int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) throw AdapterError("invalid base64 payload");
  std::size_t len = static_cast<std::size_t>(n);
  if (!text.empty() && text.back() == '=') --len;
  if (text.size() > 1 && text[text.size() - 2] == '=') --len;
  out.resize(len);
  return out;
}

std::string ResolveAdapterSpec(const std::string& spec, const std::string& role) {
  if (!spec.empty()) return spec;
  std::string var = "BENCHKIT_";
  for (char c : role) var.push_back(std::isalnum(static_cast<unsigned char>(c))
                                        ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
                                        : '_');
  var += "_ENDPOINT";
  if (const char* v = std::getenv(var.c_str()); v != nullptr && *v != '\0') return v;
  throw ConfigError("no adapter configured for '" + role + "' (pass a spec or set " + var + ")");
}

bool IsMockSpec(const std::string& spec) { return spec.rfind("mock:", 0) == 0; }

std::string MockFixturePath(const std::string& spec) { return spec.substr(5); }

HttpEndpoint EndpointFromSpec(const std::string& spec, const std::string& role) {
  if (spec.rfind("http://", 0) != 0 && spec.rfind("https://", 0) != 0) {
    throw ConfigError("adapter spec for '" + role + "' must be mock:<path> or an http(s) URL: " +
                      spec);
  }
  HttpEndpoint ep;
  ep.url = spec;
  std::string var = "BENCHKIT_";
  for (char c : role) var.push_back(std::isalnum(static_cast<unsigned char>(c))
                                        ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
                                        : '_');
  if (const char* t = std::getenv((var + "_TOKEN").c_str())) ep.bearer_token = t;
  if (const char* t = std::getenv((var + "_TIMEOUT_S").c_str())) ep.timeout_s = std::atof(t);
  if (ep.timeout_s <= 0) throw ConfigError("timeout must be positive for '" + role + "'");
  return ep;
}

std::unique_ptr<MediaAnalyzer> MakeMediaAnalyzer(const std::string& spec) {
  const auto s = ResolveAdapterSpec(spec, "analyzer");
  if (IsMockSpec(s)) {
    return std::make_unique<ScriptedMediaAnalyzer>(ScriptedResponses::FromFile(MockFixturePath(s)));
  }
  return MakeHttpMediaAnalyzer(EndpointFromSpec(s, "analyzer"));
}

std::unique_ptr<TaggingClient> MakeTagger(const std::string& spec) {
  const auto s = ResolveAdapterSpec(spec, "tagger");
  if (IsMockSpec(s)) {
    return std::make_unique<ScriptedTagger>(ScriptedResponses::FromFile(MockFixturePath(s)));
  }
  return MakeHttpTagger(EndpointFromSpec(s, "tagger"));
}

std::unique_ptr<FaceSwapper> MakeSwapper(const std::string& spec) {
  const auto s = ResolveAdapterSpec(spec, "swapper");
  if (IsMockSpec(s)) {
    return std::make_unique<ScriptedSwapper>(ScriptedResponses::FromFile(MockFixturePath(s)));
  }
  return MakeHttpSwapper(EndpointFromSpec(s, "swapper"));
}

std::unique_ptr<SwapVerifier> MakeVerifier(const std::string& spec) {
  const auto s = ResolveAdapterSpec(spec, "verifier");
  if (IsMockSpec(s)) {
    return std::make_unique<ScriptedVerifier>(ScriptedResponses::FromFile(MockFixturePath(s)));
  }
  return MakeHttpVerifier(EndpointFromSpec(s, "verifier"));
}

std::unique_ptr<Generator> MakeGenerator(const std::string& system_id, const std::string& spec) {
  const auto s = ResolveAdapterSpec(spec, "generator_" + system_id);
  if (IsMockSpec(s)) {
    return std::make_unique<ScriptedGenerator>(system_id,
                                               ScriptedResponses::FromFile(MockFixturePath(s)));
  }
  return MakeHttpGenerator(EndpointFromSpec(s, "generator_" + system_id));
}

std::unique_ptr<JudgeClient> MakeJudge(const std::string& spec) {
  const auto s = ResolveAdapterSpec(spec, "judge");
  if (s == "synthetic" || s.rfind("synthetic:", 0) == 0) {
    const std::uint64_t seed = s.size() > 10 ? std::stoull(s.substr(10)) : 0;
    return std::make_unique<SyntheticJudge>(seed);
  }
  if (IsMockSpec(s)) {
    return std::make_unique<ScriptedJudge>(ScriptedResponses::FromFile(MockFixturePath(s)));
  }
  return MakeHttpJudge(EndpointFromSpec(s, "judge"));
}

}  // namespace benchkit
