// Copyright 2026 The benchkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "httplib.h"

#include <regex>

#include "benchkit/adapters.hpp"
#include "benchkit/error.hpp"

namespace benchkit {
namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

ParsedUrl SplitUrl(const std::string& url) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, kUrl)) throw ConfigError("malformed endpoint url: " + url);
  return {m[1].str(), m[2].matched ? m[2].str() : "/"};
}

}  // namespace

Json PostJson(const HttpEndpoint& endpoint, const Json& body) {
  const auto url = SplitUrl(endpoint.url);
  httplib::Client client(url.origin);
  const auto secs = static_cast<time_t>(endpoint.timeout_s);
  const auto usecs = static_cast<time_t>((endpoint.timeout_s - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  httplib::Headers headers;
  if (!endpoint.bearer_token.empty()) {
    headers.emplace("Authorization", "Bearer " + endpoint.bearer_token);
  }
  auto res = client.Post(url.path, headers, body.dump(), "application/json");
  if (!res) {
    throw AdapterError("POST " + endpoint.url + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw AdapterError("POST " + endpoint.url + " returned HTTP " + std::to_string(res->status));
  }
  auto parsed = Json::parse(res->body, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded()) throw AdapterError("non-JSON reply from " + endpoint.url);
  return parsed;
}

namespace {

class HttpMediaAnalyzer : public MediaAnalyzer {
 public:
  explicit HttpMediaAnalyzer(HttpEndpoint ep) : ep_(std::move(ep)) {}
  MediaInfo Analyze(const std::string& entry_id, const std::string& image_uri) override {
    const Json r = PostJson(ep_, {{"entry_id", entry_id}, {"image_uri", image_uri}});
    MediaInfo info;
    try {
      info.width = r.at("width").get<int>();
      info.height = r.at("height").get<int>();
      info.subject_count = r.value("subject_count", 1);
      info.nsfw = r.value("nsfw", false);
      info.phash = std::stoull(r.at("phash").get<std::string>(), nullptr, 16);
    } catch (const std::exception& e) {
      throw AdapterError(std::string("malformed analyzer reply: ") + e.what());
    }
    return info;
  }

 private:
  HttpEndpoint ep_;
};

class HttpTagger : public TaggingClient {
 public:
  explicit HttpTagger(HttpEndpoint ep) : ep_(std::move(ep)) {}
  std::string Propose(const TaggingRequest& request) override {
    const Json r = PostJson(ep_, ToJson(request));
    if (!r.contains("text") || !r["text"].is_string()) throw AdapterError("tagger reply lacks text");
    return r["text"].get<std::string>();
  }

 private:
  HttpEndpoint ep_;
};

class HttpSwapper : public FaceSwapper {
 public:
  explicit HttpSwapper(HttpEndpoint ep) : ep_(std::move(ep)) {}
  std::string Swap(const SwapRequest& request) override {
    const Json r = PostJson(ep_, ToJson(request));
    if (!r.contains("swapped_uri")) throw AdapterError("swapper reply lacks swapped_uri");
    return r["swapped_uri"].get<std::string>();
  }

 private:
  HttpEndpoint ep_;
};

class HttpVerifier : public SwapVerifier {
 public:
  explicit HttpVerifier(HttpEndpoint ep) : ep_(std::move(ep)) {}
  bool Verify(const VerifyRequest& request) override {
    const Json r = PostJson(ep_, ToJson(request));
    if (!r.contains("pass") || !r["pass"].is_boolean()) throw AdapterError("verifier reply lacks pass");
    return r["pass"].get<bool>();
  }

 private:
  HttpEndpoint ep_;
};

class HttpGenerator : public Generator {
 public:
  explicit HttpGenerator(HttpEndpoint ep) : ep_(std::move(ep)) {}
  GenerationResponse Generate(const GenerationRequest& request) override {
    const Json r = PostJson(ep_, ToJson(request));
    GenerationResponse out;
    const std::string status = r.value("status", "");
    if (status == "refusal") {
      out.kind = GenerationResponse::Kind::kRefusal;
      out.refusal_reason = r.value("reason", "refused");
      return out;
    }
    if (status != "ok") throw AdapterError("generator reply has status '" + status + "'");
    out.image_uri = r.value("image_uri", "");
    if (r.contains("image_b64")) out.image_bytes = Base64Decode(r["image_b64"].get<std::string>());
    if (r.contains("server_time_s")) out.server_time_s = r["server_time_s"].get<double>();
    return out;
  }

 private:
  HttpEndpoint ep_;
};

class HttpJudge : public JudgeClient {
 public:
  explicit HttpJudge(HttpEndpoint ep) : ep_(std::move(ep)) {}
  std::string Complete(const JudgeRequest& request) override {
    const Json r = PostJson(ep_, ToJson(request));
    if (!r.contains("text") || !r["text"].is_string()) throw AdapterError("judge reply lacks text");
    return r["text"].get<std::string>();
  }

 private:
  HttpEndpoint ep_;
};

}  // namespace

std::unique_ptr<MediaAnalyzer> MakeHttpMediaAnalyzer(HttpEndpoint endpoint) {
  return std::make_unique<HttpMediaAnalyzer>(std::move(endpoint));
}
std::unique_ptr<TaggingClient> MakeHttpTagger(HttpEndpoint endpoint) {
  return std::make_unique<HttpTagger>(std::move(endpoint));
}
std::unique_ptr<FaceSwapper> MakeHttpSwapper(HttpEndpoint endpoint) {
  return std::make_unique<HttpSwapper>(std::move(endpoint));
}
std::unique_ptr<SwapVerifier> MakeHttpVerifier(HttpEndpoint endpoint) {
  return std::make_unique<HttpVerifier>(std::move(endpoint));
}
std::unique_ptr<Generator> MakeHttpGenerator(HttpEndpoint endpoint) {
  return std::make_unique<HttpGenerator>(std::move(endpoint));
}
std::unique_ptr<JudgeClient> MakeHttpJudge(HttpEndpoint endpoint) {
  return std::make_unique<HttpJudge>(std::move(endpoint));
}

}  // namespace benchkit
