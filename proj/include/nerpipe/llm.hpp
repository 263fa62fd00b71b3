#pragma once

// Chat-completion clients: an OpenAI-compatible HTTP client and a scripted
// mock for hermetic runs. Also the OpenAI-compatible remote embedder.

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>

#include "nerpipe/validate.hpp"

namespace nerpipe::llm {

struct LlmRequest {
  std::string model;
  std::string system;
  std::string user;
  double temperature = 0.7;
  int max_tokens = 1024;
  bool json_output = true;
  // Routing metadata; never sent over the wire.
  std::string parent_id;
  int attempt = 1;  // 1-based
};

struct LlmResponse {
  std::string text;
  std::string finish_reason;
  int prompt_tokens = 0;
  int completion_tokens = 0;
};

// complete() may be called from several threads at once. Failures to obtain
// a response throw TransportError.
class LlmClient {
 public:
  virtual ~LlmClient() = default;
  virtual LlmResponse complete(const LlmRequest& request) = 0;
};

struct HttpEndpoint {
  std::string base_url = "http://127.0.0.1:8000/v1";
  std::string api_key;  // sent as a bearer token when non-empty
  std::chrono::milliseconds timeout{60000};
};

// {"model", "messages", "temperature", "max_tokens"[, "response_format"]}.
std::string chat_request_body(const LlmRequest& request);
// Reads choices[0].message.content; throws TransportError on a bad body.
LlmResponse parse_chat_response(std::string_view body);

// POSTs to <base_url>/chat/completions.
class HttpLlmClient final : public LlmClient {
 public:
  explicit HttpLlmClient(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
  LlmResponse complete(const LlmRequest& request) override;

 private:
  HttpEndpoint endpoint_;
};

// Serves scripted responses keyed by (parent_id, attempt). Fixture lines:
//   {"match": "<parent_id>", "attempt": 1, "body": <string | JSON value>}
//   {"match": "<parent_id>", "attempt": 2, "error": "connection refused"}
// "match": "*" applies to any parent without its own entry for that attempt.
// A non-string body is serialized to JSON text. Missing entries raise
// TransportError.
class MockLlmClient final : public LlmClient {
 public:
  static MockLlmClient from_jsonl(std::string_view text);
  static MockLlmClient from_file(const std::filesystem::path& path);

  MockLlmClient() = default;
  MockLlmClient(const MockLlmClient& other) : script_(other.script_) {}

  void add(std::string parent_id, int attempt, std::string body);
  void add_error(std::string parent_id, int attempt, std::string message);

  LlmResponse complete(const LlmRequest& request) override;
  std::size_t calls() const { return calls_.load(); }

 private:
  struct Entry {
    std::string body;
    bool is_error = false;
  };
  std::map<std::pair<std::string, int>, Entry> script_;
  std::atomic<std::size_t> calls_{0};
};

// POST <base_url>/embeddings with {"model", "input": [...]}; accepts either
// {"vectors": [[...]]} or the OpenAI {"data": [{"embedding": [...]}]} shape.
class RemoteEmbedder final : public validate::Embedder {
 public:
  RemoteEmbedder(HttpEndpoint endpoint, std::string model)
      : endpoint_(std::move(endpoint)), model_(std::move(model)) {}
  std::vector<std::vector<double>> embed(std::span<const std::string> texts) const override;

 private:
  HttpEndpoint endpoint_;
  std::string model_;
};

}  // namespace nerpipe::llm
