#include "nerpipe/llm.hpp"

#include <httplib.h>

#include "json_util.hpp"
#include "nerpipe/error.hpp"
#include "nerpipe/io.hpp"

namespace nerpipe::llm {

using detail::ojson;

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path without trailing slash
};

SplitUrl split_base_url(const std::string& url) {
  const std::size_t scheme = url.find("://");
  const std::size_t path = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  SplitUrl out{url.substr(0, path), path == std::string::npos ? "" : url.substr(path)};
  while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
  return out;
}

std::string post_json(const HttpEndpoint& endpoint, const std::string& route,
                      const std::string& body) {
  const SplitUrl url = split_base_url(endpoint.base_url);
  httplib::Client client(url.origin);
  if (!client.is_valid()) throw TransportError("unsupported endpoint URL '" + endpoint.base_url + "'");
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(endpoint.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(endpoint.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  httplib::Headers headers;
  if (!endpoint.api_key.empty()) headers.emplace("Authorization", "Bearer " + endpoint.api_key);
  auto res = client.Post(url.prefix + route, headers, body, "application/json");
  if (!res) throw TransportError("request to " + endpoint.base_url + route + " failed: " +
                                 httplib::to_string(res.error()));
  if (res->status != 200)
    throw TransportError("HTTP " + std::to_string(res->status) + " from " + endpoint.base_url + route);
  return res->body;
}

}  // namespace

std::string chat_request_body(const LlmRequest& request) {
  ojson messages = ojson::array();
  if (!request.system.empty()) messages.push_back({{"role", "system"}, {"content", request.system}});
  messages.push_back({{"role", "user"}, {"content", request.user}});
  ojson body;
  body["model"] = request.model;
  body["messages"] = std::move(messages);
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_tokens;
  if (request.json_output) body["response_format"] = {{"type", "json_object"}};
  return detail::dump_compact(body);
}

LlmResponse parse_chat_response(std::string_view body) {
  auto doc = nlohmann::json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw TransportError("chat response is not JSON");
  const auto choices = doc.find("choices");
  if (choices == doc.end() || !choices->is_array() || choices->empty())
    throw TransportError("chat response has no choices");
  const auto& choice = choices->front();
  LlmResponse out;
  if (!choice.contains("message") || !choice["message"].is_object() ||
      !choice["message"].contains("content") || !choice["message"]["content"].is_string())
    throw TransportError("chat response has no message content");
  out.text = choice["message"]["content"].get<std::string>();
  if (choice.contains("finish_reason") && choice["finish_reason"].is_string())
    out.finish_reason = choice["finish_reason"].get<std::string>();
  if (doc.contains("usage") && doc["usage"].is_object()) {
    const auto& usage = doc["usage"];
    if (usage.contains("prompt_tokens") && usage["prompt_tokens"].is_number_integer())
      out.prompt_tokens = usage["prompt_tokens"].get<int>();
    if (usage.contains("completion_tokens") && usage["completion_tokens"].is_number_integer())
      out.completion_tokens = usage["completion_tokens"].get<int>();
  }
  return out;
}

LlmResponse HttpLlmClient::complete(const LlmRequest& request) {
  if (request.user.empty()) throw std::invalid_argument("LLM request has an empty user message");
  return parse_chat_response(post_json(endpoint_, "/chat/completions", chat_request_body(request)));
}

MockLlmClient MockLlmClient::from_jsonl(std::string_view text) {
  MockLlmClient client;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (trim(line).empty()) continue;
    auto doc = nlohmann::json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw ParseError("malformed mock fixture line", line_no);
    if (!doc.contains("match") || !doc["match"].is_string())
      throw ParseError("mock entry needs a string 'match'", line_no);
    if (!doc.contains("attempt") || !doc["attempt"].is_number_integer())
      throw ParseError("mock entry needs an integer 'attempt'", line_no);
    std::string match = doc["match"].get<std::string>();
    const int attempt = doc["attempt"].get<int>();
    if (doc.contains("error")) {
      client.add_error(std::move(match), attempt,
                       doc["error"].is_string() ? doc["error"].get<std::string>() : "scripted error");
    } else if (doc.contains("body")) {
      const auto& body = doc["body"];
      client.add(std::move(match), attempt,
                 body.is_string() ? body.get<std::string>()
                                  : body.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace));
    } else {
      throw ParseError("mock entry needs 'body' or 'error'", line_no);
    }
  }
  return client;
}

MockLlmClient MockLlmClient::from_file(const std::filesystem::path& path) {
  return from_jsonl(read_file(path));
}

void MockLlmClient::add(std::string parent_id, int attempt, std::string body) {
  script_[{std::move(parent_id), attempt}] = {std::move(body), false};
}

void MockLlmClient::add_error(std::string parent_id, int attempt, std::string message) {
  script_[{std::move(parent_id), attempt}] = {std::move(message), true};
}

LlmResponse MockLlmClient::complete(const LlmRequest& request) {
  ++calls_;
  auto it = script_.find({request.parent_id, request.attempt});
  if (it == script_.end()) it = script_.find({"*", request.attempt});
  if (it == script_.end())
    throw TransportError("no scripted response for '" + request.parent_id + "' attempt " +
                         std::to_string(request.attempt));
  if (it->second.is_error) throw TransportError(it->second.body);
  return {it->second.body, "stop", 0, 0};
}

std::vector<std::vector<double>> RemoteEmbedder::embed(std::span<const std::string> texts) const {
  ojson body;
  body["model"] = model_;
  body["input"] = std::vector<std::string>(texts.begin(), texts.end());
  const std::string reply = post_json(endpoint_, "/embeddings", detail::dump_compact(body));
  auto doc = nlohmann::json::parse(reply, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw TransportError("embedding response is not JSON");
  std::vector<std::vector<double>> out;
  try {
    if (doc.contains("vectors")) {
      out = doc["vectors"].get<std::vector<std::vector<double>>>();
    } else if (doc.contains("data") && doc["data"].is_array()) {
      for (const auto& item : doc["data"]) out.push_back(item.at("embedding").get<std::vector<double>>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("embedding response has an unexpected shape: ") + e.what());
  }
  if (out.size() != texts.size()) throw TransportError("embedding response has the wrong vector count");
  return out;
}

}  // namespace nerpipe::llm
