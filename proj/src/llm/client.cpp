#include "vclemma/llm/client.hpp"

#include <chrono>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "httplib.h"
#include "vclemma/core/manifest.hpp"

namespace vclemma {

using nlohmann::json;

namespace {

json request_to_json(const ChatRequest& req) {
  json j;
  j["model"] = req.model_id;
  j["temperature"] = req.temperature;
  j["messages"] = json::array();
  for (const auto& m : req.messages)
    j["messages"].push_back({{"role", m.role}, {"content", m.content}});
  j["tools"] = json::array();
  for (const auto& t : req.tools)
    j["tools"].push_back({{"name", t.name},
                          {"description", t.description},
                          {"parameters", t.parameters}});
  return j;
}

json response_to_json(const ChatResponse& r) {
  json j;
  if (r.tool_call) {
    j["tool_call"] = {{"name", r.tool_call->name},
                      {"arguments", r.tool_call->arguments}};
  } else {
    j["text"] = r.text;
  }
  j["usage"] = {{"prompt_tokens", r.usage.prompt_tokens},
                {"completion_tokens", r.usage.completion_tokens}};
  return j;
}

ChatResponse response_from_json(const json& j) {
  ChatResponse r;
  if (j.contains("tool_call")) {
    ToolCall call;
    call.name = j.at("tool_call").at("name").get<std::string>();
    call.arguments = j.at("tool_call").value("arguments", json::object());
    r.tool_call = std::move(call);
  } else {
    r.text = j.value("text", "");
  }
  if (j.contains("usage")) {
    r.usage.prompt_tokens = j["usage"].value("prompt_tokens", std::int64_t{0});
    r.usage.completion_tokens =
        j["usage"].value("completion_tokens", std::int64_t{0});
  }
  return r;
}

}  // namespace

std::string canonical_request_json(const ChatRequest& req) {
  return request_to_json(req).dump();
}

std::string request_hash(const ChatRequest& req) {
  const std::string text = canonical_request_json(req);
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

LlmConfig load_llm_config(const std::filesystem::path& path) {
  json j = json::parse(read_file(path));
  LlmConfig c;
  c.endpoint_url = j.at("endpoint_url").get<std::string>();
  c.model_id = j.at("model_id").get<std::string>();
  c.temperature = j.value("temperature", 0.0);
  c.timeout_secs = j.value("timeout_secs", 120);
  c.api_key_env = j.value("api_key_env", std::string("LLM_API_KEY"));
  c.max_retries = j.value("max_retries", 3);
  return c;
}

HttpChatBackend::HttpChatBackend(LlmConfig config) : config_(std::move(config)) {
  const std::string& url = config_.endpoint_url;
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw std::runtime_error("endpoint_url must include a scheme: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    base_url_ = url;
    path_ = "/chat/completions";
  } else {
    base_url_ = url.substr(0, path_start);
    path_ = url.substr(path_start);
  }
}

ChatResponse HttpChatBackend::complete(const ChatRequest& req) {
  json body = json{{"model", req.model_id},
                   {"temperature", req.temperature},
                   {"messages", json::array()}};
  for (const auto& m : req.messages)
    body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  if (!req.tools.empty()) {
    body["tools"] = json::array();
    for (const auto& t : req.tools)
      body["tools"].push_back(
          {{"type", "function"},
           {"function",
            {{"name", t.name},
             {"description", t.description},
             {"parameters", t.parameters}}}});
  }

  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str());
        key && *key)
      headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  std::string last_failure = "no attempt made";
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0)
      std::this_thread::sleep_for(std::chrono::milliseconds(100 << attempt));

    httplib::Client cli(base_url_);
    cli.set_connection_timeout(config_.timeout_secs);
    cli.set_read_timeout(config_.timeout_secs);
    cli.set_write_timeout(config_.timeout_secs);

    auto res = cli.Post(path_, headers, body.dump(), "application/json");
    if (!res) {
      last_failure = "connection error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_failure = "server error " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200)
      throw std::runtime_error("chat endpoint returned status " +
                               std::to_string(res->status) + ": " + res->body);

    json reply = json::parse(res->body);
    const json& message = reply.at("choices").at(0).at("message");
    ChatResponse out;
    if (message.contains("tool_calls") && !message["tool_calls"].empty()) {
      const json& f = message["tool_calls"][0]["function"];
      ToolCall call;
      call.name = f.at("name").get<std::string>();
      if (f.contains("arguments")) {
        if (f["arguments"].is_string())
          call.arguments = json::parse(f["arguments"].get<std::string>());
        else
          call.arguments = f["arguments"];
      }
      out.tool_call = std::move(call);
    } else if (message.contains("content") && !message["content"].is_null()) {
      out.text = message["content"].get<std::string>();
    }
    if (reply.contains("usage")) {
      out.usage.prompt_tokens =
          reply["usage"].value("prompt_tokens", std::int64_t{0});
      out.usage.completion_tokens =
          reply["usage"].value("completion_tokens", std::int64_t{0});
    }
    return out;
  }
  throw std::runtime_error("chat endpoint unreachable after " +
                           std::to_string(config_.max_retries + 1) +
                           " attempts (" + last_failure + ")");
}

ReplayBackend::ReplayBackend(const std::filesystem::path& cassette_path)
    : path_(cassette_path) {
  json doc = json::parse(read_file(cassette_path));
  if (!doc.is_array())
    throw std::runtime_error("cassette is not a JSON array: " +
                             cassette_path.string());
  for (const auto& item : doc) {
    Entry e;
    e.canonical_request = item.at("request_snapshot").dump();
    e.response = response_from_json(item.at("response"));
    std::string hash = item.at("request_hash").get<std::string>();
    auto [it, inserted] = entries_.emplace(hash, std::move(e));
    if (!inserted && it->second.canonical_request !=
                         item.at("request_snapshot").dump())
      throw std::runtime_error("cassette has conflicting entries for hash " +
                               hash);
  }
}

ChatResponse ReplayBackend::complete(const ChatRequest& req) {
  const std::string hash = request_hash(req);
  auto it = entries_.find(hash);
  if (it == entries_.end()) {
    throw std::runtime_error(
        "replay cassette " + path_.string() +
        " has no entry for this request (hash " + hash +
        ").\nDivergent request follows:\n" + canonical_request_json(req));
  }
  if (it->second.canonical_request != canonical_request_json(req))
    throw std::runtime_error("cassette hash collision for " + hash);
  return it->second.response;
}

RecordingBackend::RecordingBackend(std::shared_ptr<ChatBackend> inner,
                                   std::filesystem::path cassette_path)
    : inner_(std::move(inner)), path_(std::move(cassette_path)) {}

ChatResponse RecordingBackend::complete(const ChatRequest& req) {
  ChatResponse response = inner_->complete(req);
  std::lock_guard<std::mutex> lock(mutex_);
  const std::string hash = request_hash(req);
  for (const auto& e : entries_) {
    if (e.at("request_hash").get<std::string>() != hash) continue;
    if (e.at("response") != response_to_json(response))
      throw std::runtime_error(
          "nondeterministic backend: two different responses for hash " + hash);
    return response;  // identical repeat, nothing new to record
  }
  entries_.push_back({{"request_hash", hash},
                      {"request_snapshot", request_to_json(req)},
                      {"response", response_to_json(response)}});
  save_locked();
  return response;
}

void RecordingBackend::save_locked() {
  write_file(path_, entries_.dump(2) + "\n");
}

LlmClient::LlmClient(std::shared_ptr<ChatBackend> backend, std::string model_id,
                     double temperature)
    : backend_(std::move(backend)),
      model_id_(std::move(model_id)),
      temperature_(temperature) {
  if (!backend_) throw std::invalid_argument("null chat backend");
}

ChatResponse LlmClient::chat(const std::vector<ChatMessage>& messages,
                             Phase phase,
                             const std::vector<ToolDescriptor>& tools) {
  ChatRequest req;
  req.model_id = model_id_;
  req.temperature = temperature_;
  req.messages = messages;
  req.tools = tools;
  log_.push_back(req);
  ChatResponse res = backend_->complete(req);
  (phase == Phase::offline ? offline_usage_ : agent_usage_) += res.usage;
  return res;
}

TokenUsage LlmClient::usage(Phase phase) const {
  return phase == Phase::offline ? offline_usage_ : agent_usage_;
}

TokenUsage LlmClient::total_usage() const {
  TokenUsage t = offline_usage_;
  t += agent_usage_;
  return t;
}

}  // namespace vclemma
