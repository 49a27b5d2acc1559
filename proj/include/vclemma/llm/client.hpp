#ifndef VCLEMMA_LLM_CLIENT_HPP_
#define VCLEMMA_LLM_CLIENT_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace vclemma {

struct ChatMessage {
  std::string role;  // "system" | "user" | "assistant" | "tool"
  std::string content;
};

// A callable tool offered to the model. parameters is a JSON schema object.
struct ToolDescriptor {
  std::string name;
  std::string description;
  nlohmann::json parameters;
};

struct ChatRequest {
  std::string model_id;
  double temperature = 0.0;
  std::vector<ChatMessage> messages;
  std::vector<ToolDescriptor> tools;
};

struct ToolCall {
  std::string name;
  nlohmann::json arguments;
};

struct TokenUsage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;

  TokenUsage& operator+=(const TokenUsage& o) {
    prompt_tokens += o.prompt_tokens;
    completion_tokens += o.completion_tokens;
    return *this;
  }
};

// Exactly one of text / tool_call carries the assistant's reply.
struct ChatResponse {
  std::string text;
  std::optional<ToolCall> tool_call;
  TokenUsage usage;
};

// Stable JSON rendering of a request: sorted keys, compact separators.
// Equal requests produce equal strings.
std::string canonical_request_json(const ChatRequest& req);
// FNV-1a 64-bit hash of canonical_request_json, as 16 hex digits.
std::string request_hash(const ChatRequest& req);

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual ChatResponse complete(const ChatRequest& req) = 0;
};

// Endpoint configuration, loadable from JSON:
// { "endpoint_url": "https://host/v1/chat/completions", "model_id": "...",
//   "temperature": 0.0, "timeout_secs": 120,
//   "api_key_env": "LLM_API_KEY", "max_retries": 3 }
struct LlmConfig {
  std::string endpoint_url;
  std::string model_id;
  double temperature = 0.0;
  int timeout_secs = 120;
  std::string api_key_env = "LLM_API_KEY";
  int max_retries = 3;
};

LlmConfig load_llm_config(const std::filesystem::path& path);

// Talks to an OpenAI-style chat-completions endpoint. The API key is read
// from the environment variable named in the config at call time and never
// stored or logged. Connection failures and 5xx responses are retried up to
// max_retries with exponential backoff.
class HttpChatBackend : public ChatBackend {
 public:
  explicit HttpChatBackend(LlmConfig config);
  ChatResponse complete(const ChatRequest& req) override;

 private:
  LlmConfig config_;
  std::string base_url_;
  std::string path_;
};

// Replays recorded responses keyed by request-content hash. A request with
// no recorded response aborts with an error that prints the divergent
// request, so drift between code and cassette is loud.
class ReplayBackend : public ChatBackend {
 public:
  explicit ReplayBackend(const std::filesystem::path& cassette_path);
  ChatResponse complete(const ChatRequest& req) override;
  std::size_t entry_count() const { return entries_.size(); }

 private:
  struct Entry {
    std::string canonical_request;
    ChatResponse response;
  };
  std::filesystem::path path_;
  std::map<std::string, Entry> entries_;  // request_hash -> entry
};

// Wraps another backend and writes every exchange to a cassette file that
// ReplayBackend can consume. Safe to share across threads.
class RecordingBackend : public ChatBackend {
 public:
  RecordingBackend(std::shared_ptr<ChatBackend> inner,
                   std::filesystem::path cassette_path);
  ChatResponse complete(const ChatRequest& req) override;

 private:
  void save_locked();

  std::shared_ptr<ChatBackend> inner_;
  std::filesystem::path path_;
  std::mutex mutex_;
  nlohmann::json entries_ = nlohmann::json::array();
};

// Client facade used by the pipeline: pins model and temperature, keeps the
// full request log (so ablation runs can be audited), and accounts token
// usage separately for the offline phase and the proof agent.
class LlmClient {
 public:
  enum class Phase { offline, agent };

  LlmClient(std::shared_ptr<ChatBackend> backend, std::string model_id,
            double temperature = 0.0);

  ChatResponse chat(const std::vector<ChatMessage>& messages, Phase phase,
                    const std::vector<ToolDescriptor>& tools = {});

  const std::vector<ChatRequest>& request_log() const { return log_; }
  TokenUsage usage(Phase phase) const;
  TokenUsage total_usage() const;

 private:
  std::shared_ptr<ChatBackend> backend_;
  std::string model_id_;
  double temperature_;
  std::vector<ChatRequest> log_;
  TokenUsage offline_usage_;
  TokenUsage agent_usage_;
};

}  // namespace vclemma

#endif  // VCLEMMA_LLM_CLIENT_HPP_
