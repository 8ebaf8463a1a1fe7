#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "lgplan/instruction.hpp"
#include "lgplan/json_lines.hpp"
#include "lgplan/scene.hpp"

namespace lgplan {

struct ChatMessage {
  std::string role;  // "system", "user" or "assistant"
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

/// The endpoint could not be reached or answered with something other than a
/// completion. `raw()` holds the response body when there was one.
class TransportError : public Error {
 public:
  TransportError(const std::string& message, std::string raw)
      : Error("llm_transport", message), raw_(std::move(raw)) {}
  const std::string& raw() const { return raw_; }

 private:
  std::string raw_;
};

/// The model's answer was not a valid goal, even after the retry.
class ReplyError : public Error {
 public:
  ReplyError(const std::string& message, std::string raw)
      : Error("llm_reply", message), raw_(std::move(raw)) {}
  const std::string& raw() const { return raw_; }

 private:
  std::string raw_;
};

class CompletionClient {
 public:
  virtual ~CompletionClient() = default;
  /// Returns the assistant's reply text. Throws TransportError.
  virtual std::string complete(const std::vector<ChatMessage>& messages) = 0;
};

struct HttpClientConfig {
  std::string endpoint;  // e.g. https://host/v1/chat/completions
  std::string model;
  double timeout_s = 30.0;
};

/// Chat-completion POST ({"model", "messages", "temperature": 0}) with a
/// bearer credential; the reply is choices[0].message.content.
class HttpCompletionClient : public CompletionClient {
 public:
  HttpCompletionClient(HttpClientConfig cfg, std::string api_key);
  /// Reads the credential from LGPLAN_LLM_KEY; Error("llm_config") if unset.
  static HttpCompletionClient from_environment(HttpClientConfig cfg);

  std::string complete(const std::vector<ChatMessage>& messages) override;

 private:
  HttpClientConfig cfg_;
  std::string api_key_;
};

/// Answers from a fixture of recorded exchanges:
///   {"exchanges": [{"request": [{"role", "content"}, ...], "response": "..."}]}
/// A request with no recording raises TransportError.
class ReplayCompletionClient : public CompletionClient {
 public:
  explicit ReplayCompletionClient(const Json& fixture);
  static ReplayCompletionClient load(const std::filesystem::path& path);

  std::string complete(const std::vector<ChatMessage>& messages) override;

 private:
  std::vector<std::pair<std::vector<ChatMessage>, std::string>> exchanges_;
};

/// Forwards to another client and keeps every exchange in fixture format.
class RecordingCompletionClient : public CompletionClient {
 public:
  explicit RecordingCompletionClient(CompletionClient& inner) : inner_(inner) {}

  std::string complete(const std::vector<ChatMessage>& messages) override;
  Json fixture() const { return {{"exchanges", exchanges_}}; }

 private:
  CompletionClient& inner_;
  Json exchanges_ = Json::array();
};

/// System rules, one "o<id>: <name>, <color>" line per object, then the
/// query.
std::vector<ChatMessage> build_prompt(const Scene& scene, std::string_view user_text);

/// Asks the model for a goal in the mini-language and parses it, retrying
/// once with the parser's complaint appended.
GoalSpec llm_parse(std::string_view user_text, const Scene& scene, const PatternDb& db,
                   CompletionClient& client);

}  // namespace lgplan
