#include "lgplan/llm.hpp"

#include <cstdlib>

#ifdef LGPLAN_WITH_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include "httplib.h"

#include "lgplan/scene_io.hpp"

namespace lgplan {

namespace {

constexpr std::string_view kSystemRules =
    "You translate tabletop rearrangement requests into a goal program.\n"
    "Answer with the program only, no prose and no code fences.\n"
    "Grammar:\n"
    "  spec    := clause (\";\" clause)*\n"
    "  clause  := PATTERN \"(\" objlist [\"|\" obj] \")\"\n"
    "  objlist := obj (\",\" obj)*\n"
    "  obj     := \"o\" INTEGER\n"
    "Patterns: line, circle, rectangle, tower (objects bottom-first), and the\n"
    "relations left, right, front, behind, left_front, left_behind,\n"
    "right_front, right_behind, which take the anchor after \"|\".\n"
    "Example: line(o3,o5,o7); left(o2|o3)\n"
    "Use only the object ids listed below.";

std::string strip_reply(std::string_view s) {
  auto trim = [](std::string_view v) {
    const auto b = v.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return std::string_view{};
    return v.substr(b, v.find_last_not_of(" \t\r\n") - b + 1);
  };
  s = trim(s);
  if (s.starts_with("```") && s.size() >= 6 && s.ends_with("```")) {
    s = s.substr(3, s.size() - 6);
    const auto nl = s.find('\n');
    if (nl != std::string_view::npos && s.substr(0, nl).find('(') == std::string_view::npos)
      s = s.substr(nl + 1);  // language tag line
    s = trim(s);
  }
  return std::string(s);
}

Json messages_to_json(const std::vector<ChatMessage>& messages) {
  Json out = Json::array();
  for (const ChatMessage& m : messages) out.push_back({{"role", m.role}, {"content", m.content}});
  return out;
}

std::vector<ChatMessage> messages_from_json(const Json& j) {
  std::vector<ChatMessage> out;
  for (const Json& m : j)
    out.push_back({m.at("role").get<std::string>(), m.at("content").get<std::string>()});
  return out;
}

}  // namespace

std::vector<ChatMessage> build_prompt(const Scene& scene, std::string_view user_text) {
  std::string objects = "Objects:\n";
  for (const SceneObject& o : scene.objects())
    objects += "o" + std::to_string(o.id) + ": " + o.name + ", " + o.color + "\n";
  return {{"system", std::string(kSystemRules)},
          {"user", objects + "Request: " + std::string(user_text)}};
}

GoalSpec llm_parse(std::string_view user_text, const Scene& scene, const PatternDb& db,
                   CompletionClient& client) {
  std::vector<ChatMessage> messages = build_prompt(scene, user_text);
  std::string reply = client.complete(messages);
  try {
    return parse_dsl(strip_reply(reply), db, &scene);
  } catch (const Error& first) {
    messages.push_back({"assistant", reply});
    messages.push_back({"user", std::string("That answer is not a valid program: ") +
                                    first.what() + "\nReply again with the program only."});
  }
  reply = client.complete(messages);
  try {
    return parse_dsl(strip_reply(reply), db, &scene);
  } catch (const Error& second) {
    throw ReplyError(std::string("model reply is not a valid goal after retry: ") + second.what(),
                     reply);
  }
}

// --- HTTP ------------------------------------------------------------------------------

HttpCompletionClient::HttpCompletionClient(HttpClientConfig cfg, std::string api_key)
    : cfg_(std::move(cfg)), api_key_(std::move(api_key)) {
  if (cfg_.endpoint.empty()) throw Error("llm_config", "no LLM endpoint configured");
  if (cfg_.model.empty()) throw Error("llm_config", "no LLM model configured");
}

HttpCompletionClient HttpCompletionClient::from_environment(HttpClientConfig cfg) {
  const char* key = std::getenv("LGPLAN_LLM_KEY");
  if (!key || !*key) throw Error("llm_config", "LGPLAN_LLM_KEY is not set");
  return HttpCompletionClient(std::move(cfg), key);
}

std::string HttpCompletionClient::complete(const std::vector<ChatMessage>& messages) {
  // Split "scheme://host[:port]/path" into the client base and the path.
  const auto scheme_end = cfg_.endpoint.find("://");
  if (scheme_end == std::string::npos)
    throw TransportError("endpoint must start with http:// or https://", "");
  const auto path_start = cfg_.endpoint.find('/', scheme_end + 3);
  const std::string base = cfg_.endpoint.substr(0, path_start);
  const std::string path =
      path_start == std::string::npos ? "/" : cfg_.endpoint.substr(path_start);

  httplib::Client client(base);
  if (!client.is_valid()) throw TransportError("unsupported endpoint " + base, "");
  const auto secs = static_cast<time_t>(cfg_.timeout_s);
  const auto usecs = static_cast<time_t>((cfg_.timeout_s - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  const Json body = {{"model", cfg_.model}, {"messages", messages_to_json(messages)},
                     {"temperature", 0}};
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  const auto res = client.Post(path, headers, body.dump(), "application/json");
  if (!res) throw TransportError("request failed: " + httplib::to_string(res.error()), "");
  if (res->status != 200)
    throw TransportError("endpoint answered HTTP " + std::to_string(res->status), res->body);
  try {
    return Json::parse(res->body).at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const Json::exception& e) {
    throw TransportError(std::string("malformed completion response: ") + e.what(), res->body);
  }
}

// --- fixtures --------------------------------------------------------------------------

ReplayCompletionClient::ReplayCompletionClient(const Json& fixture) {
  try {
    for (const Json& ex : fixture.at("exchanges"))
      exchanges_.emplace_back(messages_from_json(ex.at("request")),
                              ex.at("response").get<std::string>());
  } catch (const Json::exception& e) {
    throw Error("invalid_fixture", std::string("malformed LLM fixture: ") + e.what());
  }
}

ReplayCompletionClient ReplayCompletionClient::load(const std::filesystem::path& path) {
  return ReplayCompletionClient(parse_json_with_lines(read_text_file(path)).value);
}

std::string ReplayCompletionClient::complete(const std::vector<ChatMessage>& messages) {
  for (const auto& [request, response] : exchanges_)
    if (request == messages) return response;
  throw TransportError("no recorded response for this request", "");
}

std::string RecordingCompletionClient::complete(const std::vector<ChatMessage>& messages) {
  std::string reply = inner_.complete(messages);
  exchanges_.push_back({{"request", messages_to_json(messages)}, {"response", reply}});
  return reply;
}

}  // namespace lgplan
