#include <fstream>

#include <httplib.h>
#include <json.hpp>

#include "molopt/agent.hpp"

namespace molopt {

std::string to_string(Message::Role role) {
  switch (role) {
    case Message::Role::System: return "system";
    case Message::Role::User: return "user";
    case Message::Role::Assistant: return "assistant";
  }
  return "user";
}

void Conversation::append(Message::Role role, std::string text) {
  token_estimate += static_cast<long>(text.size() / 4) + 1;
  messages.push_back({role, std::move(text)});
}

ScriptedMockClient ScriptedMockClient::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mock script: " + path);
  std::vector<std::string> replies;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::string unescaped;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '\\' && i + 1 < line.size() && line[i + 1] == 'n') {
        unescaped += '\n';
        ++i;
      } else {
        unescaped += line[i];
      }
    }
    replies.push_back(std::move(unescaped));
  }
  return ScriptedMockClient(std::move(replies));
}

std::string ScriptedMockClient::complete(const Conversation&) {
  if (next_ >= replies_.size())
    throw TransportError("mock script exhausted after " + std::to_string(next_) + " replies");
  return replies_[next_++];
}

std::string HttpChatClient::complete(const Conversation& conversation) {
  auto scheme = config_.endpoint.find("://");
  std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
  auto slash = config_.endpoint.find('/', host_start);
  std::string base = slash == std::string::npos ? config_.endpoint
                                                : config_.endpoint.substr(0, slash);
  std::string path = slash == std::string::npos ? "/" : config_.endpoint.substr(slash);

  httplib::Client client(base);
  auto seconds = static_cast<time_t>(config_.timeout_s);
  client.set_read_timeout(seconds, 0);
  client.set_connection_timeout(seconds, 0);
  client.set_write_timeout(seconds, 0);

  nlohmann::json body;
  body["model"] = config_.model;
  auto& messages = body["messages"] = nlohmann::json::array();
  for (const Message& m : conversation.messages)
    messages.push_back({{"role", to_string(m.role)}, {"content", m.text}});
  if (config_.temperature >= 0) body["temperature"] = config_.temperature;
  if (config_.top_p >= 0) body["top_p"] = config_.top_p;
  if (config_.max_tokens > 0) body["max_tokens"] = config_.max_tokens;

  httplib::Headers headers;
  if (!config_.api_key.empty())
    headers.emplace("Authorization", "Bearer " + config_.api_key);

  auto res = client.Post(path, headers, body.dump(), "application/json");
  if (!res) throw TransportError("LLM endpoint unreachable: " + config_.endpoint);
  if (res->status != 200)
    throw TransportError("LLM endpoint returned status " + std::to_string(res->status));
  try {
    auto parsed = nlohmann::json::parse(res->body);
    return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("malformed LLM response: ") + e.what());
  }
}

}  // namespace molopt
