#include <cstdlib>
#include <regex>

#include <httplib.h>

#include "eqgym/agents/protocol.hpp"

namespace eqgym::agents {

namespace detail {
extern const std::string_view kResearcherPrompt;
}

std::string_view researcher_prompt() { return detail::kResearcherPrompt; }

std::string render_prompt(const session::ObservationPacket& packet) {
  std::string out(researcher_prompt());
  out += "\n\n# Current Input\n```json\n";
  out += session::to_json(packet).dump(2);
  out += "\n```\n";
  return out;
}

ParsedUrl parse_url(const std::string& url) {
  static const std::regex re(R"(^(https?)://([A-Za-z0-9.\-]+|\[[0-9A-Fa-f:]+\])(?::([0-9]{1,5}))?(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw AgentConfigError("not an http(s) URL: " + url);
  ParsedUrl u;
  u.scheme = m[1];
  u.host = m[2];
  u.port = m[3].matched ? std::stoi(m[3]) : (u.scheme == "https" ? 443 : 80);
  u.path = m[4].matched ? std::string(m[4]) : "/";
  if (u.port <= 0 || u.port > 65535) throw AgentConfigError("bad port in " + url);
  return u;
}

session::Json chat_request(const HttpSettings& s, const std::string& prompt) {
  session::Json j = session::Json::object();
  j["model"] = s.model;
  j["temperature"] = s.temperature;
  j["max_tokens"] = s.max_tokens;
  j["messages"] = session::Json::array({session::Json::object({{"role", "user"}, {"content", prompt}})});
  return j;
}

std::string chat_reply_text(const session::Json& r) {
  auto choices = r.find("choices");
  if (choices == r.end() || !choices->is_array() || choices->empty()) {
    throw session::MalformedTurn("response has no choices");
  }
  const auto& first = (*choices)[0];
  auto msg = first.find("message");
  if (msg == first.end() || !msg->is_object()) throw session::MalformedTurn("response choice has no message");
  auto content = msg->find("content");
  if (content == msg->end() || !content->is_string()) throw session::MalformedTurn("response message has no text");
  return content->get<std::string>();
}

HttpAgent::HttpAgent(HttpSettings settings) : settings_(std::move(settings)), url_(parse_url(settings_.endpoint)) {
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (url_.scheme == "https") throw AgentConfigError("built without TLS support; https endpoints are unavailable");
#endif
}

session::AgentTurn HttpAgent::act(const session::ObservationPacket& packet) {
  std::string base = url_.scheme + "://" + url_.host + ":" + std::to_string(url_.port);
  httplib::Client client(base);
  auto secs = settings_.timeout.count();
  client.set_connection_timeout(secs, 0);
  client.set_read_timeout(secs, 0);
  client.set_write_timeout(secs, 0);
  httplib::Headers headers;
  if (!settings_.api_key_env.empty()) {
    const char* key = std::getenv(settings_.api_key_env.c_str());
    if (!key || !*key) throw TransportError("environment variable " + settings_.api_key_env + " is not set");
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  auto body = session::dump(chat_request(settings_, render_prompt(packet)));
  auto res = client.Post(url_.path, headers, body, "application/json");
  if (!res) throw TransportError("request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) throw TransportError("endpoint answered HTTP " + std::to_string(res->status));
  session::Json j = session::Json::parse(res->body, nullptr, false);
  if (j.is_discarded()) throw TransportError("endpoint answered with a non-JSON body");
  return session::extract_turn(chat_reply_text(j));
}

}  // namespace eqgym::agents
