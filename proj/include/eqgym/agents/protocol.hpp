#pragma once

#include <chrono>
#include <string>
#include <string_view>
#include <sys/types.h>

#include "eqgym/agents/agent.hpp"

namespace eqgym::agents {

// The researcher prompt text, verbatim.
std::string_view researcher_prompt();

// Prompt sent to chat endpoints: the researcher prompt followed by the
// packet as a fenced, indented JSON document.
std::string render_prompt(const session::ObservationPacket& packet);

// Runs `command` under /bin/sh. Each act writes the packet as one line to
// the child's stdin and reads one line back.
class SubprocessAgent : public Agent {
 public:
  SubprocessAgent(std::string command, std::chrono::milliseconds timeout);
  ~SubprocessAgent() override;
  SubprocessAgent(const SubprocessAgent&) = delete;
  SubprocessAgent& operator=(const SubprocessAgent&) = delete;

  session::AgentTurn act(const session::ObservationPacket& packet) override;

 private:
  void write_line(const std::string& line);
  std::string read_line();
  void shutdown();

  std::string command_;
  std::chrono::milliseconds timeout_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

struct ParsedUrl {
  std::string scheme;  // "http" or "https"
  std::string host;
  int port = 0;
  std::string path;
};

// Throws AgentConfigError on anything but http(s)://host[:port][/path].
ParsedUrl parse_url(const std::string& url);

// Request body for a chat-completion endpoint.
session::Json chat_request(const HttpSettings& settings, const std::string& prompt);
// Assistant text of a chat-completion response; throws MalformedTurn.
std::string chat_reply_text(const session::Json& response);

class HttpAgent : public Agent {
 public:
  explicit HttpAgent(HttpSettings settings);
  session::AgentTurn act(const session::ObservationPacket& packet) override;

 private:
  HttpSettings settings_;
  ParsedUrl url_;
};

}  // namespace eqgym::agents
