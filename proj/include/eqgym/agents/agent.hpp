#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eqgym/expr/domain.hpp"
#include "eqgym/session/session.hpp"
#include "eqgym/session/wire.hpp"

namespace eqgym::agents {

// Subprocess or HTTP failure; not retried.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateDesign : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AgentConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Allowed ranges of the controllables under their display names. Scripted
// agents use it to stay in-domain; protocol agents ignore it.
struct Briefing {
  std::vector<std::pair<std::string, expr::VariableDomain>> controllables;
};

Briefing make_briefing(const env::ObservationHeader& header);

class Agent {
 public:
  virtual ~Agent() = default;
  virtual void brief(const Briefing&) {}
  // Throws session::MalformedTurn for unusable replies, TransportError when
  // the agent cannot be reached.
  virtual session::AgentTurn act(const session::ObservationPacket& packet) = 0;
};

enum class AgentKind { kScripted, kSubprocess, kHttp };

struct HttpSettings {
  std::string endpoint;  // full URL of a chat-completion endpoint
  std::string model;
  double temperature = 0.3;
  int max_tokens = 4096;
  std::string api_key_env;  // name of the variable holding the key; may be empty
  std::chrono::seconds timeout{120};
};

struct AgentConfig {
  AgentKind kind = AgentKind::kScripted;
  std::string name;     // scripted agent name, or a label for the others
  std::string command;  // subprocess only
  HttpSettings http;
  std::size_t retry_budget = 3;
  std::chrono::seconds subprocess_timeout{120};

  // Label used in run logs and seeding, e.g. "scripted:power_law".
  std::string label() const;
};

// Parses "scripted:<name>", "subprocess:<command>" or "http:<url>".
AgentConfig parse_agent_spec(const std::string& spec);
void validate(const AgentConfig& config);

// One instance per session.
std::unique_ptr<Agent> make_agent(const AgentConfig& config, std::uint64_t seed);

// Plays `session` to completion. Malformed replies are retried with a
// notice appended to the packet; once the budget is spent, or on a
// transport failure, the session ends as a protocol failure.
void drive(session::Session& session, Agent& agent, std::size_t retry_budget);

}  // namespace eqgym::agents
