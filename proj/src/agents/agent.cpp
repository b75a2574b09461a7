#include "eqgym/agents/agent.hpp"

#include <cmath>

#include "eqgym/agents/protocol.hpp"
#include "eqgym/agents/scripted.hpp"

namespace eqgym::agents {

Briefing make_briefing(const env::ObservationHeader& header) {
  Briefing b;
  for (const auto& c : header.controllables) b.controllables.emplace_back(c.name, c.domain);
  return b;
}

std::string AgentConfig::label() const {
  switch (kind) {
    case AgentKind::kScripted: return "scripted:" + name;
    case AgentKind::kSubprocess: return "subprocess:" + (name.empty() ? command : name);
    case AgentKind::kHttp: return "http:" + (name.empty() ? http.model : name);
  }
  return name;
}

AgentConfig parse_agent_spec(const std::string& spec) {
  auto colon = spec.find(':');
  if (colon == std::string::npos) throw AgentConfigError("agent spec needs a kind prefix: " + spec);
  std::string kind = spec.substr(0, colon), rest = spec.substr(colon + 1);
  if (rest.empty()) throw AgentConfigError("empty agent spec: " + spec);
  AgentConfig c;
  if (kind == "scripted") {
    c.kind = AgentKind::kScripted;
    c.name = rest;
  } else if (kind == "subprocess") {
    c.kind = AgentKind::kSubprocess;
    c.command = rest;
  } else if (kind == "http") {
    c.kind = AgentKind::kHttp;
    c.http.endpoint = rest;
  } else {
    throw AgentConfigError("unknown agent kind '" + kind + "'");
  }
  validate(c);
  return c;
}

void validate(const AgentConfig& c) {
  switch (c.kind) {
    case AgentKind::kScripted:
      if (c.name != "random" && c.name != "power_law") throw AgentConfigError("unknown scripted agent '" + c.name + "'");
      break;
    case AgentKind::kSubprocess:
      if (c.command.empty()) throw AgentConfigError("subprocess agent needs a command");
      break;
    case AgentKind::kHttp:
      parse_url(c.http.endpoint);
      if (!(c.http.temperature >= 0.0 && c.http.temperature <= 2.0)) {
        throw AgentConfigError("temperature must lie in [0, 2]");
      }
      if (c.http.max_tokens <= 0) throw AgentConfigError("max_tokens must be positive");
      break;
  }
}

std::unique_ptr<Agent> make_agent(const AgentConfig& c, std::uint64_t seed) {
  validate(c);
  switch (c.kind) {
    case AgentKind::kScripted:
      if (c.name == "random") return std::make_unique<ScriptedRandom>(seed);
      return std::make_unique<ScriptedPowerLaw>();
    case AgentKind::kSubprocess:
      return std::make_unique<SubprocessAgent>(c.command, c.subprocess_timeout);
    case AgentKind::kHttp:
      return std::make_unique<HttpAgent>(c.http);
  }
  throw AgentConfigError("unsupported agent kind");
}

namespace {

void require_finite(const session::AgentTurn& t) {
  for (const auto& e : t.next_experiments) {
    for (const auto& [name, v] : e) {
      if (!std::isfinite(v)) throw session::MalformedTurn("non-finite value for " + name);
    }
  }
}

}  // namespace

void drive(session::Session& s, Agent& agent, std::size_t retry_budget) {
  try {
    agent.brief(make_briefing(s.header()));
  } catch (const std::exception& e) {
    s.fail_protocol(std::string("agent setup failed: ") + e.what());
    return;
  }
  while (s.active()) {
    auto packet = s.observation_packet();
    auto start = std::chrono::steady_clock::now();
    std::optional<session::AgentTurn> turn;
    std::string last_error;
    for (std::size_t attempt = 0; attempt <= retry_budget && !turn; ++attempt) {
      try {
        auto t = agent.act(packet);
        require_finite(t);
        turn = std::move(t);
      } catch (const session::MalformedTurn& e) {
        last_error = e.what();
        packet.notices.push_back("previous reply rejected: " + last_error);
      } catch (const std::exception& e) {
        s.fail_protocol(std::string("agent failed: ") + e.what());
        return;
      }
    }
    if (!turn) {
      s.fail_protocol("no valid turn after " + std::to_string(retry_budget + 1) + " attempts: " + last_error);
      return;
    }
    s.submit_turn(*turn);
    s.record_turn_seconds(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
}

}  // namespace eqgym::agents
