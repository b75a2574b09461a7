#include <algorithm>

#include "eqgym/agents/scripted.hpp"

namespace eqgym::agents {

session::AgentTurn ScriptedRandom::act(const session::ObservationPacket& packet) {
  session::AgentTurn turn;
  std::size_t n = std::min(batch_, packet.quota.experiments_quota);
  for (std::size_t i = 0; i < n; ++i) {
    session::NamedValues e;
    for (const auto& [name, domain] : briefing_.controllables) e.emplace_back(name, expr::sample_by_hint(domain, rng_));
    turn.next_experiments.push_back(std::move(e));
  }
  return turn;
}

}  // namespace eqgym::agents
