#include "eqgym/harness/plan.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <thread>

namespace eqgym::harness {

std::optional<env::PriorMask> parse_level_token(std::string_view token) {
  if (auto m = env::PriorMask::parse_level(token)) return m;
  constexpr std::string_view prefix = "custom:";
  if (token.substr(0, prefix.size()) != prefix || token.size() != prefix.size() + 3) return std::nullopt;
  bool bits[3];
  for (int i = 0; i < 3; ++i) {
    char c = token[prefix.size() + static_cast<std::size_t>(i)];
    if (c != 'T' && c != 'F') return std::nullopt;
    bits[i] = c == 'T';
  }
  return env::PriorMask{bits[0], bits[1], bits[2]};
}

std::uint64_t fnv1a(std::string_view data, std::uint64_t h) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t cell_seed(std::uint64_t plan_seed, std::string_view env_id, std::string_view level,
                        std::string_view agent_label, std::size_t replicate) {
  // Fields are separated by a byte that cannot occur in any of them.
  std::string key = std::to_string(plan_seed);
  for (std::string_view part : {env_id, level, agent_label}) {
    key += '\x1f';
    key += part;
  }
  key += '\x1f';
  key += std::to_string(replicate);
  return fnv1a(key);
}

ResolvedPlan resolve(const RunPlan& plan) {
  ResolvedPlan r;
  r.plan = plan;
  if (plan.env_paths.empty()) throw PlanError("no environments given");
  if (plan.levels.empty()) throw PlanError("no prior levels given");
  if (plan.agents.empty()) throw PlanError("no agents given");
  if (plan.replicates == 0) throw PlanError("replicates must be at least 1");
  if (plan.quotas.experiments == 0 || plan.quotas.tests == 0) throw PlanError("quotas must be positive");
  if (plan.max_turns == 0) throw PlanError("max_turns must be positive");

  std::set<std::string> ids;
  for (const auto& path : plan.env_paths) {
    std::vector<env::EnvironmentSpec> specs;
    try {
      specs = env::load_specs(path);
    } catch (const std::exception& e) {
      throw PlanError("cannot load environments from " + path + ": " + e.what());
    }
    for (auto& s : specs) {
      if (!ids.insert(s.id).second) throw PlanError("duplicate environment id '" + s.id + "'");
      r.envs.push_back(std::make_shared<env::EnvironmentSpec>(std::move(s)));
    }
  }
  if (r.envs.empty()) throw PlanError("environment set is empty");

  std::vector<std::pair<std::string, env::PriorMask>> levels;
  for (const auto& token : plan.levels) {
    auto m = parse_level_token(token);
    if (!m) throw PlanError("unknown prior level '" + token + "'");
    for (const auto& [seen, mask] : levels) {
      if (seen == token) throw PlanError("prior level '" + token + "' listed twice");
    }
    levels.emplace_back(token, *m);
  }
  bool any_http = false;
  for (const auto& a : plan.agents) {
    try {
      agents::validate(a);
    } catch (const std::exception& e) {
      throw PlanError(std::string("bad agent config: ") + e.what());
    }
    any_http = any_http || a.kind == agents::AgentKind::kHttp;
  }
  std::set<std::string> labels;
  for (const auto& a : plan.agents) {
    if (!labels.insert(a.label()).second) throw PlanError("agent '" + a.label() + "' listed twice");
  }

  std::string digest = std::to_string(plan.seed) + "|" + std::to_string(plan.replicates) + "|" +
                       std::to_string(plan.quotas.experiments) + "|" + std::to_string(plan.quotas.tests) + "|" +
                       std::to_string(plan.max_turns) + "|" + (plan.expose_dummies ? "D" : "-");
  for (const auto& e : r.envs) digest += "|" + e->id + "=" + expr::render(e->ground_truth);
  for (const auto& [label, m] : levels) digest += "|" + label;
  for (const auto& a : plan.agents) digest += "|" + a.label();
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a(digest)));
  r.hash = hex;

  for (const auto& e : r.envs) {
    for (const auto& [label, mask] : levels) {
      for (std::size_t a = 0; a < plan.agents.size(); ++a) {
        for (std::size_t rep = 0; rep < plan.replicates; ++rep) {
          Cell c;
          c.index = r.cells.size();
          c.env = e;
          c.level = label;
          c.mask = mask;
          c.agent = a;
          c.replicate = rep;
          c.seed = cell_seed(plan.seed, e->id, label, plan.agents[a].label(), rep);
          r.cells.push_back(std::move(c));
        }
      }
    }
  }

  std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  r.parallelism = plan.parallelism ? plan.parallelism : hw;
  if (any_http && !plan.parallelism) r.parallelism = std::min<std::size_t>(r.parallelism, 8);
  r.parallelism = std::min(r.parallelism, r.cells.size());
  return r;
}

}  // namespace eqgym::harness
