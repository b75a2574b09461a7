#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "eqgym/agents/agent.hpp"
#include "eqgym/environment/spec.hpp"
#include "eqgym/session/session.hpp"

namespace eqgym::harness {

class PlanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunPlan {
  std::vector<std::string> env_paths;  // files or directories of *.json
  std::vector<std::string> levels{"L1", "L2", "L3", "L4"};  // or "custom:TFT" masks
  std::vector<agents::AgentConfig> agents;
  session::Quotas quotas;
  std::uint64_t seed = 0;
  std::size_t replicates = 1;
  std::size_t parallelism = 0;  // 0 picks the default
  std::size_t max_turns = 50;
  bool expose_dummies = false;
  std::string out_dir;
};

struct Cell {
  std::size_t index = 0;  // position in plan order
  std::shared_ptr<const env::EnvironmentSpec> env;
  std::string level;
  env::PriorMask mask;
  std::size_t agent = 0;  // index into RunPlan::agents
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
};

struct ResolvedPlan {
  RunPlan plan;
  std::vector<std::shared_ptr<const env::EnvironmentSpec>> envs;
  std::vector<Cell> cells;  // env-major, then level, agent, replicate
  std::size_t parallelism = 1;
  std::string hash;  // hex digest of the plan and the environment documents
};

// "L1".."L4" or "custom:" followed by three of T/F (context, descriptions, names).
std::optional<env::PriorMask> parse_level_token(std::string_view token);

// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ULL);

// Depends only on its arguments, so adding cells leaves other seeds alone.
std::uint64_t cell_seed(std::uint64_t plan_seed, std::string_view env_id, std::string_view level,
                        std::string_view agent_label, std::size_t replicate);

// Loads environments and validates everything before any session starts.
ResolvedPlan resolve(const RunPlan& plan);

}  // namespace eqgym::harness
