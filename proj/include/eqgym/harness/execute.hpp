#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "eqgym/harness/plan.hpp"
#include "eqgym/harness/run_log.hpp"

namespace eqgym::harness {

inline constexpr const char* kRunLogName = "run.jsonl";
inline constexpr const char* kRunRecordName = "run_record.json";

struct CellResult {
  std::size_t index = 0;
  std::string env_id;
  std::string level;
  std::string agent;
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  std::string kind;    // "transcript" or "error"
  std::string status;  // session status, or "error"
  double seconds = 0.0;
};

struct RunRecord {
  std::string plan_hash;
  std::string version;
  std::filesystem::path log_path;
  std::vector<CellResult> cells;  // plan order
  double wall_seconds = 0.0;
};

// Plays one cell and returns its log entry. Never throws for agent or
// session failures; they become protocol_failure transcripts or error
// entries.
Json run_cell(const ResolvedPlan& plan, const Cell& cell);

using Progress = std::function<void(const CellResult&)>;

// Runs every cell on a worker pool. Entries reach the log in plan order as
// soon as their predecessors are done, so the log does not depend on
// scheduling. Timings go to run_record.json only.
RunRecord execute(const ResolvedPlan& plan, const Progress& progress = {});

Json to_json(const RunRecord& r);

}  // namespace eqgym::harness
