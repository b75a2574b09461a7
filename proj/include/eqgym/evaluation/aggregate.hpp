#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eqgym/environment/spec.hpp"
#include "eqgym/session/records.hpp"

namespace eqgym::eval {

struct DifficultyProfile {
  std::size_t equation_length = 0;  // characters of the rendered canonical ground truth
  std::size_t variable_count = 0;
  std::string group;  // "1-3", "4-6", "7-9" or "10+"
};

std::string difficulty_group(std::size_t variable_count);
DifficultyProfile difficulty(const env::EnvironmentSpec& spec);

// Distinct canonical forms among parsed records; unparsed records count
// once per distinct raw text.
std::size_t unique_hypotheses(std::span<const session::HypothesisRecord> records);

// The per-run facts aggregation needs; produced by the harness for each
// transcript.
struct RunSummary {
  std::string env_id;
  std::string agent;
  std::string level;
  std::size_t replicate = 0;
  bool solved = false;
  std::string status;
  std::size_t experiments = 0;
  std::size_t tests = 0;
  std::size_t turns = 0;
  std::size_t unique_hypotheses = 0;
  std::size_t total_hypotheses = 0;
  std::size_t variable_count = 0;
  std::string group;
};

struct EfficiencyReport {
  std::optional<double> iteration_efficiency;   // mean turns on solved runs
  std::optional<double> sample_efficiency;      // mean experiments on solved runs
  std::optional<double> hypothesis_efficiency;  // mean distinct hypotheses before the final one
};

struct GroupRow {
  std::string agent;
  std::string level;  // or difficulty group in by-difficulty tables
  std::size_t runs = 0;
  std::size_t solved = 0;
  double success_rate = 0.0;
  // Means over solved runs only; absent when nothing was solved.
  std::optional<double> experiments;
  std::optional<double> tests;
  std::optional<double> turns;
  std::optional<double> unique_hypotheses;
  std::optional<double> total_hypotheses;
  EfficiencyReport efficiency;
};

struct AggregateReport {
  std::vector<GroupRow> by_level;       // agent x level, sorted
  std::vector<GroupRow> by_difficulty;  // agent x (level, group) rows carry "L1/4-6" style keys
  // agent -> env -> levels solved
  std::map<std::string, std::map<std::string, std::set<std::string>>> solved_levels;
};

// Order-independent in `runs`.
AggregateReport aggregate(std::span<const RunSummary> runs);

}  // namespace eqgym::eval
