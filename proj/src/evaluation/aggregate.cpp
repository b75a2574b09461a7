#include "eqgym/evaluation/aggregate.hpp"

#include <tuple>

#include "eqgym/expr/canonical.hpp"

namespace eqgym::eval {

std::string difficulty_group(std::size_t n) {
  if (n <= 3) return "1-3";
  if (n <= 6) return "4-6";
  if (n <= 9) return "7-9";
  return "10+";
}

DifficultyProfile difficulty(const env::EnvironmentSpec& spec) {
  DifficultyProfile d;
  d.variable_count = spec.inputs.size();
  d.equation_length = expr::render(expr::canonicalize(spec.ground_truth)).size();
  d.group = difficulty_group(d.variable_count);
  return d;
}

std::size_t unique_hypotheses(std::span<const session::HypothesisRecord> records) {
  std::set<std::string> keys;
  for (const auto& r : records) {
    keys.insert(r.parsed ? "c:" + expr::render(expr::canonicalize(*r.parsed)) : "r:" + r.formula_text);
  }
  return keys.size();
}

namespace {

// Integer sums keep the means independent of summation order.
struct Accumulator {
  std::size_t runs = 0, solved = 0;
  std::size_t experiments = 0, tests = 0, turns = 0, unique = 0, total = 0, discarded = 0;

  void add(const RunSummary& r) {
    ++runs;
    if (!r.solved) return;
    ++solved;
    experiments += r.experiments;
    tests += r.tests;
    turns += r.turns;
    unique += r.unique_hypotheses;
    total += r.total_hypotheses;
    discarded += r.unique_hypotheses > 0 ? r.unique_hypotheses - 1 : 0;
  }

  GroupRow row(const std::string& agent, const std::string& level) const {
    GroupRow g;
    g.agent = agent;
    g.level = level;
    g.runs = runs;
    g.solved = solved;
    g.success_rate = runs ? static_cast<double>(solved) / static_cast<double>(runs) : 0.0;
    if (solved) {
      auto mean = [&](std::size_t s) { return static_cast<double>(s) / static_cast<double>(solved); };
      g.experiments = mean(experiments);
      g.tests = mean(tests);
      g.turns = mean(turns);
      g.unique_hypotheses = mean(unique);
      g.total_hypotheses = mean(total);
      g.efficiency = {mean(turns), mean(experiments), mean(discarded)};
    }
    return g;
  }
};

}  // namespace

AggregateReport aggregate(std::span<const RunSummary> runs) {
  std::map<std::pair<std::string, std::string>, Accumulator> levels;
  std::map<std::pair<std::string, std::string>, Accumulator> groups;
  AggregateReport out;
  for (const auto& r : runs) {
    levels[{r.agent, r.level}].add(r);
    groups[{r.agent, r.level + "/" + r.group}].add(r);
    auto& env_levels = out.solved_levels[r.agent][r.env_id];
    if (r.solved) env_levels.insert(r.level);
  }
  for (const auto& [key, acc] : levels) out.by_level.push_back(acc.row(key.first, key.second));
  for (const auto& [key, acc] : groups) out.by_difficulty.push_back(acc.row(key.first, key.second));
  return out;
}

}  // namespace eqgym::eval
