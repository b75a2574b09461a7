#include "eqgym/evaluation/oracle.hpp"

#include <vector>

#include "eqgym/expr/batch.hpp"

namespace eqgym::eval {

OracleResult oracle_test(const expr::Expression& hypothesis, const env::EnvironmentSpec& spec,
                         std::span<const ExperimentRecord> history, const env::ObservationHeader& header,
                         const OracleConfig& config) {
  expr::Expression h = expr::rename_variables(hypothesis, header.name_map);

  // Fit over the valid records, one column per controllable.
  std::vector<std::string> slots;
  for (const auto& c : header.controllables) slots.push_back(c.true_name);
  std::vector<std::vector<double>> columns(slots.size());
  std::vector<double> observed;
  for (const auto& rec : history) {
    if (!rec.valid()) continue;
    for (std::size_t j = 0; j < slots.size(); ++j) {
      double v = 0.0;
      for (const auto& [name, value] : rec.assignment) {
        if (name == header.controllables[j].name) v = value;
      }
      columns[j].push_back(v);
    }
    observed.push_back(*rec.output);
  }

  OracleResult result;
  const std::size_t n = observed.size();
  if (n == 0) {
    result.fit = undefined_fit(0, 0);
  } else {
    auto batch = expr::CompiledExpression(h, slots).evaluate(columns, n);
    std::vector<double> pred, obs;
    for (std::size_t i = 0; i < n; ++i) {
      if (batch.errors[i] != 0) continue;
      pred.push_back(batch.values[i]);
      obs.push_back(observed[i]);
    }
    std::size_t skipped = n - pred.size();
    result.fit = (pred.empty() || 2 * skipped > n) ? undefined_fit(pred.size(), skipped)
                                                   : fit_report(pred, obs, skipped);
  }

  expr::DomainMap domains = spec.input_domains();
  for (const auto& c : header.controllables) {
    if (c.dummy) domains.emplace(c.true_name, c.domain);
  }
  result.verdict = expr::equivalent(h, spec.ground_truth, domains, config.equivalence, spec.validity);
  if (!result.verdict.equivalent && config.judge) {
    auto judged = config.judge(expr::render(h), expr::render(spec.ground_truth));
    if (judged.value_or(false)) {
      result.verdict.equivalent = true;
      result.verdict.method = expr::EquivalenceMethod::kJudge;
      result.verdict.detail = "external judge";
    }
  }
  return result;
}

}  // namespace eqgym::eval
