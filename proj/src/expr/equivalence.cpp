#include "eqgym/expr/equivalence.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <random>
#include <vector>

#include "eqgym/expr/batch.hpp"
#include "eqgym/expr/canonical.hpp"

namespace eqgym::expr {

std::string_view method_name(EquivalenceMethod m) {
  switch (m) {
    case EquivalenceMethod::kCanonical: return "canonical";
    case EquivalenceMethod::kNumeric: return "numeric";
    case EquivalenceMethod::kJudge: return "judge";
    case EquivalenceMethod::kNone: return "none";
  }
  return "none";
}

namespace {

void require_bound(const Expression& e, const DomainMap& domains, std::string_view which) {
  for (const auto& v : free_variables(e)) {
    if (domains.find(v) == domains.end()) throw UnboundVariableError(v, which);
  }
}

std::string short_number(double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::scientific, 3);
  return std::string(buf.data(), end);
}

}  // namespace

EquivalenceVerdict equivalent(const Expression& hypothesis, const Expression& truth, const DomainMap& domains,
                              const EquivConfig& config, std::span<const Constraint> constraints) {
  require_bound(hypothesis, domains, "hypothesis");
  require_bound(truth, domains, "truth");

  if (canonicalize(hypothesis) == canonicalize(truth)) {
    return {true, EquivalenceMethod::kCanonical, 0, std::nullopt, "canonical forms match"};
  }

  // Columns in DomainMap (sorted-name) order; one RNG stream per call.
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
  for (const auto& [name, _] : domains) {
    names.push_back(name);
    columns.emplace_back(config.n_points);
  }
  std::mt19937_64 rng(config.seed);
  std::size_t slot = 0;
  for (std::size_t p = 0; p < config.n_points; ++p) {
    slot = 0;
    for (const auto& [name, dom] : domains) columns[slot++][p] = sample_for_equivalence(dom, rng);
  }

  const std::size_t n = config.n_points;
  auto h = CompiledExpression(hypothesis, names).evaluate(columns, n);
  auto t = CompiledExpression(truth, names).evaluate(columns, n);

  std::vector<bool> valid(n);
  for (std::size_t i = 0; i < n; ++i) valid[i] = h.errors[i] == 0 && t.errors[i] == 0;
  for (const auto& c : constraints) {
    auto l = CompiledExpression(c.lhs, names).evaluate(columns, n);
    auto r = CompiledExpression(c.rhs, names).evaluate(columns, n);
    for (std::size_t i = 0; i < n; ++i) {
      valid[i] = valid[i] && l.errors[i] == 0 && r.errors[i] == 0 && compare(c.cmp, l.values[i], r.values[i]);
    }
  }

  std::size_t compared = 0;
  bool all_close = true;
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!valid[i]) continue;
    ++compared;
    double scale = std::fmax(std::fabs(t.values[i]), config.abs_floor);
    double diff = std::fabs(h.values[i] - t.values[i]);
    if (!(diff <= config.rel_tol * scale)) all_close = false;
    worst = std::fmax(worst, diff / scale);
  }

  if (compared < config.min_valid_points) {
    return {false, EquivalenceMethod::kNone, compared, std::nullopt,
            "insufficient domain overlap (" + std::to_string(compared) + " of " + std::to_string(n) +
                " points valid)"};
  }
  std::string detail = "max relative error " + short_number(worst) + " over " + std::to_string(compared) + " points";
  return {all_close, EquivalenceMethod::kNumeric, compared, worst, detail};
}

}  // namespace eqgym::expr
