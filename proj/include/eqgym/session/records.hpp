#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eqgym/evaluation/metrics.hpp"
#include "eqgym/expr/ast.hpp"
#include "eqgym/expr/equivalence.hpp"

namespace eqgym::session {

struct ExperimentRecord {
  std::size_t turn_index = 0;
  // Display names in controllable declaration order.
  std::vector<std::pair<std::string, double>> assignment;
  std::optional<double> output;  // absent for invalid experiments
  std::string invalid_reason;

  bool valid() const { return output.has_value(); }
};

struct OracleResult {
  eval::FitReport fit;
  expr::EquivalenceVerdict verdict;
};

struct HypothesisRecord {
  std::size_t turn_index = 0;
  std::string formula_text;
  std::optional<expr::Expression> parsed;  // in display names
  std::string parse_error;                 // set when parsed is absent
  bool tested = false;
  std::optional<OracleResult> oracle;
};

}  // namespace eqgym::session
