#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "eqgym/environment/observation.hpp"
#include "eqgym/environment/spec.hpp"
#include "eqgym/evaluation/metrics.hpp"
#include "eqgym/expr/equivalence.hpp"
#include "eqgym/session/records.hpp"

namespace eqgym::eval {

using session::ExperimentRecord;
using session::OracleResult;

// Optional third equivalence stage: receives rendered hypothesis and truth
// (true names) and returns a judgment, or nullopt to abstain. No judge ships
// with the platform.
using EquivalenceJudge = std::function<std::optional<bool>(std::string_view hypothesis, std::string_view truth)>;

struct OracleConfig {
  expr::EquivConfig equivalence;
  EquivalenceJudge judge;  // empty = none
};

// Scores a hypothesis written in display names. Fit covers every valid
// record; a hypothesis failing on more than half of them (or an empty
// history) gets an undefined fit. The verdict compares against the ground
// truth over the environment's input domains (plus exposed dummies) and
// validity constraints.
OracleResult oracle_test(const expr::Expression& hypothesis, const env::EnvironmentSpec& spec,
                         std::span<const ExperimentRecord> history, const env::ObservationHeader& header,
                         const OracleConfig& config);

}  // namespace eqgym::eval
