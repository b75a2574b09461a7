#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "eqgym/expr/ast.hpp"
#include "eqgym/expr/domain.hpp"
#include "eqgym/expr/parse.hpp"

namespace eqgym::expr {

enum class EquivalenceMethod { kCanonical, kNumeric, kJudge, kNone };

std::string_view method_name(EquivalenceMethod m);

struct EquivalenceVerdict {
  bool equivalent = false;
  EquivalenceMethod method = EquivalenceMethod::kNone;
  std::size_t points_compared = 0;
  std::optional<double> max_rel_error;
  std::string detail;

  friend bool operator==(const EquivalenceVerdict&, const EquivalenceVerdict&) = default;
};

struct EquivConfig {
  double rel_tol = 1e-6;
  double abs_floor = 1e-12;
  std::size_t n_points = 200;
  std::size_t min_valid_points = 50;
  std::uint64_t seed = 0;
};

class UnboundVariableError : public std::invalid_argument {
 public:
  UnboundVariableError(std::string name, std::string_view which)
      : std::invalid_argument("variable '" + name + "' in " + std::string(which) + " has no declared domain"),
        name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

// Two-stage check: identical canonical forms, else agreement within
// rel_tol * max(|truth|, abs_floor) at every seeded sample point where both
// sides evaluate and all `constraints` hold. Throws UnboundVariableError if
// either side mentions a variable missing from `domains`.
EquivalenceVerdict equivalent(const Expression& hypothesis, const Expression& truth, const DomainMap& domains,
                              const EquivConfig& config, std::span<const Constraint> constraints = {});

}  // namespace eqgym::expr
