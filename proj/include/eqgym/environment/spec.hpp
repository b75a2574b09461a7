#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "eqgym/expr/ast.hpp"
#include "eqgym/expr/domain.hpp"
#include "eqgym/expr/eval.hpp"
#include "eqgym/expr/parse.hpp"

namespace eqgym::env {

struct VariableSpec {
  std::string name;
  std::string description;
  // Always present for inputs; optional for the output and dummies.
  std::optional<expr::VariableDomain> domain;
};

struct EnvironmentSpec {
  std::string id;
  std::string context;
  std::string equation;  // source text as written in the file
  expr::Expression ground_truth = expr::Expression::constant(0.0);
  std::vector<VariableSpec> inputs;
  VariableSpec output;
  std::vector<VariableSpec> dummies;
  std::vector<expr::Constraint> validity;
  std::string solution_notes;

  expr::DomainMap input_domains() const;
};

// Missing field or wrong JSON type.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Well-formed document that breaks a spec invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedAssignment : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Parses and validates one JSON environment document.
EnvironmentSpec load_spec(std::string_view document);
EnvironmentSpec load_spec_file(const std::filesystem::path& path);
// A single file, or every *.json file of a directory in filename order.
std::vector<EnvironmentSpec> load_specs(const std::filesystem::path& path);

// Domain used for a dummy variable that declares none.
inline constexpr expr::VariableDomain kDefaultDummyDomain{0.0, 1.0, false, false, expr::ScaleHint::kLinear};

// Runs the ground truth on an assignment keyed by true input names.
// Out-of-domain values and violated validity constraints give
// kOutOfDomain with detail = the variable name or "constraint:<index>"; an
// output outside its declared domain gives detail = the output name.
// Throws MalformedAssignment when the key set differs from the inputs.
expr::EvalOutcome run_experiment(const EnvironmentSpec& spec, const expr::Bindings& assignment);

}  // namespace eqgym::env
