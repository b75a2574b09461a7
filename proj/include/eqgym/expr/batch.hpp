#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "eqgym/expr/ast.hpp"
#include "eqgym/expr/eval.hpp"
#include "eqgym/simd/kernels.hpp"

namespace eqgym::expr {

// An Expression flattened to post-order and evaluated column-wise over many
// binding points at once. Per-lane results match evaluate() bit for bit,
// including which DomainError is reported first.
class CompiledExpression {
 public:
  // `slots[i]` names the variable provided by column i at evaluation time.
  // Variables absent from `slots` report kUnboundVariable on every lane.
  CompiledExpression(const Expression& e, std::vector<std::string> slots);

  struct Result {
    std::vector<double> values;
    std::vector<std::uint8_t> errors;  // 0 = ok, else a DomainError code

    EvalOutcome outcome(std::size_t lane) const;
    std::vector<std::string> unbound;  // names referenced but not bound
  };

  Result evaluate(std::span<const std::vector<double>> columns, std::size_t n,
                  const simd::Kernels& kernels = simd::active_kernels()) const;

  const std::vector<std::string>& slots() const { return slots_; }

 private:
  enum class OpCode : std::uint8_t { kConst, kVar, kUnbound, kUnary, kBinary };
  struct Instr {
    OpCode code;
    std::uint8_t op = 0;  // UnaryOp / BinaryOp
    std::size_t slot = 0;
    double value = 0.0;
  };

  void compile(const Expression& e);

  std::vector<std::string> slots_;
  std::vector<Instr> program_;
  std::vector<std::string> unbound_;
  std::size_t max_depth_ = 0;
};

}  // namespace eqgym::expr
