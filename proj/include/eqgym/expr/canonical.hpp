#pragma once

#include "eqgym/expr/ast.hpp"

namespace eqgym::expr {

// Deterministic normal form used for structural equivalence and hypothesis
// de-duplication.
//
//   * a - b      -> a + (-1)*b,   a / b -> a * b**-1,   -a -> (-1)*a,
//     sqrt(a)    -> a**0.5
//   * nested sums and products are flattened, like terms (same non-numeric
//     part) and like factors (same base, numeric exponents) are combined,
//     numeric subtrees are folded, identities (x*1, x+0, x**1) dropped
//   * operands are sorted by (node kind, identifier, rendered text) and
//     rebuilt as a left-leaning chain
//
// Rewrites never shrink the set of bindings on which the expression is
// defined, and only extend it in the cases noted in canonical.cpp
// (overflow is not tracked). Idempotent.
Expression canonicalize(const Expression& e);

}  // namespace eqgym::expr
