#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>

namespace eqgym::expr {

enum class ScaleHint { kLinear, kLog };

std::string_view scale_hint_name(ScaleHint s);

// Admissible values of one variable: an interval with optionally open ends.
struct VariableDomain {
  double lower = 0.0;
  double upper = 1.0;
  bool open_lower = false;
  bool open_upper = false;
  ScaleHint scale_hint = ScaleHint::kLinear;

  bool contains(double v) const;
  // Throws std::invalid_argument when lower >= upper, bounds are not finite,
  // or a log hint is given for a non-positive lower bound.
  void validate() const;

  friend bool operator==(const VariableDomain&, const VariableDomain&) = default;
};

using DomainMap = std::map<std::string, VariableDomain, std::less<>>;

// Platform-independent uniform draw in [0, 1) from a 64-bit engine.
inline double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Draw used by the equivalence oracle: log-uniform when the domain is
// positive and spans more than two decades, otherwise uniform. Open
// endpoints are never returned.
double sample_for_equivalence(const VariableDomain& d, std::mt19937_64& rng);

// Draw that follows the declared scale_hint instead (used by scripted agents).
double sample_by_hint(const VariableDomain& d, std::mt19937_64& rng);

}  // namespace eqgym::expr
