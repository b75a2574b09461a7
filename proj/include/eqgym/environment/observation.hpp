#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "eqgym/environment/spec.hpp"

namespace eqgym::env {

inline constexpr std::string_view kUnknownContext = "Unknown context.";
inline constexpr std::string_view kControllablePlaceholder = "A controllable physical quantity.";
inline constexpr std::string_view kObservablePlaceholder = "An observable physical quantity.";

struct PriorMask {
  bool show_context = true;
  bool show_descriptions = true;
  bool show_names = true;

  // level in 1..4; throws std::out_of_range otherwise.
  static PriorMask level(int level);
  // "L1".."L4"; std::nullopt for anything else.
  static std::optional<PriorMask> parse_level(std::string_view token);
  // "L1".."L4" for the presets, else "custom:<ctx><desc><names>" with T/F.
  std::string label() const;

  friend bool operator==(const PriorMask&, const PriorMask&) = default;
};

struct DisplayVariable {
  std::string name;  // what the agent sees
  std::string description;
  std::string true_name;
  expr::VariableDomain domain;
  bool dummy = false;  // exposed dummy: accepted but has no effect
};

struct ObservationHeader {
  std::string problem_description;
  std::vector<DisplayVariable> controllables;  // declaration order
  DisplayVariable observable;
  std::map<std::string, std::string> name_map;  // display -> true; platform-internal

  const DisplayVariable* find_controllable(std::string_view display_name) const;
};

struct ObservationOptions {
  // List dummies as controllables with no effect on the output.
  bool expose_dummies = false;
};

// Hidden names become var_1..var_n (inputs, then exposed dummies) and
// var_out. When names are hidden but prose is shown (custom masks), every
// true-name token in that prose is replaced by its display name.
ObservationHeader render_observation(const EnvironmentSpec& spec, const PriorMask& mask,
                                     const ObservationOptions& options = {});

// Identifier tokens of `text` (maximal [A-Za-z_][A-Za-z0-9_]* runs not
// preceded by a letter, digit, underscore or dot).
std::vector<std::string> identifier_tokens(std::string_view text);

// True names (inputs, output, dummies) that occur as identifier tokens of `text`.
std::set<std::string> leaked_names(const EnvironmentSpec& spec, std::string_view text);

}  // namespace eqgym::env
