#include "eqgym/environment/observation.hpp"

#include <stdexcept>

namespace eqgym::env {

PriorMask PriorMask::level(int level) {
  switch (level) {
    case 1: return {true, true, true};
    case 2: return {false, true, true};
    case 3: return {false, false, true};
    case 4: return {false, false, false};
  }
  throw std::out_of_range("prior level must be 1..4, got " + std::to_string(level));
}

std::optional<PriorMask> PriorMask::parse_level(std::string_view token) {
  if (token.size() == 2 && (token[0] == 'L' || token[0] == 'l') && token[1] >= '1' && token[1] <= '4') {
    return level(token[1] - '0');
  }
  return std::nullopt;
}

std::string PriorMask::label() const {
  for (int l = 1; l <= 4; ++l) {
    if (*this == level(l)) return "L" + std::to_string(l);
  }
  auto tf = [](bool b) { return b ? 'T' : 'F'; };
  return std::string("custom:") + tf(show_context) + tf(show_descriptions) + tf(show_names);
}

const DisplayVariable* ObservationHeader::find_controllable(std::string_view display_name) const {
  for (const auto& v : controllables) {
    if (v.name == display_name) return &v;
  }
  return nullptr;
}

namespace {

bool ident_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

bool ident_head(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; }

// Calls fn(begin, end) for each identifier token of `text`.
template <typename Fn>
void for_each_token(std::string_view text, Fn fn) {
  std::size_t i = 0;
  while (i < text.size()) {
    if (!ident_char(text[i])) {
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < text.size() && ident_char(text[i])) ++i;
    bool attached = start > 0 && text[start - 1] == '.';
    if (ident_head(text[start]) && !attached) fn(start, i);
  }
}

std::string substitute_tokens(std::string_view text, const std::map<std::string, std::string, std::less<>>& renames) {
  std::string out;
  std::size_t copied = 0;
  for_each_token(text, [&](std::size_t b, std::size_t e) {
    auto it = renames.find(text.substr(b, e - b));
    if (it == renames.end()) return;
    out.append(text.substr(copied, b - copied));
    out += it->second;
    copied = e;
  });
  out.append(text.substr(copied));
  return out;
}

}  // namespace

std::vector<std::string> identifier_tokens(std::string_view text) {
  std::vector<std::string> out;
  for_each_token(text, [&](std::size_t b, std::size_t e) { out.emplace_back(text.substr(b, e - b)); });
  return out;
}

std::set<std::string> leaked_names(const EnvironmentSpec& spec, std::string_view text) {
  std::set<std::string, std::less<>> names;
  for (const auto& v : spec.inputs) names.insert(v.name);
  names.insert(spec.output.name);
  for (const auto& v : spec.dummies) names.insert(v.name);
  std::set<std::string> out;
  for_each_token(text, [&](std::size_t b, std::size_t e) {
    auto it = names.find(text.substr(b, e - b));
    if (it != names.end()) out.insert(*it);
  });
  return out;
}

ObservationHeader render_observation(const EnvironmentSpec& spec, const PriorMask& mask,
                                     const ObservationOptions& options) {
  ObservationHeader h;
  std::map<std::string, std::string, std::less<>> renames;  // true -> display

  std::size_t index = 0;
  auto add = [&](const VariableSpec& v, bool dummy) {
    DisplayVariable d;
    d.true_name = v.name;
    d.name = mask.show_names ? v.name : "var_" + std::to_string(++index);
    d.description = mask.show_descriptions ? v.description : std::string(kControllablePlaceholder);
    d.domain = v.domain.value_or(kDefaultDummyDomain);
    d.dummy = dummy;
    renames[v.name] = d.name;
    h.controllables.push_back(std::move(d));
  };
  for (const auto& v : spec.inputs) add(v, false);
  if (options.expose_dummies) {
    for (const auto& v : spec.dummies) add(v, true);
  }

  h.observable.true_name = spec.output.name;
  h.observable.name = mask.show_names ? spec.output.name : "var_out";
  h.observable.description = mask.show_descriptions ? spec.output.description : std::string(kObservablePlaceholder);
  if (spec.output.domain) h.observable.domain = *spec.output.domain;
  renames[spec.output.name] = h.observable.name;

  h.problem_description = mask.show_context ? spec.context : std::string(kUnknownContext);

  if (!mask.show_names) {
    // Dummies that are not exposed are still hidden from any visible prose.
    std::size_t hidden = 0;
    for (const auto& v : spec.dummies) {
      if (!renames.count(v.name)) renames[v.name] = "dummy_" + std::to_string(++hidden);
    }
    if (mask.show_context) h.problem_description = substitute_tokens(h.problem_description, renames);
    if (mask.show_descriptions) {
      for (auto& c : h.controllables) c.description = substitute_tokens(c.description, renames);
      h.observable.description = substitute_tokens(h.observable.description, renames);
    }
  }

  for (const auto& c : h.controllables) h.name_map[c.name] = c.true_name;
  h.name_map[h.observable.name] = h.observable.true_name;
  return h;
}

}  // namespace eqgym::env
