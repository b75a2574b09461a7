#include "eqgym/environment/spec.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace eqgym::env {

using nlohmann::json;

namespace {

const json& field(const json& obj, const char* key, std::string_view where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(std::string(where) + ": missing field '" + key + "'");
  return *it;
}

std::string text_field(const json& obj, const char* key, std::string_view where) {
  const json& v = field(obj, key, where);
  if (!v.is_string()) throw SchemaError(std::string(where) + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

std::string optional_text(const json& obj, const char* key, std::string_view where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return {};
  if (!it->is_string()) throw SchemaError(std::string(where) + ": field '" + key + "' must be a string");
  return it->get<std::string>();
}

double number_field(const json& obj, const char* key, std::string_view where) {
  const json& v = field(obj, key, where);
  if (!v.is_number()) throw SchemaError(std::string(where) + ": field '" + key + "' must be a number");
  return v.get<double>();
}

bool optional_bool(const json& obj, const char* key, std::string_view where) {
  auto it = obj.find(key);
  if (it == obj.end()) return false;
  if (!it->is_boolean()) throw SchemaError(std::string(where) + ": field '" + key + "' must be a boolean");
  return it->get<bool>();
}

expr::VariableDomain parse_domain(const json& d, const std::string& where) {
  if (!d.is_object()) throw SchemaError(where + ": domain must be an object");
  expr::VariableDomain out;
  out.lower = number_field(d, "lower", where);
  out.upper = number_field(d, "upper", where);
  out.open_lower = optional_bool(d, "open_lower", where);
  out.open_upper = optional_bool(d, "open_upper", where);
  std::string hint = optional_text(d, "scale_hint", where);
  if (hint.empty() || hint == "linear") {
    out.scale_hint = expr::ScaleHint::kLinear;
  } else if (hint == "log") {
    out.scale_hint = expr::ScaleHint::kLog;
  } else {
    throw SchemaError(where + ": scale_hint must be \"linear\" or \"log\"");
  }
  try {
    out.validate();
  } catch (const std::invalid_argument& e) {
    throw ValidationError(where + ": " + e.what());
  }
  return out;
}

VariableSpec parse_variable(const json& v, const std::string& where, bool domain_required) {
  if (!v.is_object()) throw SchemaError(where + ": variable must be an object");
  VariableSpec out;
  out.name = text_field(v, "name", where);
  out.description = text_field(v, "description", where);
  if (!expr::is_identifier(out.name)) throw ValidationError(where + ": invalid variable name '" + out.name + "'");
  if (out.description.empty()) throw ValidationError(where + ": empty description for '" + out.name + "'");
  auto it = v.find("domain");
  if (it != v.end() && !it->is_null()) {
    out.domain = parse_domain(*it, where + " '" + out.name + "'");
  } else if (domain_required) {
    throw SchemaError(where + ": missing field 'domain' for '" + out.name + "'");
  }
  return out;
}

std::vector<VariableSpec> parse_variable_list(const json& doc, const char* key, bool required, bool domain_required) {
  auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) {
    if (required) throw SchemaError(std::string("missing field '") + key + "'");
    return {};
  }
  if (!it->is_array()) throw SchemaError(std::string("field '") + key + "' must be a list");
  std::vector<VariableSpec> out;
  for (const auto& v : *it) out.push_back(parse_variable(v, key, domain_required));
  return out;
}

}  // namespace

expr::DomainMap EnvironmentSpec::input_domains() const {
  expr::DomainMap out;
  for (const auto& v : inputs) out.emplace(v.name, *v.domain);
  return out;
}

EnvironmentSpec load_spec(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("not a JSON document: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("environment document must be a JSON object");

  EnvironmentSpec spec;
  spec.id = text_field(doc, "id", "environment");
  if (spec.id.empty()) throw ValidationError("environment: empty id");
  spec.context = text_field(doc, "context", spec.id);
  spec.equation = text_field(doc, "equation", spec.id);
  spec.inputs = parse_variable_list(doc, "input_variables", true, true);
  if (spec.inputs.empty()) throw ValidationError(spec.id + ": no input variables");
  spec.output = parse_variable(field(doc, "output_variable", spec.id), "output_variable", false);
  spec.dummies = parse_variable_list(doc, "dummy_variables", false, false);
  spec.solution_notes = optional_text(doc, "solution_notes", spec.id);

  try {
    spec.ground_truth = expr::parse(spec.equation);
  } catch (const expr::ParseError& e) {
    throw ValidationError(spec.id + ": equation does not parse: " + e.what());
  }

  std::set<std::string> names;
  auto claim = [&](const std::string& n) {
    if (!names.insert(n).second) throw ValidationError(spec.id + ": variable name '" + n + "' declared twice");
    // Anonymized display names are drawn from these prefixes.
    if (n.rfind("var_", 0) == 0 || n.rfind("dummy_", 0) == 0) {
      throw ValidationError(spec.id + ": variable name '" + n + "' uses a reserved prefix");
    }
  };
  for (const auto& v : spec.inputs) claim(v.name);
  claim(spec.output.name);
  for (const auto& v : spec.dummies) claim(v.name);

  std::set<std::string> input_names;
  for (const auto& v : spec.inputs) input_names.insert(v.name);
  for (const auto& v : expr::free_variables(spec.ground_truth)) {
    if (!input_names.count(v)) {
      throw ValidationError(spec.id + ": equation references undeclared variable '" + v + "'");
    }
  }

  if (auto it = doc.find("validity"); it != doc.end() && !it->is_null()) {
    if (!it->is_array()) throw SchemaError(spec.id + ": field 'validity' must be a list");
    for (const auto& c : *it) {
      if (!c.is_string()) throw SchemaError(spec.id + ": validity entries must be strings");
      expr::Constraint con = [&] {
        try {
          return expr::parse_constraint(c.get<std::string>());
        } catch (const expr::ParseError& e) {
          throw ValidationError(spec.id + ": validity constraint does not parse: " + e.what());
        }
      }();
      for (const auto& side : {con.lhs, con.rhs}) {
        for (const auto& v : expr::free_variables(side)) {
          if (!input_names.count(v)) {
            throw ValidationError(spec.id + ": validity constraint references non-input '" + v + "'");
          }
        }
      }
      spec.validity.push_back(std::move(con));
    }
  }
  return spec;
}

EnvironmentSpec load_spec_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot read environment file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return load_spec(buf.str());
  } catch (const SchemaError& e) {
    throw SchemaError(path.filename().string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.filename().string() + ": " + e.what());
  }
}

std::vector<EnvironmentSpec> load_specs(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(path)) return {load_spec_file(path)};
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<EnvironmentSpec> out;
  std::set<std::string> ids;
  for (const auto& f : files) {
    out.push_back(load_spec_file(f));
    if (!ids.insert(out.back().id).second) throw ValidationError("duplicate environment id '" + out.back().id + "'");
  }
  return out;
}

expr::EvalOutcome run_experiment(const EnvironmentSpec& spec, const expr::Bindings& assignment) {
  if (assignment.size() != spec.inputs.size()) {
    throw MalformedAssignment("assignment for '" + spec.id + "' must set exactly the " +
                              std::to_string(spec.inputs.size()) + " input variables");
  }
  for (const auto& v : spec.inputs) {
    auto it = assignment.find(v.name);
    if (it == assignment.end()) throw MalformedAssignment("assignment is missing input '" + v.name + "'");
    if (!v.domain->contains(it->second)) return expr::EvalOutcome::error(expr::DomainError::kOutOfDomain, v.name);
  }
  for (std::size_t i = 0; i < spec.validity.size(); ++i) {
    const auto& c = spec.validity[i];
    auto l = expr::evaluate(c.lhs, assignment);
    auto r = expr::evaluate(c.rhs, assignment);
    bool holds = l && r && expr::compare(c.cmp, l.value(), r.value());
    if (!holds) {
      return expr::EvalOutcome::error(expr::DomainError::kOutOfDomain, "constraint:" + std::to_string(i));
    }
  }
  auto out = expr::evaluate(spec.ground_truth, assignment);
  if (out && spec.output.domain && !spec.output.domain->contains(out.value())) {
    return expr::EvalOutcome::error(expr::DomainError::kOutOfDomain, spec.output.name);
  }
  return out;
}

}  // namespace eqgym::env
