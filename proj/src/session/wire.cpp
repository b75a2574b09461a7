#include "eqgym/session/wire.hpp"

#include <cmath>
#include <cstdint>

namespace eqgym::session {

Json number_to_json(double v) {
  if (std::nearbyint(v) == v && std::fabs(v) < 9007199254740992.0 && !(v == 0 && std::signbit(v))) {
    return static_cast<std::int64_t>(v);
  }
  return v;
}

namespace {

Json optional_number(const std::optional<double>& v) { return v ? number_to_json(*v) : Json(nullptr); }

const Json& member(const Json& j, const char* key, std::string_view where) {
  if (!j.is_object()) throw MalformedTurn(std::string(where) + " must be a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw MalformedTurn(std::string(where) + " is missing '" + key + "'");
  return *it;
}

double finite_number(const Json& v, std::string_view what) {
  if (!v.is_number()) throw MalformedTurn(std::string(what) + " must be a number");
  double d = v.get<double>();
  if (!std::isfinite(d)) throw MalformedTurn(std::string(what) + " must be finite");
  return d;
}

std::string string_member(const Json& j, const char* key, std::string_view where) {
  const Json& v = member(j, key, where);
  if (!v.is_string()) throw MalformedTurn(std::string(where) + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

std::size_t count_member(const Json& j, const char* key) {
  const Json& v = member(j, key, "quota");
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw MalformedTurn(std::string("quota: '") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::optional<double> optional_member(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return finite_number(*it, key);
}

}  // namespace

Json to_json(const eval::FitReport& f) {
  Json j = Json::object();
  j["r2"] = optional_number(f.r2);
  j["mse"] = optional_number(f.mse);
  j["kendall_tau"] = optional_number(f.kendall_tau);
  j["mape"] = optional_number(f.mape);
  j["n_points"] = f.n_points;
  j["n_skipped"] = f.n_skipped;
  return j;
}

eval::FitReport fit_from_json(const Json& j) {
  if (!j.is_object()) throw MalformedTurn("fit report must be an object");
  eval::FitReport f;
  f.r2 = optional_member(j, "r2");
  f.mse = optional_member(j, "mse");
  f.kendall_tau = optional_member(j, "kendall_tau");
  f.mape = optional_member(j, "mape");
  f.n_points = j.value("n_points", std::size_t{0});
  f.n_skipped = j.value("n_skipped", std::size_t{0});
  return f;
}

Json to_json(const ObservationPacket& p) {
  Json j = Json::object();
  j["problem_description"] = p.problem_description;
  Json controllable = Json::object();
  for (const auto& [name, desc] : p.controllable_variables) controllable[name] = desc;
  j["controllable_variables"] = controllable;
  j["observable_variable"] = Json::object({{p.observable_variable.first, p.observable_variable.second}});
  Json history = Json::array();
  for (const auto& h : p.historical_experiments) {
    Json row = Json::object();
    for (const auto& [name, v] : h.inputs) row[name] = number_to_json(v);
    if (h.output) {
      row[h.output_name] = number_to_json(*h.output);
    } else {
      row[h.output_name] = "invalid";
      row["invalid_reason"] = h.invalid_reason;
    }
    history.push_back(std::move(row));
  }
  j["historical_experiments"] = history;
  j["quota"] = Json::object({{"experiments_quota", p.quota.experiments_quota}, {"test_quota", p.quota.test_quota}});
  if (p.last_oracle_result) {
    Json r = Json::object();
    r["hypothesis"] = p.last_oracle_result->hypothesis;
    r["equivalent"] = p.last_oracle_result->equivalent;
    Json fit = to_json(p.last_oracle_result->fit);
    for (const auto& [k, v] : fit.items()) r[k] = v;
    j["last_oracle_result"] = r;
  }
  if (!p.notices.empty()) j["notices"] = p.notices;
  return j;
}

ObservationPacket packet_from_json(const Json& j) {
  ObservationPacket p;
  p.problem_description = string_member(j, "problem_description", "packet");
  const Json& controllable = member(j, "controllable_variables", "packet");
  if (!controllable.is_object()) throw MalformedTurn("controllable_variables must be an object");
  for (const auto& [k, v] : controllable.items()) {
    if (!v.is_string()) throw MalformedTurn("controllable_variables values must be strings");
    p.controllable_variables.emplace_back(k, v.get<std::string>());
  }
  const Json& observable = member(j, "observable_variable", "packet");
  if (!observable.is_object() || observable.size() != 1 || !observable.begin().value().is_string()) {
    throw MalformedTurn("observable_variable must map exactly one name to a description");
  }
  p.observable_variable = {observable.begin().key(), observable.begin().value().get<std::string>()};
  const Json& history = member(j, "historical_experiments", "packet");
  if (!history.is_array()) throw MalformedTurn("historical_experiments must be a list");
  for (const auto& row : history) {
    if (!row.is_object()) throw MalformedTurn("history rows must be objects");
    HistoryEntry h;
    h.output_name = p.observable_variable.first;
    for (const auto& [k, v] : row.items()) {
      if (k == h.output_name) {
        if (v.is_string() && v.get<std::string>() == "invalid") continue;
        h.output = finite_number(v, "history output");
      } else if (k == "invalid_reason") {
        if (!v.is_string()) throw MalformedTurn("invalid_reason must be a string");
        h.invalid_reason = v.get<std::string>();
      } else {
        h.inputs.emplace_back(k, finite_number(v, "history value"));
      }
    }
    p.historical_experiments.push_back(std::move(h));
  }
  const Json& quota = member(j, "quota", "packet");
  p.quota.experiments_quota = count_member(quota, "experiments_quota");
  p.quota.test_quota = count_member(quota, "test_quota");
  if (auto it = j.find("last_oracle_result"); it != j.end() && !it->is_null()) {
    LastOracleResult r;
    r.hypothesis = string_member(*it, "hypothesis", "last_oracle_result");
    const Json& eq = member(*it, "equivalent", "last_oracle_result");
    if (!eq.is_boolean()) throw MalformedTurn("last_oracle_result: 'equivalent' must be a boolean");
    r.equivalent = eq.get<bool>();
    r.fit = fit_from_json(*it);
    p.last_oracle_result = std::move(r);
  }
  if (auto it = j.find("notices"); it != j.end()) {
    if (!it->is_array()) throw MalformedTurn("notices must be a list");
    for (const auto& n : *it) {
      if (!n.is_string()) throw MalformedTurn("notices must be strings");
      p.notices.push_back(n.get<std::string>());
    }
  }
  return p;
}

Json to_json(const AgentTurn& t) {
  Json j = Json::object();
  Json exps = Json::array();
  for (const auto& e : t.next_experiments) {
    Json row = Json::object();
    for (const auto& [k, v] : e) row[k] = number_to_json(v);
    exps.push_back(std::move(row));
  }
  j["next_experiments"] = exps;
  j["test_hypothesis_flag"] = t.test_hypothesis_flag;
  j["current_hypothesis_formula"] = t.current_hypothesis_formula;
  return j;
}

AgentTurn turn_from_json(const Json& j) {
  AgentTurn t;
  const Json& exps = member(j, "next_experiments", "turn");
  if (!exps.is_array()) throw MalformedTurn("next_experiments must be a list");
  for (const auto& e : exps) {
    if (!e.is_object()) throw MalformedTurn("each experiment must be an object");
    NamedValues row;
    for (const auto& [k, v] : e.items()) row.emplace_back(k, finite_number(v, "experiment value '" + k + "'"));
    t.next_experiments.push_back(std::move(row));
  }
  const Json& flag = member(j, "test_hypothesis_flag", "turn");
  if (!flag.is_boolean()) throw MalformedTurn("test_hypothesis_flag must be a boolean");
  t.test_hypothesis_flag = flag.get<bool>();
  const Json& formula = member(j, "current_hypothesis_formula", "turn");
  if (formula.is_string()) {
    t.current_hypothesis_formula = formula.get<std::string>();
  } else if (!formula.is_null()) {
    throw MalformedTurn("current_hypothesis_formula must be a string or null");
  }
  if (t.current_hypothesis_formula == "None") t.current_hypothesis_formula.clear();
  return t;
}

std::string dump(const Json& j) { return j.dump(-1, ' ', false, Json::error_handler_t::replace); }

AgentTurn extract_turn(std::string_view text) {
  std::string last_error = "no JSON object found";
  for (std::size_t start = text.find('{'); start != std::string_view::npos; start = text.find('{', start + 1)) {
    // Scan to the matching brace, skipping string literals.
    int depth = 0;
    bool in_string = false, escaped = false;
    std::size_t end = std::string_view::npos;
    for (std::size_t i = start; i < text.size(); ++i) {
      char c = text[i];
      if (in_string) {
        if (escaped) escaped = false;
        else if (c == '\\') escaped = true;
        else if (c == '"') in_string = false;
        continue;
      }
      if (c == '"') in_string = true;
      else if (c == '{') ++depth;
      else if (c == '}' && --depth == 0) {
        end = i + 1;
        break;
      }
    }
    if (end == std::string_view::npos) break;
    Json j = Json::parse(text.substr(start, end - start), nullptr, false);
    if (j.is_discarded()) continue;
    try {
      return turn_from_json(j);
    } catch (const MalformedTurn& e) {
      last_error = e.what();
    }
  }
  throw MalformedTurn(last_error);
}

}  // namespace eqgym::session
