#include "eqgym/session/session.hpp"

#include <algorithm>
#include <set>

#include "eqgym/expr/parse.hpp"

namespace eqgym::session {

std::string_view status_name(Status s) {
  switch (s) {
    case Status::kActive: return "active";
    case Status::kSolved: return "solved";
    case Status::kExhausted: return "exhausted";
    case Status::kProtocolFailure: return "protocol_failure";
  }
  return "active";
}

std::optional<Status> parse_status(std::string_view s) {
  for (auto st : {Status::kActive, Status::kSolved, Status::kExhausted, Status::kProtocolFailure}) {
    if (status_name(st) == s) return st;
  }
  return std::nullopt;
}

std::size_t SessionTranscript::tests_used() const {
  return static_cast<std::size_t>(
      std::count_if(hypotheses.begin(), hypotheses.end(), [](const HypothesisRecord& h) { return h.tested; }));
}

Session::Session(std::shared_ptr<const env::EnvironmentSpec> env, env::PriorMask mask, SessionConfig config)
    : env_(std::move(env)),
      mask_(mask),
      config_(std::move(config)),
      experiments_remaining_(config_.quotas.experiments),
      tests_remaining_(config_.quotas.tests) {
  if (!env_) throw std::invalid_argument("session needs an environment");
  if (config_.quotas.experiments == 0 || config_.quotas.tests == 0) {
    throw std::invalid_argument("experiment and test quotas must both be positive");
  }
  if (config_.max_turns == 0) throw std::invalid_argument("max_turns must be positive");
  config_.equivalence.seed = config_.seed;
  header_ = env::render_observation(*env_, mask_, config_.observation);
}

ObservationPacket Session::observation_packet() const {
  if (!active()) throw TerminalSession();
  ObservationPacket p;
  p.problem_description = header_.problem_description;
  for (const auto& c : header_.controllables) p.controllable_variables.emplace_back(c.name, c.description);
  p.observable_variable = {header_.observable.name, header_.observable.description};
  for (const auto& r : history_) {
    p.historical_experiments.push_back({r.assignment, header_.observable.name, r.output, r.invalid_reason});
  }
  p.quota = {experiments_remaining_, tests_remaining_};
  for (auto it = hypotheses_.rbegin(); it != hypotheses_.rend(); ++it) {
    if (it->oracle) {
      p.last_oracle_result = LastOracleResult{it->formula_text, it->oracle->fit, it->oracle->verdict.equivalent};
      break;
    }
  }
  p.notices = pending_notices_;
  return p;
}

std::string Session::describe(const expr::EvalOutcome& failure) const {
  if (failure.error() != expr::DomainError::kOutOfDomain) {
    return "evaluation failed: " + std::string(expr::domain_error_name(failure.error()));
  }
  const std::string& detail = failure.detail();
  if (detail.rfind("constraint:", 0) == 0) {
    return "violates validity constraint " + std::to_string(std::stoul(detail.substr(11)) + 1);
  }
  if (detail == env_->output.name) return "observable outside its physical range";
  for (const auto& c : header_.controllables) {
    if (c.true_name == detail) return "value of " + c.name + " outside its allowed range";
  }
  return "input outside its allowed range";
}

ExperimentRecord Session::run_one(const NamedValues& proposal) {
  ExperimentRecord rec;
  rec.turn_index = turn_index_;
  std::set<std::string> seen;
  for (const auto& [name, value] : proposal) {
    if (!header_.find_controllable(name)) {
      rec.invalid_reason = "unknown variable '" + name + "'";
    } else if (!seen.insert(name).second) {
      rec.invalid_reason = "variable '" + name + "' set twice";
    }
  }
  // Keep the declared order; missing values are reported, not invented.
  for (const auto& c : header_.controllables) {
    auto it = std::find_if(proposal.begin(), proposal.end(), [&](const auto& kv) { return kv.first == c.name; });
    if (it == proposal.end()) {
      if (rec.invalid_reason.empty()) rec.invalid_reason = "missing value for " + c.name;
      continue;
    }
    rec.assignment.emplace_back(c.name, it->second);
  }
  if (!rec.invalid_reason.empty()) return rec;

  expr::Bindings truth_inputs;
  for (const auto& [name, value] : rec.assignment) {
    const auto* c = header_.find_controllable(name);
    if (c->dummy) {
      if (!c->domain.contains(value)) {
        rec.invalid_reason = "value of " + name + " outside its allowed range";
        return rec;
      }
      continue;
    }
    truth_inputs.emplace(c->true_name, value);
  }
  auto outcome = env::run_experiment(*env_, truth_inputs);
  if (outcome) {
    rec.output = outcome.value();
  } else {
    rec.invalid_reason = describe(outcome);
  }
  return rec;
}

TurnOutcome Session::submit_turn(const AgentTurn& turn) {
  if (!active()) throw TerminalSession();
  TurnOutcome out;
  out.turn_index = turn_index_;
  out.proposed = turn.next_experiments.size();
  pending_notices_.clear();

  for (const auto& proposal : turn.next_experiments) {
    if (experiments_remaining_ == 0) {
      ++out.dropped;
      continue;
    }
    --experiments_remaining_;
    history_.push_back(run_one(proposal));
    ++out.executed;
    if (!history_.back().valid()) ++out.invalid;
  }
  if (out.dropped > 0) {
    out.notices.push_back(std::to_string(out.dropped) + " proposed experiment(s) dropped: experiment quota exhausted");
  }

  std::string formula = turn.current_hypothesis_formula;
  formula.erase(0, formula.find_first_not_of(" \t\r\n"));
  formula.erase(formula.find_last_not_of(" \t\r\n") + 1);
  if (!formula.empty()) {
    HypothesisRecord h;
    h.turn_index = turn_index_;
    h.formula_text = formula;
    try {
      expr::Expression parsed = expr::parse(formula);
      for (const auto& v : expr::free_variables(parsed)) {
        if (!header_.find_controllable(v) && h.parse_error.empty()) {
          h.parse_error = "unknown identifier '" + v + "'";
        }
      }
      if (h.parse_error.empty()) h.parsed = parsed;
    } catch (const expr::ParseError& e) {
      h.parse_error = e.what();
    }
    if (!h.parse_error.empty()) out.notices.push_back("hypothesis rejected: " + h.parse_error);
    hypotheses_.push_back(std::move(h));
    out.hypothesis_logged = true;
  }

  if (turn.test_hypothesis_flag) {
    HypothesisRecord* current = out.hypothesis_logged ? &hypotheses_.back() : nullptr;
    if (!current || !current->parsed) {
      out.notices.push_back("test requested without parsable hypothesis; no test used");
    } else if (tests_remaining_ == 0) {
      out.notices.push_back("test requested but test quota exhausted; hypothesis logged untested");
    } else {
      eval::OracleConfig oc{config_.equivalence, config_.judge};
      current->oracle = eval::oracle_test(*current->parsed, *env_, history_, header_, oc);
      current->tested = true;
      --tests_remaining_;
      out.tested = true;
      if (current->oracle->verdict.equivalent) status_ = Status::kSolved;
    }
  }

  ++turn_index_;
  idle_streak_ = (out.proposed == 0 && !out.tested) ? idle_streak_ + 1 : 0;
  if (status_ == Status::kActive) {
    if (experiments_remaining_ == 0 && tests_remaining_ == 0) {
      status_ = Status::kExhausted;
    } else if (idle_streak_ >= config_.max_idle_turns) {
      status_ = Status::kExhausted;
      failure_reason_ = "no experiments or tests for " + std::to_string(idle_streak_) + " consecutive turns";
    } else if (turn_index_ >= config_.max_turns) {
      status_ = Status::kExhausted;
      failure_reason_ = "turn limit reached";
    }
  }
  out.status = status_;
  pending_notices_ = out.notices;
  turns_.push_back(out);
  return out;
}

void Session::fail_protocol(std::string reason) {
  if (!active()) throw TerminalSession();
  status_ = Status::kProtocolFailure;
  failure_reason_ = std::move(reason);
}

void Session::record_turn_seconds(double seconds) { turn_seconds_.push_back(seconds); }

SessionTranscript Session::transcript() const {
  SessionTranscript t;
  t.env_id = env_->id;
  t.mask = mask_;
  t.header = header_;
  t.initial_quotas = config_.quotas;
  t.seed = config_.seed;
  t.history = history_;
  t.hypotheses = hypotheses_;
  t.turns = turns_;
  t.status = status_;
  t.failure_reason = failure_reason_;
  t.turn_seconds = turn_seconds_;
  return t;
}

namespace {

Json verdict_json(const expr::EquivalenceVerdict& v) {
  Json j = Json::object();
  j["equivalent"] = v.equivalent;
  j["method"] = expr::method_name(v.method);
  j["points_compared"] = v.points_compared;
  j["max_rel_error"] = v.max_rel_error ? Json(*v.max_rel_error) : Json(nullptr);
  j["detail"] = v.detail;
  return j;
}

}  // namespace

Json to_json(const SessionTranscript& t) {
  Json j = Json::object();
  j["env_id"] = t.env_id;
  j["level"] = t.mask.label();
  j["mask"] = Json::object({{"show_context", t.mask.show_context},
                            {"show_descriptions", t.mask.show_descriptions},
                            {"show_names", t.mask.show_names}});
  j["seed"] = t.seed;
  j["quotas"] = Json::object({{"experiments", t.initial_quotas.experiments}, {"tests", t.initial_quotas.tests}});

  Json header = Json::object();
  header["problem_description"] = t.header.problem_description;
  Json controllable = Json::object();
  for (const auto& c : t.header.controllables) controllable[c.name] = c.description;
  header["controllable_variables"] = controllable;
  header["observable_variable"] = Json::object({{t.header.observable.name, t.header.observable.description}});
  j["header"] = header;

  Json turns = Json::array();
  for (const auto& o : t.turns) {
    Json r = Json::object();
    r["turn_index"] = o.turn_index;
    r["proposed"] = o.proposed;
    r["executed"] = o.executed;
    r["invalid"] = o.invalid;
    r["dropped"] = o.dropped;
    r["hypothesis_logged"] = o.hypothesis_logged;
    r["tested"] = o.tested;
    r["status"] = status_name(o.status);
    r["notices"] = o.notices;
    turns.push_back(std::move(r));
  }
  j["turns"] = turns;

  Json history = Json::array();
  for (const auto& rec : t.history) {
    Json r = Json::object();
    r["turn_index"] = rec.turn_index;
    Json inputs = Json::object();
    for (const auto& [k, v] : rec.assignment) inputs[k] = number_to_json(v);
    r["inputs"] = inputs;
    if (rec.output) {
      r["output"] = number_to_json(*rec.output);
    } else {
      r["output"] = "invalid";
      r["invalid_reason"] = rec.invalid_reason;
    }
    history.push_back(std::move(r));
  }
  j["history"] = history;

  Json hyps = Json::array();
  for (const auto& h : t.hypotheses) {
    Json r = Json::object();
    r["turn_index"] = h.turn_index;
    r["formula"] = h.formula_text;
    r["parsed"] = h.parsed ? Json(expr::render(*h.parsed)) : Json(nullptr);
    if (!h.parse_error.empty()) r["parse_error"] = h.parse_error;
    r["tested"] = h.tested;
    if (h.oracle) {
      r["fit"] = to_json(h.oracle->fit);
      r["verdict"] = verdict_json(h.oracle->verdict);
    }
    hyps.push_back(std::move(r));
  }
  j["hypotheses"] = hyps;
  j["status"] = status_name(t.status);
  if (!t.failure_reason.empty()) j["failure_reason"] = t.failure_reason;
  return j;
}

std::optional<OracleResult> replay_last_test(const SessionTranscript& t, const env::EnvironmentSpec& spec,
                                             const SessionConfig& config) {
  const HypothesisRecord* last = nullptr;
  for (const auto& h : t.hypotheses) {
    if (h.tested) last = &h;
  }
  if (!last || !last->parsed) return std::nullopt;
  std::vector<ExperimentRecord> history;
  for (const auto& r : t.history) {
    if (r.turn_index <= last->turn_index) history.push_back(r);
  }
  auto header = env::render_observation(spec, t.mask, config.observation);
  expr::EquivConfig equiv = config.equivalence;
  equiv.seed = t.seed;
  return eval::oracle_test(*last->parsed, spec, history, header, {equiv, config.judge});
}

}  // namespace eqgym::session
