#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "eqgym/environment/observation.hpp"
#include "eqgym/environment/spec.hpp"
#include "eqgym/evaluation/oracle.hpp"
#include "eqgym/session/records.hpp"
#include "eqgym/session/wire.hpp"

namespace eqgym::session {

enum class Status { kActive, kSolved, kExhausted, kProtocolFailure };

std::string_view status_name(Status s);
std::optional<Status> parse_status(std::string_view s);

struct Quotas {
  std::size_t experiments = 100;
  std::size_t tests = 5;
};

struct SessionConfig {
  Quotas quotas;
  std::uint64_t seed = 0;
  // Hard cap on turns; reaching it ends the session as exhausted.
  std::size_t max_turns = 50;
  // This many consecutive turns without experiments or a test also end it.
  std::size_t max_idle_turns = 3;
  env::ObservationOptions observation;
  expr::EquivConfig equivalence;  // seed is replaced by the session seed
  eval::EquivalenceJudge judge;
};

class TerminalSession : public std::logic_error {
 public:
  TerminalSession() : std::logic_error("session has already ended") {}
};

struct TurnOutcome {
  std::size_t turn_index = 0;
  std::size_t proposed = 0;
  std::size_t executed = 0;
  std::size_t invalid = 0;
  std::size_t dropped = 0;
  bool hypothesis_logged = false;
  bool tested = false;
  Status status = Status::kActive;
  std::vector<std::string> notices;
};

struct SessionTranscript {
  std::string env_id;
  env::PriorMask mask;
  env::ObservationHeader header;
  Quotas initial_quotas;
  std::uint64_t seed = 0;
  std::vector<ExperimentRecord> history;
  std::vector<HypothesisRecord> hypotheses;
  std::vector<TurnOutcome> turns;
  Status status = Status::kActive;
  std::string failure_reason;
  // Wall-clock seconds per turn; not part of the deterministic JSON form.
  std::vector<double> turn_seconds;

  std::size_t experiments_used() const { return history.size(); }
  std::size_t tests_used() const;
};

class Session {
 public:
  // Throws std::invalid_argument unless both quotas are positive.
  Session(std::shared_ptr<const env::EnvironmentSpec> env, env::PriorMask mask, SessionConfig config = {});

  ObservationPacket observation_packet() const;
  TurnOutcome submit_turn(const AgentTurn& turn);
  // Ends the session because the agent could not produce a valid turn.
  void fail_protocol(std::string reason);
  void record_turn_seconds(double seconds);

  Status status() const { return status_; }
  bool active() const { return status_ == Status::kActive; }
  std::size_t experiments_remaining() const { return experiments_remaining_; }
  std::size_t tests_remaining() const { return tests_remaining_; }
  std::size_t turn_index() const { return turn_index_; }
  const std::vector<ExperimentRecord>& history() const { return history_; }
  const std::vector<HypothesisRecord>& hypotheses() const { return hypotheses_; }
  const env::ObservationHeader& header() const { return header_; }
  const env::EnvironmentSpec& environment() const { return *env_; }
  const SessionConfig& config() const { return config_; }

  SessionTranscript transcript() const;

 private:
  ExperimentRecord run_one(const NamedValues& proposal);
  std::string describe(const expr::EvalOutcome& failure) const;

  std::shared_ptr<const env::EnvironmentSpec> env_;
  env::PriorMask mask_;
  SessionConfig config_;
  env::ObservationHeader header_;
  std::size_t experiments_remaining_;
  std::size_t tests_remaining_;
  std::size_t turn_index_ = 0;
  std::size_t idle_streak_ = 0;
  Status status_ = Status::kActive;
  std::string failure_reason_;
  std::vector<ExperimentRecord> history_;
  std::vector<HypothesisRecord> hypotheses_;
  std::vector<TurnOutcome> turns_;
  std::vector<std::string> pending_notices_;
  std::vector<double> turn_seconds_;
};

// Deterministic JSON form of a transcript: display names only, no timings.
Json to_json(const SessionTranscript& t);

// Re-runs the oracle on the last tested hypothesis of a transcript, with
// the history that existed when it was tested.
std::optional<OracleResult> replay_last_test(const SessionTranscript& t, const env::EnvironmentSpec& spec,
                                             const SessionConfig& config);

}  // namespace eqgym::session
