#pragma once

// Packet/turn documents exchanged with agents. Field names follow the
// researcher prompt exactly; see docs/protocol.md.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "eqgym/evaluation/metrics.hpp"

namespace eqgym::session {

using Json = nlohmann::ordered_json;
using NamedValues = std::vector<std::pair<std::string, double>>;

struct HistoryEntry {
  NamedValues inputs;  // controllables, display names
  std::string output_name;
  std::optional<double> output;  // absent = invalid
  std::string invalid_reason;

  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

struct QuotaEcho {
  std::size_t experiments_quota = 0;
  std::size_t test_quota = 0;

  friend bool operator==(const QuotaEcho&, const QuotaEcho&) = default;
};

struct LastOracleResult {
  std::string hypothesis;
  eval::FitReport fit;
  bool equivalent = false;

  friend bool operator==(const LastOracleResult&, const LastOracleResult&) = default;
};

struct ObservationPacket {
  std::string problem_description;
  std::vector<std::pair<std::string, std::string>> controllable_variables;
  std::pair<std::string, std::string> observable_variable;
  std::vector<HistoryEntry> historical_experiments;
  QuotaEcho quota;
  std::optional<LastOracleResult> last_oracle_result;
  // Feedback on the previous turn (dropped experiments, unparsable
  // hypotheses); omitted when empty.
  std::vector<std::string> notices;

  friend bool operator==(const ObservationPacket&, const ObservationPacket&) = default;
};

struct AgentTurn {
  std::vector<NamedValues> next_experiments;
  bool test_hypothesis_flag = false;
  std::string current_hypothesis_formula;

  friend bool operator==(const AgentTurn&, const AgentTurn&) = default;
};

// Raised for documents that do not match the turn or packet schema.
class MalformedTurn : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Integral doubles below 2^53 serialize as JSON integers.
Json number_to_json(double v);

Json to_json(const ObservationPacket& p);
Json to_json(const AgentTurn& t);
Json to_json(const eval::FitReport& f);

// Throw MalformedTurn on schema violations. A null or missing-string
// formula reads as "".
ObservationPacket packet_from_json(const Json& j);
AgentTurn turn_from_json(const Json& j);
eval::FitReport fit_from_json(const Json& j);

// Single-line JSON text.
std::string dump(const Json& j);

// Parses `text` as a turn document, tolerating surrounding prose and
// ```json fences: the first balanced {...} that parses as a turn wins.
AgentTurn extract_turn(std::string_view text);

}  // namespace eqgym::session
