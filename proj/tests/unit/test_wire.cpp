#include <doctest.h>

#include <random>

#include "eqgym/environment/spec.hpp"
#include "eqgym/session/session.hpp"
#include "eqgym/session/wire.hpp"

using namespace eqgym;
using session::Json;

namespace {

// The worked example from the researcher prompt, byte for byte.
const char* kExampleInput = R"({
  "problem_description": "Investigating the relationship between the extension x of an ideal spring (within its elastic limit) and the applied force F. The spring constant is k.",
  "controllable_variables": {"F": "The applied force on the ideal spring in Newtons (N).","k": "The spring constant in Newtons per meter (N/m)."},
  "observable_variable": {"x": "The extension of the spring in meters (m)."},
  "historical_experiments": [],
  "quota": {"experiments_quota": 10, "test_quota": 2}
})";

const char* kExampleOutput = R"({
  "next_experiments": [
    {"F": 0.5, "k": 10},
    {"F": 1.0, "k": 10},
    {"F": 2.0, "k": 10},
    {"F": 1.0, "k": 20},
    {"F": 1.0, "k": 5}
  ],
  "test_hypothesis_flag": false,
  "current_hypothesis_formula": "F / k"
})";

}  // namespace

TEST_CASE("first hooke packet matches the worked example") {
  static const auto specs = env::load_specs(EQGYM_ENVS_DIR);
  auto hooke = std::make_shared<env::EnvironmentSpec>(
      *std::find_if(specs.begin(), specs.end(), [](const auto& s) { return s.id == "hooke"; }));
  session::SessionConfig cfg;
  cfg.quotas = {10, 2};
  session::Session s(hooke, env::PriorMask::level(1), cfg);
  auto ours = session::to_json(s.observation_packet());
  CHECK(ours == Json::parse(kExampleInput));
  CHECK(session::dump(ours) == session::dump(Json::parse(kExampleInput)));
  CHECK(session::packet_from_json(Json::parse(kExampleInput)) == s.observation_packet());
}

TEST_CASE("worked example turn parses") {
  auto t = session::turn_from_json(Json::parse(kExampleOutput));
  REQUIRE(t.next_experiments.size() == 5);
  CHECK(t.next_experiments[0] == session::NamedValues{{"F", 0.5}, {"k", 10}});
  CHECK_FALSE(t.test_hypothesis_flag);
  CHECK(t.current_hypothesis_formula == "F / k");
  CHECK(session::turn_from_json(session::to_json(t)) == t);
}

TEST_CASE("empty formulas") {
  auto base = Json::parse(kExampleOutput);
  base["current_hypothesis_formula"] = nullptr;
  CHECK(session::turn_from_json(base).current_hypothesis_formula.empty());
  base["current_hypothesis_formula"] = "None";
  CHECK(session::turn_from_json(base).current_hypothesis_formula.empty());
  base["current_hypothesis_formula"] = "";
  CHECK(session::turn_from_json(base).current_hypothesis_formula.empty());
}

TEST_CASE("malformed turns") {
  auto bad = [](const char* text) { return session::turn_from_json(Json::parse(text)); };
  CHECK_THROWS_AS(bad(R"({"test_hypothesis_flag": false, "current_hypothesis_formula": ""})"), session::MalformedTurn);
  CHECK_THROWS_AS(bad(R"({"next_experiments": {}, "test_hypothesis_flag": false, "current_hypothesis_formula": ""})"),
                  session::MalformedTurn);
  CHECK_THROWS_AS(bad(R"({"next_experiments": [{"F": "1"}], "test_hypothesis_flag": false,
                          "current_hypothesis_formula": ""})"),
                  session::MalformedTurn);
  CHECK_THROWS_AS(bad(R"({"next_experiments": [], "test_hypothesis_flag": "yes", "current_hypothesis_formula": ""})"),
                  session::MalformedTurn);
  CHECK_THROWS_AS(bad("[]"), session::MalformedTurn);
}

TEST_CASE("extract_turn tolerates prose and fences") {
  std::string fenced = std::string("Here is my plan.\n```json\n") + kExampleOutput + "\n```\nThanks {not json}";
  CHECK(session::extract_turn(fenced).next_experiments.size() == 5);
  std::string preface = std::string("{\"note\": 1} then ") + kExampleOutput;
  CHECK(session::extract_turn(preface).current_hypothesis_formula == "F / k");
  std::string braces_in_strings =
      R"({"next_experiments": [], "test_hypothesis_flag": true, "current_hypothesis_formula": "F/k } {"})";
  CHECK(session::extract_turn(braces_in_strings).current_hypothesis_formula == "F/k } {");
  CHECK_THROWS_AS(session::extract_turn("I cannot decide."), session::MalformedTurn);
  CHECK_THROWS_AS(session::extract_turn("{\"next_experiments\": ["), session::MalformedTurn);
}

TEST_CASE("number serialization") {
  CHECK(session::dump(session::number_to_json(10.0)) == "10");
  CHECK(session::dump(session::number_to_json(-3.0)) == "-3");
  CHECK(session::dump(session::number_to_json(0.5)) == "0.5");
  CHECK(session::dump(session::number_to_json(1e300)) != "");
  CHECK(session::number_to_json(1e300).is_number_float());
}

TEST_CASE("property: packets round-trip") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int trial = 0; trial < 300; ++trial) {
    session::ObservationPacket p;
    p.problem_description = "ctx " + std::to_string(trial);
    std::size_t n = 1 + rng() % 4;
    for (std::size_t i = 0; i < n; ++i) p.controllable_variables.emplace_back("var_" + std::to_string(i + 1), "d");
    p.observable_variable = {"var_out", "o"};
    for (std::size_t r = rng() % 6; r > 0; --r) {
      session::HistoryEntry h;
      for (const auto& c : p.controllable_variables) {
        h.inputs.emplace_back(c.first, rng() % 3 == 0 ? std::round(u(rng)) : u(rng));
      }
      h.output_name = "var_out";
      if (rng() % 4 == 0) {
        h.invalid_reason = "violates validity constraint 1";
      } else {
        h.output = u(rng);
      }
      p.historical_experiments.push_back(h);
    }
    p.quota = {rng() % 100, rng() % 5};
    if (rng() % 2) {
      session::LastOracleResult r;
      r.hypothesis = "var_1 * 2";
      r.fit.n_points = 3;
      r.fit.r2 = u(rng) / 1e6;
      r.fit.mse = std::fabs(u(rng));
      r.equivalent = rng() % 2;
      p.last_oracle_result = r;
    }
    if (rng() % 3 == 0) p.notices.push_back("hypothesis rejected: unknown identifier 'var_9'");
    auto text = session::dump(session::to_json(p));
    auto back = session::packet_from_json(Json::parse(text));
    CHECK(back == p);
    CHECK(session::dump(session::to_json(back)) == text);
  }
}
