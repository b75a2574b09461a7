#include <doctest.h>

#include <random>

#include "eqgym/environment/spec.hpp"
#include "eqgym/session/session.hpp"
#include "eqgym/session/wire.hpp"

using namespace eqgym;
using session::AgentTurn;
using session::Session;
using session::Status;

namespace {

std::shared_ptr<const env::EnvironmentSpec> env_ptr(const std::string& id) {
  static const auto specs = env::load_specs(EQGYM_ENVS_DIR);
  for (const auto& s : specs) {
    if (s.id == id) return std::make_shared<env::EnvironmentSpec>(s);
  }
  throw std::runtime_error(id);
}

session::SessionConfig quotas(std::size_t e, std::size_t t) {
  session::SessionConfig c;
  c.quotas = {e, t};
  return c;
}

AgentTurn turn(std::vector<session::NamedValues> exps, bool flag = false, std::string formula = "") {
  return AgentTurn{std::move(exps), flag, std::move(formula)};
}

}  // namespace

TEST_CASE("hooke session is solved in two turns") {
  Session s(env_ptr("hooke"), env::PriorMask::level(1), quotas(10, 2));
  auto p0 = s.observation_packet();
  CHECK(p0.quota.experiments_quota == 10);
  CHECK(p0.quota.test_quota == 2);
  CHECK(p0.historical_experiments.empty());
  CHECK_FALSE(p0.last_oracle_result.has_value());

  auto o1 = s.submit_turn(turn({{{"F", 1}, {"k", 1}}, {{"F", 2}, {"k", 1}}, {{"F", 2}, {"k", 2}},
                                {{"F", 4}, {"k", 2}}, {{"F", 10}, {"k", 5}}}));
  CHECK(o1.executed == 5);
  CHECK(o1.invalid == 0);
  auto p1 = s.observation_packet();
  CHECK(p1.quota.experiments_quota == 5);
  REQUIRE(p1.historical_experiments.size() == 5);
  CHECK(*p1.historical_experiments[1].output == 2.0);
  CHECK(*p1.historical_experiments[4].output == 2.0);

  auto o2 = s.submit_turn(turn({}, true, "F / k"));
  CHECK(o2.tested);
  CHECK(s.status() == Status::kSolved);
  auto t = s.transcript();
  CHECK(t.experiments_used() == 5);
  CHECK(t.tests_used() == 1);
  CHECK(*t.hypotheses[0].oracle->fit.r2 == 1.0);
  CHECK_THROWS_AS(s.observation_packet(), session::TerminalSession);
  CHECK_THROWS_AS(s.submit_turn(turn({})), session::TerminalSession);
}

TEST_CASE("proposals beyond the experiment quota are dropped") {
  Session s(env_ptr("hooke"), env::PriorMask::level(1), quotas(3, 1));
  std::vector<session::NamedValues> five(5, {{"F", 1}, {"k", 2}});
  auto o = s.submit_turn(turn(five));
  CHECK(o.executed == 3);
  CHECK(o.dropped == 2);
  CHECK(s.experiments_remaining() == 0);
  CHECK(s.history().size() == 3);
  REQUIRE(o.notices.size() == 1);
  CHECK(s.observation_packet().notices == o.notices);
}

TEST_CASE("test quota exhaustion ends the session") {
  Session s(env_ptr("hooke"), env::PriorMask::level(1), quotas(4, 2));
  s.submit_turn(turn({{{"F", 1}, {"k", 1}}, {{"F", 2}, {"k", 3}}, {{"F", 3}, {"k", 2}}, {{"F", 5}, {"k", 4}}}));
  CHECK(s.active());
  s.submit_turn(turn({}, true, "F * k"));
  CHECK(s.active());
  CHECK(s.tests_remaining() == 1);
  auto o = s.submit_turn(turn({}, true, "F + k"));
  CHECK(o.tested);
  CHECK(s.status() == Status::kExhausted);
  CHECK(s.transcript().tests_used() == 2);
}

TEST_CASE("quotas must be positive") {
  CHECK_THROWS_AS(Session(env_ptr("hooke"), env::PriorMask::level(1), quotas(0, 1)), std::invalid_argument);
  CHECK_THROWS_AS(Session(env_ptr("hooke"), env::PriorMask::level(1), quotas(1, 0)), std::invalid_argument);
}

TEST_CASE("invalid experiments consume quota and carry a reason") {
  Session s(env_ptr("env_409"), env::PriorMask::level(4), quotas(10, 1));
  auto o = s.submit_turn(turn({
      {{"var_1", 1}, {"var_2", 1}, {"var_3", 1}, {"var_4", 2}},  // r > a
      {{"var_1", 100}, {"var_2", 1}, {"var_3", 2}, {"var_4", 0}},  // out of range
      {{"var_1", 1}, {"var_2", 1}, {"var_3", 2}},                  // missing
      {{"var_1", 1}, {"var_2", 1}, {"var_3", 2}, {"var_9", 0}},     // unknown
      {{"var_1", 1}, {"var_2", 1}, {"var_3", 2}, {"var_4", 0}},
  }));
  CHECK(o.executed == 5);
  CHECK(o.invalid == 4);
  CHECK(s.experiments_remaining() == 5);
  const auto& h = s.history();
  CHECK(h[0].invalid_reason == "violates validity constraint 1");
  CHECK(h[1].invalid_reason == "value of var_1 outside its allowed range");
  CHECK(h[2].invalid_reason == "missing value for var_4");
  CHECK(h[3].invalid_reason == "unknown variable 'var_9'");
  CHECK(*h[4].output == 2.0);
  auto packet = session::to_json(s.observation_packet());
  auto text = session::dump(packet);
  CHECK(env::leaked_names(s.environment(), text).empty());
  CHECK(packet["historical_experiments"][0]["var_out"] == "invalid");
  CHECK(packet["historical_experiments"][4]["var_out"] == 2);
}

TEST_CASE("hypothesis handling") {
  Session s(env_ptr("hooke"), env::PriorMask::level(4), quotas(5, 3));
  s.submit_turn(turn({{{"var_1", 1}, {"var_2", 2}}}));
  auto bad = s.submit_turn(turn({}, true, "var_1 / "));
  CHECK_FALSE(bad.tested);
  CHECK(s.tests_remaining() == 3);
  CHECK_FALSE(s.hypotheses().back().parse_error.empty());
  auto unknown = s.submit_turn(turn({}, true, "F / k"));
  CHECK_FALSE(unknown.tested);
  CHECK(s.hypotheses().back().parse_error == "unknown identifier 'F'");
  CHECK(s.status() == Status::kActive);
  auto logged = s.submit_turn(turn({{{"var_1", 2}, {"var_2", 2}}}, false, "var_1 * var_2"));
  CHECK(logged.hypothesis_logged);
  CHECK_FALSE(logged.tested);
  CHECK(s.hypotheses().size() == 3);
}

TEST_CASE("idle turns and the turn cap end the session") {
  Session idle(env_ptr("hooke"), env::PriorMask::level(1), quotas(5, 1));
  idle.submit_turn(turn({}));
  idle.submit_turn(turn({}, false, "F"));
  CHECK(idle.active());
  idle.submit_turn(turn({}));
  CHECK(idle.status() == Status::kExhausted);

  auto cfg = quotas(100, 1);
  cfg.max_turns = 4;
  Session capped(env_ptr("hooke"), env::PriorMask::level(1), cfg);
  for (int i = 0; i < 4; ++i) capped.submit_turn(turn({{{"F", 1.0 + i}, {"k", 1}}}));
  CHECK(capped.status() == Status::kExhausted);
  CHECK(capped.transcript().failure_reason == "turn limit reached");
}

TEST_CASE("protocol failure") {
  Session s(env_ptr("hooke"), env::PriorMask::level(1), quotas(5, 1));
  s.fail_protocol("three malformed replies");
  CHECK(s.status() == Status::kProtocolFailure);
  CHECK(session::to_json(s.transcript())["failure_reason"] == "three malformed replies");
}

TEST_CASE("property: quota conservation under random turns") {
  std::mt19937_64 rng(11);
  const std::vector<std::string> names{"var_1", "var_2", "var_3", "bogus"};
  const std::vector<std::string> formulas{"", "var_1/var_2", "var_1 *", "np.exp(var_1)", "x + 1"};
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t e0 = 1 + rng() % 30, t0 = 1 + rng() % 5;
    Session s(env_ptr("env_310"), env::PriorMask::level(4), quotas(e0, t0));
    while (s.active()) {
      std::vector<session::NamedValues> exps(rng() % 8);
      for (auto& e : exps) {
        for (int k = 0; k < 3; ++k) {
          e.emplace_back(names[rng() % (k == 2 ? 4 : 3)], std::uniform_real_distribution<double>(-1, 2)(rng));
        }
      }
      std::size_t before_e = s.experiments_remaining(), before_t = s.tests_remaining();
      auto o = s.submit_turn(turn(exps, rng() % 2 == 0, formulas[rng() % formulas.size()]));
      CHECK(o.executed + o.dropped == exps.size());
      CHECK(before_e - s.experiments_remaining() == o.executed);
      CHECK(before_t - s.tests_remaining() == (o.tested ? 1u : 0u));
      CHECK(s.experiments_remaining() + s.history().size() == e0);
    }
    auto t = s.transcript();
    CHECK(t.tests_used() + s.tests_remaining() == t0);
    CHECK(t.turns.size() <= s.config().max_turns);
  }
}

TEST_CASE("transcript json and replay") {
  Session s(env_ptr("env_716"), env::PriorMask::level(3), quotas(10, 2));
  s.submit_turn(turn({{{"k", 10}, {"q", 1e-6}, {"Q", 1e-6}, {"m", 1}, {"L", 1}},
                      {{"k", 100}, {"q", 1e-5}, {"Q", 1e-6}, {"m", 0.1}, {"L", 2}}}));
  s.submit_turn(turn({}, true, "3*np.sqrt(k*q*Q/(m*L**3))"));
  s.submit_turn(turn({{{"k", 1}, {"q", 1e-4}, {"Q", 1e-4}, {"m", 2}, {"L", 0.5}}}));
  auto t = s.transcript();
  auto j = session::to_json(t);
  CHECK(j["level"] == "L3");
  CHECK(j["history"].size() == 3);
  CHECK(j["hypotheses"][0]["verdict"]["equivalent"] == false);
  CHECK(j.dump() == session::to_json(s.transcript()).dump());

  auto replay = session::replay_last_test(t, s.environment(), s.config());
  REQUIRE(replay.has_value());
  CHECK(replay->fit == t.hypotheses[0].oracle->fit);
  CHECK(replay->verdict == t.hypotheses[0].oracle->verdict);
  CHECK(replay->fit.n_points == 2);
}

TEST_CASE("sessions with the same seed and turns are identical") {
  auto run = [](std::uint64_t seed) {
    auto cfg = quotas(6, 2);
    cfg.seed = seed;
    Session s(env_ptr("env_409"), env::PriorMask::level(2), cfg);
    s.submit_turn(turn({{{"epsilon_0", 1}, {"E_0", 1}, {"a", 2}, {"r", 1}}}));
    s.submit_turn(turn({}, true, "epsilon_0*E_0*a/np.sqrt(a**2-r**2)"));
    return session::to_json(s.transcript()).dump();
  };
  CHECK(run(5) == run(5));
}
