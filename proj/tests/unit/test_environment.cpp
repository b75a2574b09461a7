#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "eqgym/environment/observation.hpp"
#include "eqgym/environment/spec.hpp"
#include "eqgym/session/wire.hpp"

using namespace eqgym;
using env::EnvironmentSpec;
using env::PriorMask;

namespace {

const std::vector<EnvironmentSpec>& bundled() {
  static const auto specs = env::load_specs(EQGYM_ENVS_DIR);
  return specs;
}

const EnvironmentSpec& by_id(const std::string& id) {
  for (const auto& s : bundled()) {
    if (s.id == id) return s;
  }
  throw std::runtime_error("no bundled env " + id);
}

std::string header_text(const env::ObservationHeader& h) {
  session::Json j = session::Json::object();
  j["problem_description"] = h.problem_description;
  for (const auto& c : h.controllables) j["controllable_variables"][c.name] = c.description;
  j["observable_variable"][h.observable.name] = h.observable.description;
  return j.dump();
}

const char* kMinimal = R"({
  "id": "t", "context": "c", "equation": "F / k",
  "input_variables": [
    {"name": "F", "description": "force", "domain": {"lower": 0, "upper": 1}},
    {"name": "k", "description": "stiffness", "domain": {"lower": 1, "upper": 2, "scale_hint": "log"}}],
  "output_variable": {"name": "x", "description": "extension"}
})";

std::string with(std::string doc, const std::string& from, const std::string& to) {
  auto pos = doc.find(from);
  REQUIRE(pos != std::string::npos);
  return doc.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("bundled environments load") {
  REQUIRE(bundled().size() == 10);
  const auto& e409 = by_id("env_409");
  CHECK(e409.inputs.size() == 4);
  CHECK(e409.output.name == "sigma");
  CHECK(e409.dummies.empty());
  CHECK(e409.validity.size() == 1);
  const auto& e310 = by_id("env_310");
  CHECK(e310.inputs.size() == 3);
  REQUIRE(e310.dummies.size() == 1);
  CHECK(e310.dummies[0].name == "S_0");
  CHECK(by_id("hooke").inputs.size() == 2);
  CHECK(by_id("series_springs").inputs.size() >= 10);
}

TEST_CASE("load_spec validation") {
  CHECK_NOTHROW(env::load_spec(kMinimal));
  CHECK_THROWS_AS(env::load_spec(with(kMinimal, "F / k", "F / T")), env::ValidationError);
  CHECK_THROWS_AS(env::load_spec(with(kMinimal, R"("name": "x")", R"("name": "F")")), env::ValidationError);
  CHECK_THROWS_AS(env::load_spec(with(kMinimal, R"("upper": 1})", R"("upper": 0})")), env::ValidationError);
  CHECK_THROWS_AS(env::load_spec(with(kMinimal, R"("lower": 0,)", R"("lower": "0",)")), env::SchemaError);
  CHECK_THROWS_AS(env::load_spec(with(kMinimal, R"("context": "c",)", "")), env::SchemaError);
  CHECK_THROWS_AS(env::load_spec(with(kMinimal, R"("name": "k")", R"("name": "var_2")")), env::ValidationError);
  CHECK_THROWS_AS(env::load_spec("not json"), env::SchemaError);
  CHECK_THROWS_AS(env::load_spec(with(kMinimal, "F / k", "F ^ k")), env::ValidationError);
  auto bad_validity = with(kMinimal, R"("id": "t",)", R"("id": "t", "validity": ["x < F"],)");
  CHECK_THROWS_AS(env::load_spec(bad_validity), env::ValidationError);
}

TEST_CASE("run_experiment examples") {
  const auto& e409 = by_id("env_409");
  auto ok = env::run_experiment(e409, {{"epsilon_0", 1}, {"E_0", 1}, {"a", 2}, {"r", 0}});
  REQUIRE(ok.ok());
  CHECK(ok.value() == 2.0);
  auto bad = env::run_experiment(e409, {{"epsilon_0", 1}, {"E_0", 1}, {"a", 1}, {"r", 2}});
  CHECK(bad.error() == expr::DomainError::kOutOfDomain);
  auto v = env::run_experiment(by_id("env_310"), {{"beta_0", 0.9}, {"E", 0}, {"m", 5}});
  REQUIRE(v.ok());
  CHECK(std::fabs(v.value() - 0.9) <= 1e-12);

  auto out_of_range = env::run_experiment(e409, {{"epsilon_0", 100}, {"E_0", 1}, {"a", 2}, {"r", 0}});
  CHECK(out_of_range.error() == expr::DomainError::kOutOfDomain);
  CHECK(out_of_range.detail() == "epsilon_0");
  auto violated = env::run_experiment(e409, {{"epsilon_0", 1}, {"E_0", 1}, {"a", 1}, {"r", 1}});
  CHECK(violated.detail() == "constraint:0");

  CHECK_THROWS_AS(env::run_experiment(e409, {{"epsilon_0", 1}}), env::MalformedAssignment);
  CHECK_THROWS_AS(env::run_experiment(e409, {{"epsilon_0", 1}, {"E_0", 1}, {"a", 2}, {"sigma", 0}}),
                  env::MalformedAssignment);
}

TEST_CASE("run_experiment is referentially transparent") {
  std::mt19937_64 rng(5);
  for (const auto& spec : bundled()) {
    for (int i = 0; i < 20; ++i) {
      expr::Bindings b;
      for (const auto& v : spec.inputs) b[v.name] = expr::sample_by_hint(*v.domain, rng);
      auto a = env::run_experiment(spec, b);
      auto c = env::run_experiment(spec, b);
      CHECK(a == c);
    }
  }
}

TEST_CASE("render_observation levels") {
  const auto& hooke = by_id("hooke");
  auto l4 = env::render_observation(hooke, PriorMask::level(4));
  REQUIRE(l4.controllables.size() == 2);
  CHECK(l4.controllables[0].name == "var_1");
  CHECK(l4.controllables[1].name == "var_2");
  CHECK(l4.observable.name == "var_out");
  CHECK(l4.problem_description == "Unknown context.");
  CHECK(l4.controllables[0].description == "A controllable physical quantity.");
  CHECK(l4.observable.description == "An observable physical quantity.");
  CHECK(l4.name_map.at("var_1") == "F");
  CHECK(l4.name_map.at("var_out") == "x");

  const auto& e409 = by_id("env_409");
  auto l2 = env::render_observation(e409, PriorMask::level(2));
  CHECK(l2.problem_description == "Unknown context.");
  CHECK(l2.controllables[0].name == "epsilon_0");
  CHECK(l2.controllables[0].description == e409.inputs[0].description);

  for (const auto& spec : bundled()) {
    auto l1 = env::render_observation(spec, PriorMask::level(1));
    CHECK(l1.problem_description == spec.context);
    CHECK(header_text(l1) == header_text(env::render_observation(spec, PriorMask::level(1))));
  }
}

TEST_CASE("mask presets and labels") {
  CHECK(PriorMask::level(1) == PriorMask{true, true, true});
  CHECK(PriorMask::level(2) == PriorMask{false, true, true});
  CHECK(PriorMask::level(3) == PriorMask{false, false, true});
  CHECK(PriorMask::level(4) == PriorMask{false, false, false});
  CHECK(PriorMask::parse_level("L3") == PriorMask::level(3));
  CHECK_FALSE(PriorMask::parse_level("L5").has_value());
  CHECK(PriorMask{true, false, true}.label() == "custom:TFT");
  CHECK_THROWS_AS(PriorMask::level(0), std::out_of_range);
}

TEST_CASE("property: masking is monotone") {
  for (const auto& spec : bundled()) {
    for (int l = 1; l < 4; ++l) {
      auto hi = env::render_observation(spec, PriorMask::level(l));
      auto lo = env::render_observation(spec, PriorMask::level(l + 1));
      auto m_hi = PriorMask::level(l), m_lo = PriorMask::level(l + 1);
      CHECK(m_hi.show_context >= m_lo.show_context);
      CHECK(m_hi.show_descriptions >= m_lo.show_descriptions);
      CHECK(m_hi.show_names >= m_lo.show_names);
      if (!m_hi.show_context) CHECK(hi.problem_description == lo.problem_description);
      if (m_lo.show_names) {
        for (std::size_t i = 0; i < hi.controllables.size(); ++i) CHECK(hi.controllables[i].name == lo.controllables[i].name);
      }
    }
  }
}

TEST_CASE("property: hidden names never leak") {
  for (const auto& spec : bundled()) {
    for (bool ctx : {false, true}) {
      for (bool desc : {false, true}) {
        env::ObservationOptions opts;
        opts.expose_dummies = true;
        auto h = env::render_observation(spec, {ctx, desc, false}, opts);
        auto text = header_text(h);
        INFO(spec.id, " ", text);
        CHECK(env::leaked_names(spec, text).empty());
        for (const auto& [display, truth] : h.name_map) {
          CHECK(display != truth);
        }
      }
    }
  }
}

TEST_CASE("identifier tokens") {
  CHECK(env::identifier_tokens("np.sqrt(var_1) + 2e5*x") == std::vector<std::string>{"np", "var_1", "x"});
  CHECK(env::identifier_tokens("a_b.c 3a") == std::vector<std::string>{"a_b"});
}

TEST_CASE("exposed dummies") {
  const auto& e310 = by_id("env_310");
  env::ObservationOptions opts;
  opts.expose_dummies = true;
  auto h = env::render_observation(e310, PriorMask::level(4), opts);
  REQUIRE(h.controllables.size() == 4);
  CHECK(h.controllables[3].name == "var_4");
  CHECK(h.controllables[3].dummy);
  CHECK(h.name_map.at("var_4") == "S_0");
  auto plain = env::render_observation(e310, PriorMask::level(1));
  CHECK(plain.controllables.size() == 3);
}
