#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "eqgym/environment/observation.hpp"
#include "eqgym/evaluation/aggregate.hpp"
#include "eqgym/evaluation/metrics.hpp"
#include "eqgym/evaluation/oracle.hpp"
#include "eqgym/expr/canonical.hpp"
#include "eqgym/expr/parse.hpp"
#include "support/brute_metrics.hpp"

using namespace eqgym;
using eval::fit_report;

namespace {

const env::EnvironmentSpec& spec(const std::string& id) {
  static const auto specs = env::load_specs(EQGYM_ENVS_DIR);
  for (const auto& s : specs) {
    if (s.id == id) return s;
  }
  throw std::runtime_error(id);
}

session::HypothesisRecord hyp(const std::string& text) {
  session::HypothesisRecord h;
  h.formula_text = text;
  try {
    h.parsed = expr::parse(text);
  } catch (const expr::ParseError& e) {
    h.parse_error = e.what();
  }
  return h;
}

// Valid history records for `s` at level L1, drawn by scale hint.
std::vector<session::ExperimentRecord> history(const env::EnvironmentSpec& s, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<session::ExperimentRecord> out;
  while (static_cast<int>(out.size()) < n) {
    session::ExperimentRecord r;
    expr::Bindings b;
    for (const auto& v : s.inputs) {
      double x = expr::sample_by_hint(*v.domain, rng);
      b[v.name] = x;
      r.assignment.emplace_back(v.name, x);
    }
    auto o = env::run_experiment(s, b);
    if (!o) continue;
    r.output = o.value();
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST_CASE("fit_report examples") {
  std::vector<double> a{1, 2, 3};
  auto r = fit_report(a, a);
  CHECK(*r.r2 == 1.0);
  CHECK(*r.mse == 0.0);
  CHECK(*r.kendall_tau == 1.0);
  CHECK(*r.mape == 0.0);

  auto rev = fit_report(std::vector<double>{3, 2, 1}, std::vector<double>{1, 2, 3});
  CHECK(*rev.kendall_tau == -1.0);

  auto dbl = fit_report(std::vector<double>{2, 4, 6}, std::vector<double>{1, 2, 3});
  CHECK(*dbl.kendall_tau == 1.0);
  CHECK(*dbl.mape == 1.0);
  CHECK(*dbl.r2 == -6.0);
  CHECK(*dbl.mse == doctest::Approx(14.0 / 3.0));

  CHECK_THROWS_AS(fit_report(std::vector<double>{}, std::vector<double>{}), eval::EmptyInput);
}

TEST_CASE("fit_report edge rules") {
  // Zero-variance observations.
  auto flat = fit_report(std::vector<double>{2, 2}, std::vector<double>{2, 2});
  CHECK(*flat.r2 == 1.0);
  auto flat_bad = fit_report(std::vector<double>{2, 3}, std::vector<double>{2, 2});
  CHECK_FALSE(flat_bad.r2.has_value());
  CHECK_FALSE(flat_bad.kendall_tau.has_value());
  // MAPE skips zero observations; undefined if all are skipped.
  auto z = fit_report(std::vector<double>{1, 1}, std::vector<double>{0, 0});
  CHECK_FALSE(z.mape.has_value());
  auto tiny_residual = fit_report(std::vector<double>{1, 2, 3 + 1e-15}, std::vector<double>{1, 2, 3});
  CHECK(*tiny_residual.r2 < 1.0);
  CHECK(*tiny_residual.mse > 0.0);
}

TEST_CASE("fit_report matches brute force on random sets, all kernels") {
  std::mt19937_64 rng(31);
  std::vector<const simd::Kernels*> ks{&simd::scalar_kernels()};
  if (auto* k = simd::avx2_kernels()) ks.push_back(k);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t n = 1 + rng() % 40;
    auto [pred, obs] = testing::random_prediction_set(rng, n);
    auto ref = testing::brute_fit(pred, obs);
    for (const auto* k : ks) {
      auto got = fit_report(pred, obs, 0, *k);
      REQUIRE(testing::close_fit(got, ref, 1e-12));
    }
  }
}

TEST_CASE("property: kendall tau is invariant under positive scaling") {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> h(25), y(25);
    for (auto& v : h) v = std::round(u(rng) * 4) / 4;
    for (auto& v : y) v = std::round(u(rng) * 2) / 2;
    double c = std::ldexp(1.0, static_cast<int>(rng() % 20) - 10);  // exact scaling
    std::vector<double> ch(h);
    for (auto& v : ch) v *= c;
    CHECK(eval::kendall_tau_b(h, y) == eval::kendall_tau_b(ch, y));
    CHECK(eval::kendall_tau_b(std::vector<double>(h), y) == eval::kendall_tau_b(ch, y));
  }
}

TEST_CASE("property: r2 <= 1 and r2 == 1 iff mse == 0") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 500; ++trial) {
    auto [pred, obs] = testing::random_prediction_set(rng, 2 + rng() % 20);
    if (trial % 5 == 0) pred = obs;
    auto r = fit_report(pred, obs);
    if (!r.r2) continue;
    CHECK(*r.r2 <= 1.0);
    double mean = 0;
    for (double o : obs) mean += o;
    mean /= static_cast<double>(obs.size());
    bool varies = std::any_of(obs.begin(), obs.end(), [&](double o) { return o != obs[0]; });
    if (varies) CHECK((*r.r2 == 1.0) == (*r.mse == 0.0));
  }
}

TEST_CASE("difficulty") {
  auto d409 = eval::difficulty(spec("env_409"));
  CHECK(d409.variable_count == 4);
  CHECK(d409.group == "4-6");
  auto d310 = eval::difficulty(spec("env_310"));
  CHECK(d310.variable_count == 3);
  CHECK(d310.group == "1-3");
  CHECK(eval::difficulty(spec("hooke")).variable_count == 2);
  CHECK(eval::difficulty(spec("hooke")).equation_length ==
        expr::render(expr::canonicalize(expr::parse("F / k"))).size());
  CHECK(eval::difficulty_group(7) == "7-9");
  CHECK(eval::difficulty_group(10) == "10+");
}

TEST_CASE("unique_hypotheses") {
  std::vector<session::HypothesisRecord> a{hyp("F/k"), hyp("k*F"), hyp("F/k")};
  CHECK(eval::unique_hypotheses(a) == 2);
  std::vector<session::HypothesisRecord> b{hyp("F/k"), hyp("F * k**-1")};
  CHECK(eval::unique_hypotheses(b) == 1);
  CHECK(eval::unique_hypotheses({}) == 0);
  std::vector<session::HypothesisRecord> c{hyp("F/"), hyp("F/"), hyp("F //")};
  CHECK(eval::unique_hypotheses(c) == 2);
}

TEST_CASE("aggregate") {
  auto run = [](std::string env, std::string level, bool solved, std::size_t exps) {
    eval::RunSummary r;
    r.env_id = std::move(env);
    r.agent = "a";
    r.level = std::move(level);
    r.solved = solved;
    r.experiments = exps;
    r.tests = 1;
    r.turns = 2;
    r.unique_hypotheses = 3;
    r.total_hypotheses = 4;
    r.group = "1-3";
    return r;
  };
  std::vector<eval::RunSummary> runs{run("e1", "L1", true, 10), run("e2", "L1", false, 100),
                                     run("e3", "L1", true, 20), run("e4", "L1", false, 100),
                                     run("e1", "L4", true, 5), run("e2", "L2", false, 100)};
  auto rep = eval::aggregate(runs);
  REQUIRE(rep.by_level.size() == 3);
  const auto& l1 = rep.by_level[0];
  CHECK(l1.level == "L1");
  CHECK(l1.success_rate == 0.5);
  CHECK(*l1.experiments == 15.0);
  CHECK(*l1.efficiency.hypothesis_efficiency == 2.0);
  const auto& l2 = rep.by_level[1];
  CHECK(l2.success_rate == 0.0);
  CHECK_FALSE(l2.experiments.has_value());
  CHECK_FALSE(l2.efficiency.iteration_efficiency.has_value());
  CHECK(rep.solved_levels["a"]["e1"] == std::set<std::string>{"L1", "L4"});
  CHECK(rep.solved_levels["a"]["e2"].empty());

  // Permutation invariance.
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10; ++i) {
    std::shuffle(runs.begin(), runs.end(), rng);
    auto again = eval::aggregate(runs);
    REQUIRE(again.by_level.size() == rep.by_level.size());
    for (std::size_t k = 0; k < rep.by_level.size(); ++k) {
      CHECK(again.by_level[k].success_rate == rep.by_level[k].success_rate);
      CHECK(again.by_level[k].experiments == rep.by_level[k].experiments);
    }
    CHECK(again.solved_levels == rep.solved_levels);
  }
}

TEST_CASE("oracle examples") {
  eval::OracleConfig cfg;
  const auto& hooke = spec("hooke");
  auto h1 = env::render_observation(hooke, env::PriorMask::level(1));
  auto hist = history(hooke, 6, 1);
  auto ok = eval::oracle_test(expr::parse("F/k"), hooke, hist, h1, cfg);
  CHECK(*ok.fit.r2 == 1.0);
  CHECK(*ok.fit.mse == 0.0);
  CHECK(ok.verdict.equivalent);

  // Same hypothesis in L4 display names.
  auto h4 = env::render_observation(hooke, env::PriorMask::level(4));
  std::vector<session::ExperimentRecord> hist4 = hist;
  for (auto& r : hist4) {
    r.assignment[0].first = "var_1";
    r.assignment[1].first = "var_2";
  }
  CHECK(eval::oracle_test(expr::parse("var_1/var_2"), hooke, hist4, h4, cfg).verdict.equivalent);

  const auto& e409 = spec("env_409");
  auto h409 = env::render_observation(e409, env::PriorMask::level(1));
  auto hist409 = history(e409, 8, 2);
  auto miss = eval::oracle_test(expr::parse("epsilon_0*E_0*a/np.sqrt(a**2-r**2)"), e409, hist409, h409, cfg);
  CHECK_FALSE(miss.verdict.equivalent);
  REQUIRE(miss.fit.kendall_tau.has_value());
  // Independent pairwise concordance count on the same points.
  std::vector<double> pred, obs;
  for (const auto& r : hist409) {
    pred.push_back(*r.output / 2);
    obs.push_back(*r.output);
  }
  CHECK(*miss.fit.kendall_tau == doctest::Approx(testing::brute_fit(pred, obs).kendall_tau.value()));
  CHECK(*miss.fit.kendall_tau == 1.0);

  const auto& e716 = spec("env_716");
  auto h716 = env::render_observation(e716, env::PriorMask::level(1));
  auto three = eval::oracle_test(expr::parse("3*np.sqrt(k*q*Q/(m*L**3))"), e716, history(e716, 10, 3), h716, cfg);
  CHECK_FALSE(three.verdict.equivalent);
  CHECK(*three.fit.r2 > 0.99);

  // Empty history: fit undefined, verdict still judged.
  auto empty = eval::oracle_test(expr::parse("F/k"), hooke, {}, h1, cfg);
  CHECK_FALSE(empty.fit.defined());
  CHECK(empty.verdict.equivalent);
}

TEST_CASE("oracle skips failing points and gives up past half") {
  eval::OracleConfig cfg;
  const auto& hooke = spec("hooke");
  auto h1 = env::render_observation(hooke, env::PriorMask::level(1));
  auto hist = history(hooke, 10, 4);
  // log(F - 1) fails wherever F <= 1.
  auto r = eval::oracle_test(expr::parse("np.log(F - 1)"), hooke, hist, h1, cfg);
  std::size_t failing = 0;
  for (const auto& rec : hist) failing += rec.assignment[0].second <= 1;
  CHECK(r.fit.n_skipped == failing);
  CHECK(r.fit.defined() == (2 * failing <= hist.size()));
}

TEST_CASE("oracle is deterministic and honours the judge hook") {
  const auto& e716 = spec("env_716");
  auto h = env::render_observation(e716, env::PriorMask::level(1));
  auto hist = history(e716, 5, 9);
  eval::OracleConfig cfg;
  cfg.equivalence.seed = 77;
  auto a = eval::oracle_test(expr::parse("3.0072*np.sqrt(k*q*Q/(m*L**3))"), e716, hist, h, cfg);
  auto b = eval::oracle_test(expr::parse("3.0072*np.sqrt(k*q*Q/(m*L**3))"), e716, hist, h, cfg);
  CHECK(a.verdict == b.verdict);
  CHECK(a.fit == b.fit);
  CHECK_FALSE(a.verdict.equivalent);
  cfg.judge = [](std::string_view, std::string_view) { return std::optional<bool>(true); };
  auto judged = eval::oracle_test(expr::parse("3.0072*np.sqrt(k*q*Q/(m*L**3))"), e716, hist, h, cfg);
  CHECK(judged.verdict.equivalent);
  CHECK(judged.verdict.method == expr::EquivalenceMethod::kJudge);
}
