#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "eqgym/harness/execute.hpp"
#include "eqgym/harness/plan.hpp"
#include "eqgym/harness/report.hpp"

using namespace eqgym;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("eqgym_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

harness::RunPlan base_plan(const std::string& agent, const fs::path& out) {
  harness::RunPlan p;
  p.env_paths = {EQGYM_ENVS_DIR};
  p.agents = {agents::parse_agent_spec(agent)};
  p.seed = 42;
  p.parallelism = 1;
  p.out_dir = out.string();
  return p;
}

// Transcript entries keyed by (env, level), without the plan-dependent cell index.
std::map<std::string, std::string> transcripts(const fs::path& log) {
  std::map<std::string, std::string> out;
  for (auto j : harness::read_run_log(log)) {
    if (j["kind"] != "transcript") continue;
    j.erase("cell");
    out[j["env_id"].get<std::string>() + "/" + j["level"].get<std::string>()] = j.dump();
  }
  return out;
}

}  // namespace

TEST_CASE("fnv1a reference values") {
  CHECK(harness::fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(harness::fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(harness::fnv1a("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("plan resolution") {
  auto p = base_plan("scripted:power_law", scratch("plan"));
  auto r = harness::resolve(p);
  CHECK(r.envs.size() == 10);
  CHECK(r.cells.size() == 40);
  CHECK(r.parallelism == 1);
  CHECK(r.hash.size() == 16);

  auto bad = p;
  bad.levels = {"L1", "L5"};
  CHECK_THROWS_AS(harness::resolve(bad), harness::PlanError);
  bad = p;
  bad.levels = {"L1", "L1"};
  CHECK_THROWS_AS(harness::resolve(bad), harness::PlanError);
  bad = p;
  bad.env_paths = {"/nonexistent/envs"};
  CHECK_THROWS_AS(harness::resolve(bad), harness::PlanError);
  bad = p;
  bad.agents.front().name = "oracle";
  CHECK_THROWS_AS(harness::resolve(bad), harness::PlanError);
  bad = p;
  bad.quotas.tests = 0;
  CHECK_THROWS_AS(harness::resolve(bad), harness::PlanError);

  auto custom = p;
  custom.levels = {"custom:TFT"};
  CHECK(harness::resolve(custom).cells.front().mask == env::PriorMask{true, false, true});
  CHECK_FALSE(harness::parse_level_token("custom:TF").has_value());
}

TEST_CASE("property: cell seeds do not depend on other cells") {
  auto small = base_plan("scripted:power_law", scratch("seeds"));
  small.levels = {"L3"};
  auto big = small;
  big.levels = {"L1", "L2", "L3", "L4"};
  big.replicates = 3;
  auto rs = harness::resolve(small), rb = harness::resolve(big);
  for (const auto& c : rs.cells) {
    auto it = std::find_if(rb.cells.begin(), rb.cells.end(), [&](const harness::Cell& d) {
      return d.env->id == c.env->id && d.level == c.level && d.replicate == c.replicate;
    });
    REQUIRE(it != rb.cells.end());
    CHECK(it->seed == c.seed);
  }
  CHECK(harness::cell_seed(1, "a", "L1", "x", 0) != harness::cell_seed(2, "a", "L1", "x", 0));
  CHECK(harness::cell_seed(1, "a", "L1", "x", 0) != harness::cell_seed(1, "a", "L1", "x", 1));
}

TEST_CASE("power_law run is deterministic and scheduling-independent") {
  auto d1 = scratch("det1"), d2 = scratch("det2");
  auto p1 = base_plan("scripted:power_law", d1);
  auto p2 = base_plan("scripted:power_law", d2);
  p2.parallelism = 4;
  auto r1 = harness::execute(harness::resolve(p1));
  auto r2 = harness::execute(harness::resolve(p2));
  CHECK(r1.cells.size() == 40);
  CHECK(slurp(d1 / harness::kRunLogName) == slurp(d2 / harness::kRunLogName));
  auto entries = harness::read_run_log(d1 / harness::kRunLogName);
  CHECK(entries.size() == 41);
  CHECK(entries.front()["kind"] == "run_start");
  CHECK(fs::exists(d1 / harness::kRunRecordName));
  CHECK(slurp(d1 / harness::kRunLogName).find("turn_seconds") == std::string::npos);
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("property: a cell's transcript does not depend on the rest of the plan") {
  auto full = scratch("full"), part = scratch("part");
  auto pf = base_plan("scripted:power_law", full);
  auto pp = base_plan("scripted:power_law", part);
  pp.env_paths = {std::string(EQGYM_ENVS_DIR) + "/env_716.json"};
  pp.levels = {"L2", "L4"};
  harness::execute(harness::resolve(pf));
  harness::execute(harness::resolve(pp));
  auto all = transcripts(full / harness::kRunLogName);
  auto some = transcripts(part / harness::kRunLogName);
  REQUIRE(some.size() == 2);
  for (const auto& [key, text] : some) CHECK(all.at(key) == text);
  fs::remove_all(full);
  fs::remove_all(part);
}

TEST_CASE("a crashing agent only fails its own cell") {
  auto dir = scratch("crash");
  // Dies on the one packet that carries the Hooke context (L1 only).
  auto p = base_plan(
      "subprocess:while IFS= read -r l; do case \"$l\" in *'extension x of an ideal spring'*) exit 1;; esac; "
      "echo '{\"next_experiments\":[],\"test_hypothesis_flag\":false,\"current_hypothesis_formula\":\"\"}'; done",
      dir);
  auto rec = harness::execute(harness::resolve(p));
  std::size_t failures = 0, complete = 0;
  for (const auto& c : rec.cells) {
    if (c.status == "protocol_failure") {
      ++failures;
      CHECK(c.env_id == "hooke");
      CHECK(c.level == "L1");
    } else if (c.kind == "transcript") {
      ++complete;
    }
  }
  CHECK(failures == 1);
  CHECK(complete == 39);
  fs::remove_all(dir);
}

TEST_CASE("reports") {
  auto dir = scratch("report");
  auto p = base_plan("scripted:random", dir);
  p.quotas = {20, 2};
  harness::execute(harness::resolve(p));
  auto files = harness::write_report(dir, {true, true});
  REQUIRE(files.report.by_level.size() == 4);
  for (const auto& row : files.report.by_level) CHECK(row.success_rate == 0.0);
  CHECK(files.text.find("Model") != std::string::npos);
  for (const char* col : {"Mode", "Acc (%)", "Experiments", "Tests", "Turns", "(U)Hyps", "Total Hyps"}) {
    CHECK(files.text.find(col) != std::string::npos);
  }
  CHECK(files.text.find("By variable count") != std::string::npos);
  CHECK(fs::exists(dir / "report.json"));
  auto j = harness::Json::parse(slurp(dir / "report.json"));
  CHECK(j["by_level"].size() == 4);

  // A torn final line leaves a readable prefix.
  auto log = slurp(dir / harness::kRunLogName);
  auto cut = log.substr(0, log.rfind('\n', log.size() - 2) + 40);
  std::ofstream(dir / harness::kRunLogName, std::ios::binary | std::ios::trunc) << cut;
  CHECK(harness::load_summaries(dir).size() == 39);

  std::ofstream(dir / harness::kRunLogName, std::ios::trunc) << "{\"kind\":\"run_start\"}\n";
  CHECK_THROWS_AS(harness::load_summaries(dir), harness::EmptyRun);
  fs::remove_all(dir);
}
