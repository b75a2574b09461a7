#include "eqgym/harness/execute.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <map>
#include <thread>

#include "eqgym/evaluation/aggregate.hpp"

namespace eqgym::harness {

namespace {

Json cell_header(const ResolvedPlan& plan, const Cell& cell, const char* kind) {
  Json j = Json::object();
  j["kind"] = kind;
  j["cell"] = cell.index;
  j["env_id"] = cell.env->id;
  j["level"] = cell.level;
  j["agent"] = plan.plan.agents[cell.agent].label();
  j["replicate"] = cell.replicate;
  j["seed"] = cell.seed;
  return j;
}

eval::RunSummary summarize(const ResolvedPlan& plan, const Cell& cell, const session::SessionTranscript& t) {
  auto d = eval::difficulty(*cell.env);
  eval::RunSummary s;
  s.env_id = cell.env->id;
  s.agent = plan.plan.agents[cell.agent].label();
  s.level = cell.level;
  s.replicate = cell.replicate;
  s.solved = t.status == session::Status::kSolved;
  s.status = std::string(session::status_name(t.status));
  s.experiments = t.experiments_used();
  s.tests = t.tests_used();
  s.turns = t.turns.size();
  s.unique_hypotheses = eval::unique_hypotheses(t.hypotheses);
  s.total_hypotheses = t.hypotheses.size();
  s.variable_count = d.variable_count;
  s.group = d.group;
  return s;
}

}  // namespace

Json run_cell(const ResolvedPlan& plan, const Cell& cell) {
  const auto& cfg = plan.plan.agents[cell.agent];
  try {
    session::SessionConfig sc;
    sc.quotas = plan.plan.quotas;
    sc.seed = cell.seed;
    sc.max_turns = plan.plan.max_turns;
    sc.observation.expose_dummies = plan.plan.expose_dummies;
    session::Session s(cell.env, cell.mask, sc);
    auto agent = agents::make_agent(cfg, cell.seed);
    agents::drive(s, *agent, cfg.retry_budget);
    auto t = s.transcript();
    Json j = cell_header(plan, cell, "transcript");
    j["summary"] = summary_to_json(summarize(plan, cell, t));
    j["transcript"] = session::to_json(t);
    return j;
  } catch (const std::exception& e) {
    Json j = cell_header(plan, cell, "error");
    auto d = eval::difficulty(*cell.env);
    eval::RunSummary s;
    s.env_id = cell.env->id;
    s.agent = cfg.label();
    s.level = cell.level;
    s.replicate = cell.replicate;
    s.status = "error";
    s.variable_count = d.variable_count;
    s.group = d.group;
    j["summary"] = summary_to_json(s);
    j["error"] = e.what();
    return j;
  }
}

RunRecord execute(const ResolvedPlan& plan, const Progress& progress) {
  namespace fs = std::filesystem;
  if (plan.plan.out_dir.empty()) throw PlanError("no output directory given");
  std::error_code ec;
  fs::create_directories(plan.plan.out_dir, ec);
  if (ec) throw PlanError("cannot create " + plan.plan.out_dir + ": " + ec.message());
  RunRecord rec;
  rec.plan_hash = plan.hash;
  rec.version = EQGYM_VERSION;
  rec.log_path = fs::path(plan.plan.out_dir) / kRunLogName;
  fs::remove(rec.log_path, ec);
  RunLogWriter log(rec.log_path);

  Json start = Json::object();
  start["kind"] = "run_start";
  start["version"] = rec.version;
  start["plan_hash"] = plan.hash;
  start["seed"] = plan.plan.seed;
  start["cells"] = plan.cells.size();
  log.append(start);

  auto t0 = std::chrono::steady_clock::now();
  rec.cells.resize(plan.cells.size());
  std::mutex mu;
  std::map<std::size_t, Json> pending;  // finished but not yet written
  std::size_t next_to_write = 0;
  std::atomic<std::size_t> next_cell{0};
  std::exception_ptr failure;

  auto work = [&] {
    for (;;) {
      std::size_t i = next_cell.fetch_add(1);
      if (i >= plan.cells.size()) return;
      const auto& cell = plan.cells[i];
      auto c0 = std::chrono::steady_clock::now();
      Json entry = run_cell(plan, cell);
      CellResult r;
      r.index = i;
      r.env_id = cell.env->id;
      r.level = cell.level;
      r.agent = plan.plan.agents[cell.agent].label();
      r.replicate = cell.replicate;
      r.seed = cell.seed;
      r.kind = entry["kind"].get<std::string>();
      r.status = entry["summary"]["status"].get<std::string>();
      r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - c0).count();

      std::lock_guard lock(mu);
      rec.cells[i] = r;
      pending.emplace(i, std::move(entry));
      while (!pending.empty() && pending.begin()->first == next_to_write) {
        log.append(pending.begin()->second);
        pending.erase(pending.begin());
        ++next_to_write;
      }
      if (progress) progress(r);
    }
  };
  // Cell failures are already entries; anything else (a broken log) stops
  // the remaining workers and is rethrown.
  auto worker = [&] {
    try {
      work();
    } catch (...) {
      std::lock_guard lock(mu);
      if (!failure) failure = std::current_exception();
      next_cell = plan.cells.size();
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < plan.parallelism; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::ofstream out(fs::path(plan.plan.out_dir) / kRunRecordName);
  out << to_json(rec).dump(2) << "\n";
  return rec;
}

Json to_json(const RunRecord& r) {
  Json j = Json::object();
  j["plan_hash"] = r.plan_hash;
  j["version"] = r.version;
  j["log"] = r.log_path.filename().string();
  j["wall_seconds"] = r.wall_seconds;
  Json cells = Json::array();
  for (const auto& c : r.cells) {
    cells.push_back(Json::object({{"cell", c.index},
                                  {"env_id", c.env_id},
                                  {"level", c.level},
                                  {"agent", c.agent},
                                  {"replicate", c.replicate},
                                  {"seed", c.seed},
                                  {"kind", c.kind},
                                  {"status", c.status},
                                  {"seconds", c.seconds}}));
  }
  j["cells"] = cells;
  return j;
}

}  // namespace eqgym::harness
