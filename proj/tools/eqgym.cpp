#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "eqgym/agents/agent.hpp"
#include "eqgym/harness/execute.hpp"
#include "eqgym/harness/plan.hpp"
#include "eqgym/harness/report.hpp"

using namespace eqgym;

namespace {

struct AgentOptions {
  std::vector<std::string> specs;
  std::string model;
  double temperature = 0.3;
  int max_tokens = 4096;
  std::string api_key_env;
  int timeout = 120;
  std::size_t retry_budget = 3;
};

void add_agent_options(CLI::App* cmd, AgentOptions& o, bool many) {
  auto* a = cmd->add_option("--agent", o.specs, "scripted:<random|power_law>, subprocess:<command> or http:<url>");
  if (many) {
    a->required();
  } else {
    a->expected(1);
  }
  cmd->add_option("--model", o.model, "model name sent to http agents");
  cmd->add_option("--temperature", o.temperature, "sampling temperature for http agents")->capture_default_str();
  cmd->add_option("--max-tokens", o.max_tokens, "completion budget for http agents")->capture_default_str();
  cmd->add_option("--api-key-env", o.api_key_env, "environment variable holding the http bearer key");
  cmd->add_option("--timeout", o.timeout, "seconds to wait for one agent reply")->capture_default_str();
  cmd->add_option("--retry-budget", o.retry_budget, "re-prompts after a malformed reply")->capture_default_str();
}

std::vector<agents::AgentConfig> agent_configs(const AgentOptions& o) {
  std::vector<agents::AgentConfig> out;
  for (const auto& spec : o.specs) {
    auto c = agents::parse_agent_spec(spec);
    c.retry_budget = o.retry_budget;
    c.subprocess_timeout = std::chrono::seconds(o.timeout);
    c.http.model = o.model;
    c.http.temperature = o.temperature;
    c.http.max_tokens = o.max_tokens;
    c.http.api_key_env = o.api_key_env;
    c.http.timeout = std::chrono::seconds(o.timeout);
    agents::validate(c);
    out.push_back(std::move(c));
  }
  return out;
}

int cmd_run(harness::RunPlan plan, const AgentOptions& ao, const std::string& levels, bool quiet) {
  plan.levels.clear();
  std::stringstream ss(levels);
  for (std::string tok; std::getline(ss, tok, ',');) {
    if (!tok.empty()) plan.levels.push_back(tok);
  }
  plan.agents = agent_configs(ao);
  auto resolved = harness::resolve(plan);
  if (!quiet) {
    std::cerr << "plan " << resolved.hash << ": " << resolved.cells.size() << " sessions on " << resolved.parallelism
              << " worker(s)\n";
  }
  std::size_t done = 0;
  auto record = harness::execute(resolved, [&](const harness::CellResult& r) {
    ++done;
    if (!quiet) {
      std::cerr << "[" << done << "/" << resolved.cells.size() << "] " << r.env_id << " " << r.level << " " << r.agent
                << " -> " << r.status << "\n";
    }
  });
  auto files = harness::write_report(plan.out_dir, {});
  std::cout << files.text;
  std::cerr << "run log: " << record.log_path.string() << "\n";
  return 0;
}

int cmd_validate(const std::vector<std::string>& paths) {
  int bad = 0;
  for (const auto& p : paths) {
    try {
      for (const auto& s : env::load_specs(p)) {
        std::cout << "ok  " << s.id << " (" << s.inputs.size() << " inputs)\n";
      }
    } catch (const std::exception& e) {
      std::cout << "bad " << p << ": " << e.what() << "\n";
      ++bad;
    }
  }
  return bad ? 1 : 0;
}

int cmd_play(const std::string& env_file, const std::string& level, const AgentOptions& ao, std::uint64_t seed,
             session::Quotas quotas, bool expose_dummies) {
  auto specs = env::load_specs(env_file);
  if (specs.size() != 1) throw harness::PlanError("play needs exactly one environment, got " + std::to_string(specs.size()));
  auto mask = harness::parse_level_token(level);
  if (!mask) throw harness::PlanError("unknown prior level '" + level + "'");
  AgentOptions one = ao;
  if (one.specs.empty()) one.specs = {"scripted:power_law"};
  auto cfg = agent_configs(one).front();
  if (cfg.kind == agents::AgentKind::kHttp) throw harness::PlanError("play supports scripted and subprocess agents");

  session::SessionConfig sc;
  sc.quotas = quotas;
  sc.seed = seed;
  sc.observation.expose_dummies = expose_dummies;
  session::Session s(std::make_shared<env::EnvironmentSpec>(specs.front()), *mask, sc);
  auto agent = agents::make_agent(cfg, seed);
  agents::drive(s, *agent, cfg.retry_budget);
  std::cout << session::to_json(s.transcript()).dump(2) << "\n";
  return s.status() == session::Status::kSolved ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interactive equation-discovery benchmark"};
  app.require_subcommand(1);
  app.set_version_flag("--version", EQGYM_VERSION);

  harness::RunPlan plan;
  AgentOptions run_agents;
  std::string levels = "L1,L2,L3,L4";
  bool quiet = false;
  auto* run = app.add_subcommand("run", "run agents over environments and prior levels");
  run->add_option("--envs", plan.env_paths, "environment file or directory")->required();
  run->add_option("--levels", levels, "comma-separated L1..L4 or custom:TFT masks")->capture_default_str();
  add_agent_options(run, run_agents, true);
  run->add_option("--experiments-quota", plan.quotas.experiments)->capture_default_str();
  run->add_option("--test-quota", plan.quotas.tests)->capture_default_str();
  run->add_option("--seed", plan.seed)->capture_default_str();
  run->add_option("--replicates", plan.replicates)->capture_default_str();
  run->add_option("--parallel", plan.parallelism, "worker count, 0 for the default")->capture_default_str();
  run->add_option("--max-turns", plan.max_turns)->capture_default_str();
  run->add_flag("--expose-dummies", plan.expose_dummies, "offer dummy variables as controllables");
  run->add_option("--out", plan.out_dir, "output directory")->required();
  run->add_flag("-q,--quiet", quiet, "no progress output");

  std::string run_dir;
  harness::ReportOptions ropts;
  auto* report = app.add_subcommand("report", "summarize a finished or partial run");
  report->add_option("--run", run_dir, "run output directory")->required();
  report->add_flag("--by-difficulty", ropts.by_difficulty, "success rates by variable count");
  report->add_flag("--overlap", ropts.overlap, "levels at which each environment was solved");

  std::vector<std::string> validate_paths;
  auto* validate = app.add_subcommand("validate", "check environment documents");
  validate->add_option("--envs", validate_paths, "environment file or directory")->required();

  std::string play_env, play_level = "L1";
  AgentOptions play_agent;
  std::uint64_t play_seed = 0;
  session::Quotas play_quotas;
  bool play_dummies = false;
  auto* play = app.add_subcommand("play", "run one session and print its transcript");
  play->add_option("--env", play_env, "environment file")->required();
  play->add_option("--level", play_level)->capture_default_str();
  add_agent_options(play, play_agent, false);
  play->add_option("--seed", play_seed)->capture_default_str();
  play->add_option("--experiments-quota", play_quotas.experiments)->capture_default_str();
  play->add_option("--test-quota", play_quotas.tests)->capture_default_str();
  play->add_flag("--expose-dummies", play_dummies);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(plan, run_agents, levels, quiet);
    if (*report) {
      std::cout << harness::write_report(run_dir, ropts).text;
      return 0;
    }
    if (*validate) return cmd_validate(validate_paths);
    if (*play) return cmd_play(play_env, play_level, play_agent, play_seed, play_quotas, play_dummies);
  } catch (const harness::PlanError& e) {
    std::cerr << "plan error: " << e.what() << "\n";
    return 2;
  } catch (const agents::AgentConfigError& e) {
    std::cerr << "agent config error: " << e.what() << "\n";
    return 2;
  } catch (const harness::EmptyRun& e) {
    std::cerr << "empty run: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
