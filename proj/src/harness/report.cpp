#include "eqgym/harness/report.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "eqgym/harness/execute.hpp"

namespace eqgym::harness {

namespace {

std::string fixed(std::optional<double> v, int decimals) {
  if (!v) return "-";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, *v);
  return buf;
}

class Table {
 public:
  explicit Table(std::vector<std::string> header) { rows_.push_back(std::move(header)); }
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  std::string render() const {
    std::vector<std::size_t> width(rows_[0].size(), 0);
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
    }
    std::ostringstream out;
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      const auto& r = rows_[k];
      for (std::size_t i = 0; i < r.size(); ++i) {
        // First two columns are labels and align left; numbers align right.
        std::string pad(width[i] - r[i].size(), ' ');
        out << (i ? "  " : "") << (i < 2 ? r[i] + pad : pad + r[i]);
      }
      out << "\n";
      if (k == 0) {
        for (std::size_t i = 0; i < width.size(); ++i) out << (i ? "  " : "") << std::string(width[i], '-');
        out << "\n";
      }
    }
    return out.str();
  }

 private:
  std::vector<std::vector<std::string>> rows_;
};

Json optional_json(std::optional<double> v) { return v ? Json(*v) : Json(nullptr); }

Json row_json(const eval::GroupRow& r) {
  Json j = Json::object();
  j["agent"] = r.agent;
  j["level"] = r.level;
  j["runs"] = r.runs;
  j["solved"] = r.solved;
  j["success_rate"] = r.success_rate;
  j["experiments"] = optional_json(r.experiments);
  j["tests"] = optional_json(r.tests);
  j["turns"] = optional_json(r.turns);
  j["unique_hypotheses"] = optional_json(r.unique_hypotheses);
  j["total_hypotheses"] = optional_json(r.total_hypotheses);
  j["efficiency"] = Json::object({{"iteration", optional_json(r.efficiency.iteration_efficiency)},
                                  {"sample", optional_json(r.efficiency.sample_efficiency)},
                                  {"hypothesis", optional_json(r.efficiency.hypothesis_efficiency)}});
  return j;
}

std::string join_levels(const std::set<std::string>& levels) {
  std::string s;
  for (const auto& l : levels) s += (s.empty() ? "" : ",") + l;
  return s.empty() ? "none" : s;
}

}  // namespace

std::vector<eval::RunSummary> load_summaries(const std::filesystem::path& run_dir) {
  auto path = run_dir / kRunLogName;
  if (!std::filesystem::exists(path)) throw EmptyRun("no run log at " + path.string());
  std::vector<eval::RunSummary> out;
  for (const auto& entry : read_run_log(path)) {
    auto kind = entry["kind"];
    if (kind != "transcript" && kind != "error") continue;
    out.push_back(summary_from_json(entry.at("summary")));
  }
  if (out.empty()) throw EmptyRun("run log at " + path.string() + " holds no sessions");
  return out;
}

std::string render_report(const eval::AggregateReport& report, const ReportOptions& options) {
  std::ostringstream out;
  Table main({"Model", "Mode", "Acc (%)", "Experiments", "Tests", "Turns", "(U)Hyps", "Total Hyps"});
  Table eff({"Model", "Mode", "Iteration", "Sample", "Hypothesis"});
  for (const auto& r : report.by_level) {
    main.add({r.agent, r.level, fixed(100.0 * r.success_rate, 2), fixed(r.experiments, 2), fixed(r.tests, 2),
              fixed(r.turns, 2), fixed(r.unique_hypotheses, 2), fixed(r.total_hypotheses, 2)});
    eff.add({r.agent, r.level, fixed(r.efficiency.iteration_efficiency, 2), fixed(r.efficiency.sample_efficiency, 2),
             fixed(r.efficiency.hypothesis_efficiency, 2)});
  }
  out << main.render() << "\nEfficiency (solved runs)\n" << eff.render();

  if (options.by_difficulty) {
    Table t({"Model", "Mode", "Variables", "Runs", "Solved", "Acc (%)"});
    for (const auto& r : report.by_difficulty) {
      auto slash = r.level.find('/');
      t.add({r.agent, r.level.substr(0, slash), r.level.substr(slash + 1), std::to_string(r.runs),
             std::to_string(r.solved), fixed(100.0 * r.success_rate, 2)});
    }
    out << "\nBy variable count\n" << t.render();
  }

  if (options.overlap) {
    out << "\nSolved levels per environment\n";
    for (const auto& [agent, envs] : report.solved_levels) {
      Table t({"Model", "Environment", "Solved at"});
      std::map<std::string, std::size_t> sets;
      for (const auto& [env, levels] : envs) {
        t.add({agent, env, join_levels(levels)});
        ++sets[join_levels(levels)];
      }
      out << t.render();
      Table s({"Model", "Solved at", "Environments"});
      for (const auto& [levels, count] : sets) s.add({agent, levels, std::to_string(count)});
      out << "\n" << s.render();
    }
  }
  return out.str();
}

Json report_to_json(const eval::AggregateReport& report) {
  Json j = Json::object();
  Json levels = Json::array(), groups = Json::array();
  for (const auto& r : report.by_level) levels.push_back(row_json(r));
  for (const auto& r : report.by_difficulty) {
    Json row = row_json(r);
    auto slash = r.level.find('/');
    row["level"] = r.level.substr(0, slash);
    row["group"] = r.level.substr(slash + 1);
    groups.push_back(std::move(row));
  }
  j["by_level"] = levels;
  j["by_difficulty"] = groups;
  Json solved = Json::object();
  for (const auto& [agent, envs] : report.solved_levels) {
    Json per = Json::object();
    for (const auto& [env, lv] : envs) per[env] = std::vector<std::string>(lv.begin(), lv.end());
    solved[agent] = per;
  }
  j["solved_levels"] = solved;
  return j;
}

ReportFiles write_report(const std::filesystem::path& run_dir, const ReportOptions& options) {
  auto summaries = load_summaries(run_dir);
  ReportFiles f;
  f.report = eval::aggregate(summaries);
  f.text = render_report(f.report, options);
  std::ofstream(run_dir / "report.txt") << f.text;
  std::ofstream(run_dir / "report.json") << report_to_json(f.report).dump(2) << "\n";
  return f;
}

}  // namespace eqgym::harness
