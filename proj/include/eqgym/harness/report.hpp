#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "eqgym/evaluation/aggregate.hpp"
#include "eqgym/harness/run_log.hpp"

namespace eqgym::harness {

class EmptyRun : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ReportOptions {
  bool by_difficulty = false;
  bool overlap = false;
};

// Summaries of every transcript and error entry in a run directory's log.
// Throws EmptyRun when there are none.
std::vector<eval::RunSummary> load_summaries(const std::filesystem::path& run_dir);

// Table columns follow the benchmark's results table; means are over
// solved runs and print as "-" when nothing was solved.
std::string render_report(const eval::AggregateReport& report, const ReportOptions& options);
Json report_to_json(const eval::AggregateReport& report);

struct ReportFiles {
  eval::AggregateReport report;
  std::string text;
};

// Writes report.txt and report.json next to the log.
ReportFiles write_report(const std::filesystem::path& run_dir, const ReportOptions& options);

}  // namespace eqgym::harness
