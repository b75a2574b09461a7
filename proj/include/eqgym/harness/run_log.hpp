#pragma once

#include <cstdio>
#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include "eqgym/evaluation/aggregate.hpp"
#include "eqgym/session/wire.hpp"

namespace eqgym::harness {

using session::Json;

// Append-only JSON-lines file; every line carries a "kind" field
// ("run_start", "transcript" or "error"). Each write is flushed, so a
// killed run leaves a readable prefix.
class RunLogWriter {
 public:
  explicit RunLogWriter(const std::filesystem::path& path);
  ~RunLogWriter();
  RunLogWriter(const RunLogWriter&) = delete;
  RunLogWriter& operator=(const RunLogWriter&) = delete;

  void append(const Json& entry);

 private:
  std::mutex mu_;
  std::FILE* file_ = nullptr;
};

// Complete lines that parse as objects with a "kind"; a torn final line
// is ignored.
std::vector<Json> read_run_log(const std::filesystem::path& path);

Json summary_to_json(const eval::RunSummary& s);
eval::RunSummary summary_from_json(const Json& j);

}  // namespace eqgym::harness
