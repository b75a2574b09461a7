#include "eqgym/harness/run_log.hpp"

#include <fstream>
#include <stdexcept>

namespace eqgym::harness {

RunLogWriter::RunLogWriter(const std::filesystem::path& path) {
  file_ = std::fopen(path.c_str(), "ab");
  if (!file_) throw std::runtime_error("cannot open run log " + path.string());
}

RunLogWriter::~RunLogWriter() {
  if (file_) std::fclose(file_);
}

void RunLogWriter::append(const Json& entry) {
  std::string line = session::dump(entry);
  line += '\n';
  std::lock_guard lock(mu_);
  if (std::fwrite(line.data(), 1, line.size(), file_) != line.size() || std::fflush(file_) != 0) {
    throw std::runtime_error("write to run log failed");
  }
}

std::vector<Json> read_run_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read run log " + path.string());
  std::vector<Json> out;
  std::string line;
  while (std::getline(in, line)) {
    if (in.eof()) break;  // no trailing newline: torn write
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("kind")) continue;
    out.push_back(std::move(j));
  }
  return out;
}

Json summary_to_json(const eval::RunSummary& s) {
  Json j = Json::object();
  j["env_id"] = s.env_id;
  j["agent"] = s.agent;
  j["level"] = s.level;
  j["replicate"] = s.replicate;
  j["solved"] = s.solved;
  j["status"] = s.status;
  j["experiments"] = s.experiments;
  j["tests"] = s.tests;
  j["turns"] = s.turns;
  j["unique_hypotheses"] = s.unique_hypotheses;
  j["total_hypotheses"] = s.total_hypotheses;
  j["variable_count"] = s.variable_count;
  j["group"] = s.group;
  return j;
}

eval::RunSummary summary_from_json(const Json& j) {
  eval::RunSummary s;
  s.env_id = j.at("env_id").get<std::string>();
  s.agent = j.at("agent").get<std::string>();
  s.level = j.at("level").get<std::string>();
  s.replicate = j.at("replicate").get<std::size_t>();
  s.solved = j.at("solved").get<bool>();
  s.status = j.at("status").get<std::string>();
  s.experiments = j.at("experiments").get<std::size_t>();
  s.tests = j.at("tests").get<std::size_t>();
  s.turns = j.at("turns").get<std::size_t>();
  s.unique_hypotheses = j.at("unique_hypotheses").get<std::size_t>();
  s.total_hypotheses = j.at("total_hypotheses").get<std::size_t>();
  s.variable_count = j.at("variable_count").get<std::size_t>();
  s.group = j.at("group").get<std::string>();
  return s;
}

}  // namespace eqgym::harness
