// Copyright 2026 The dse Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dse/trial_log.hpp"

#include "dse/error.hpp"

namespace dse {

nlohmann::json trial_to_json(const TrialRecord& r, const SearchSpace& space) {
  nlohmann::json values = nlohmann::json::object();
  for (std::size_t g = 0; g < space.num_params(); ++g)
    values[space.param(g).name] = space.value(r.config, g);
  nlohmann::json j = {{"trial_index", r.trial_index},
                      {"seed", r.seed},
                      {"optimizer_tag", r.optimizer_tag},
                      {"genome", r.config.genome},
                      {"values", values},
                      {"feasible", r.feasible},
                      {"infeasibility_reasons", r.infeasibility_reasons},
                      {"area_mm2", r.area_mm2},
                      {"latency_s", r.latency_s},
                      {"reward", r.reward},
                      {"proposed_at_ms", r.proposed_at_ms},
                      {"completed_at_ms", r.completed_at_ms}};
  if (!r.transfer_source.empty()) j["transfer_source"] = r.transfer_source;
  return j;
}

TrialRecord trial_from_json(const nlohmann::json& j, const SearchSpace& space) {
  TrialRecord r;
  try {
    r.trial_index = j.at("trial_index").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.optimizer_tag = j.at("optimizer_tag").get<std::string>();
    r.config.genome = j.at("genome").get<std::vector<int>>();
    r.feasible = j.at("feasible").get<bool>();
    r.infeasibility_reasons = j.at("infeasibility_reasons").get<std::vector<std::string>>();
    r.area_mm2 = j.at("area_mm2").get<double>();
    r.latency_s = j.at("latency_s").get<std::map<std::string, double>>();
    r.reward = j.at("reward").get<double>();
    r.proposed_at_ms = j.at("proposed_at_ms").get<std::int64_t>();
    r.completed_at_ms = j.at("completed_at_ms").get<std::int64_t>();
    r.transfer_source = j.value("transfer_source", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("trial record: ") + e.what());
  }
  if (!space.contains(r.config)) throw ParseError("trial record: genome outside the search space");
  return r;
}

std::vector<TrialRecord> read_trial_log(const std::filesystem::path& path,
                                        const SearchSpace& space) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open trial log " + path.string());
  std::vector<TrialRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(trial_from_json(nlohmann::json::parse(line), space));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_trial_log(const std::filesystem::path& path, std::span<const TrialRecord> records,
                     const SearchSpace& space) {
  TrialLogWriter w(path, space, false);
  for (const auto& r : records) w.write(r);
}

TrialLogWriter::TrialLogWriter(const std::filesystem::path& path, const SearchSpace& space,
                               bool append)
    : path_(path), space_(&space),
      out_(path, append ? std::ios::app : std::ios::trunc) {
  if (!out_) throw Error("cannot open " + path.string() + " for writing");
}

void TrialLogWriter::write(const TrialRecord& record) {
  out_ << trial_to_json(record, *space_).dump() << '\n';
  out_.flush();
  if (!out_) throw Error("write failed: " + path_.string());
}

std::vector<std::string> log_problems(std::span<const TrialRecord> log, const SearchSpace& space,
                                      std::size_t trial_budget) {
  std::vector<std::string> p;
  if (log.size() > trial_budget)
    p.push_back("log has " + std::to_string(log.size()) + " records, budget " +
                std::to_string(trial_budget));
  for (std::size_t i = 0; i < log.size(); ++i) {
    const auto& r = log[i];
    const std::string at = "record " + std::to_string(i) + ": ";
    if (r.trial_index != i) p.push_back(at + "trial_index " + std::to_string(r.trial_index));
    if (!space.contains(r.config)) p.push_back(at + "genome outside the space");
    if ((r.reward == 0) != !r.feasible) p.push_back(at + "reward/feasible mismatch");
    if (r.reward < 0) p.push_back(at + "negative reward");
    if (r.feasible != r.infeasibility_reasons.empty()) p.push_back(at + "reasons/feasible mismatch");
    if (r.completed_at_ms < r.proposed_at_ms) p.push_back(at + "completed before proposed");
  }
  return p;
}

}  // namespace dse
