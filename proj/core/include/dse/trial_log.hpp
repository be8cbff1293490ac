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

#ifndef DSE_TRIAL_LOG_HPP_
#define DSE_TRIAL_LOG_HPP_

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dse/space.hpp"
#include "dse/trial.hpp"

namespace dse {

nlohmann::json trial_to_json(const TrialRecord& record, const SearchSpace& space);
TrialRecord trial_from_json(const nlohmann::json& j, const SearchSpace& space);

// Reads a JSONL log; ParseError messages name the offending 1-based line.
std::vector<TrialRecord> read_trial_log(const std::filesystem::path& path, const SearchSpace& space);
void write_trial_log(const std::filesystem::path& path, std::span<const TrialRecord> records,
                     const SearchSpace& space);

// Appends one flushed line per record.
class TrialLogWriter {
 public:
  TrialLogWriter(const std::filesystem::path& path, const SearchSpace& space, bool append);
  void write(const TrialRecord& record);

 private:
  std::filesystem::path path_;
  const SearchSpace* space_;
  std::ofstream out_;
};

// Schema and accounting problems of one seed's log (empty when clean):
// dense indices, genome in space, reward == 0 iff infeasible, reasons only
// when infeasible, length <= budget.
std::vector<std::string> log_problems(std::span<const TrialRecord> log, const SearchSpace& space,
                                      std::size_t trial_budget);

}  // namespace dse

#endif  // DSE_TRIAL_LOG_HPP_
