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

#ifndef DSE_RUNNER_HPP_
#define DSE_RUNNER_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dse/costmodel.hpp"
#include "dse/objective.hpp"
#include "dse/optimizer.hpp"
#include "dse/space.hpp"
#include "dse/trial.hpp"
#include "dse/workload.hpp"

namespace dse {

// Immutable inputs shared by every evaluation of a study.
struct StudyContext {
  SearchSpace space = SearchSpace::default_space();
  WorkloadSuite suite = WorkloadSuite::default_suite();
  Calibration calibration;

  // Defaults, replaced by the spec's file overrides when present.
  static StudyContext for_spec(const StudySpec& spec);
};

using StrategyFactory = std::function<std::unique_ptr<Optimizer>(std::uint64_t seed)>;
// Builds strategies from spec.optimizer.
StrategyFactory spec_factory(const StudySpec& spec, const SearchSpace& space);

struct RunOptions {
  std::optional<std::filesystem::path> study_dir;  // logs are written here when set
  bool force = false;                              // overwrite an existing study dir
  bool memoize = false;                            // reuse scores of repeated genomes
  std::optional<std::vector<std::uint64_t>> seeds; // overrides first_seed..first_seed+n_seeds-1
  std::vector<TrialRecord> warm_start;             // transfer seeds (re-scored before use)
  std::string transfer_source;
  // Replaces the scorer, e.g. to inject failures.
  std::function<Score(const AcceleratorConfig&)> evaluator;
};

struct SeedRun {
  std::uint64_t seed = 0;
  std::vector<TrialRecord> log;
  double best_reward = 0;
};

struct StudyResult {
  StudySpec spec;
  std::vector<SeedRun> runs;
  double wall_time_s = 0;

  nlohmann::json to_json() const;
};

StudyResult run_study(const StudySpec& spec, const StudyContext& context,
                      const StrategyFactory& factory, const RunOptions& options = {});

// Continues the study stored in options.study_dir: every seed log is replayed
// through tell (re-asking and checking each proposal when max_concurrent is
// 1), then the study runs on to its budget. Refuses a spec whose hash differs
// from the stored one.
StudyResult resume_study(const StudySpec& spec, const StudyContext& context,
                         const StrategyFactory& factory, const RunOptions& options);

// Re-scores records under the study objective (for transfer seeds).
std::vector<TrialRecord> rescore(std::span<const TrialRecord> records, const StudySpec& spec,
                                 const StudyContext& context);

std::filesystem::path seed_log_path(const std::filesystem::path& study_dir, std::uint64_t seed);

}  // namespace dse

#endif  // DSE_RUNNER_HPP_
