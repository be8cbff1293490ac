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

#ifndef DSE_ANALYSIS_HPP_
#define DSE_ANALYSIS_HPP_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dse/objective.hpp"
#include "dse/rng.hpp"
#include "dse/runner.hpp"
#include "dse/space.hpp"
#include "dse/trial.hpp"

namespace dse {

// Running maximum of the rewards, one entry per record.
std::vector<double> best_so_far_curve(std::span<const TrialRecord> log);

struct Interval {
  double lo = 0;
  double hi = 0;
};

// Percentile bootstrap of the mean over resampled values. Constant input
// returns (c, c) exactly.
Interval bootstrap_ci(std::span<const double> values, Rng& rng, double level = 0.95,
                      std::size_t resamples = 1000);

double feasibility_ratio(std::span<const TrialRecord> log);
double uniqueness_ratio(std::span<const TrialRecord> log);

// Mean pairwise distance (numeric encoding) of the unique configurations with
// reward >= fraction * max reward; 0 when fewer than two qualify.
double diversity_score(std::span<const TrialRecord> log, const SearchSpace& space,
                       double fraction = 0.75);

// 1-based count of trials until the reward first reaches `target`;
// log.size() + 1 when it never does.
std::size_t trials_to_reach(std::span<const TrialRecord> log, double target);

double median(std::vector<double> values);

// CSV of the k best unique trials (reward descending): rank, genome indices
// under the parameter names, numeric encoding, reward.
void top_k_export(std::span<const TrialRecord> log, const SearchSpace& space,
                  const std::filesystem::path& path, std::size_t k = 50);

struct StudyData {
  std::string label;
  StudySpec spec;
  std::vector<SeedRun> runs;
};

StudyData load_study(const std::filesystem::path& study_dir, const SearchSpace& space);

// Writes report.json, curves.csv, metrics.csv and top50.csv into out_dir and
// returns the report. Spec mismatches across studies land in
// report["warnings"].
nlohmann::json compare_report(const std::vector<std::filesystem::path>& study_dirs,
                              const std::filesystem::path& out_dir, const SearchSpace& space);

}  // namespace dse

#endif  // DSE_ANALYSIS_HPP_
