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

#ifndef DSE_TRIAL_HPP_
#define DSE_TRIAL_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dse/space.hpp"

namespace dse {

// One evaluated configuration. reward is 0 whenever feasible is false.
struct TrialRecord {
  AcceleratorConfig config;
  double reward = 0;
  bool feasible = false;
  std::vector<std::string> infeasibility_reasons;
  double area_mm2 = 0;
  std::map<std::string, double> latency_s;
  std::size_t trial_index = 0;
  std::uint64_t seed = 0;
  std::string optimizer_tag;
  std::int64_t proposed_at_ms = 0;
  std::int64_t completed_at_ms = 0;
  std::string transfer_source;  // non-empty for warm-started studies

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

}  // namespace dse

#endif  // DSE_TRIAL_HPP_
