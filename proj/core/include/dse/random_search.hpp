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

#ifndef DSE_RANDOM_SEARCH_HPP_
#define DSE_RANDOM_SEARCH_HPP_

#include <unordered_set>

#include "dse/optimizer.hpp"

namespace dse {

// Uniform sampling. With `unique` set, never proposes a configuration that
// was already told (sampling without replacement) until the space runs out.
class RandomSearch : public Optimizer {
 public:
  RandomSearch(SearchSpace space, std::uint64_t seed, bool unique = false)
      : Optimizer(std::move(space), seed), unique_(unique) {}

  std::string_view kind() const override { return "random"; }
  nlohmann::json hyperparameters() const override { return {{"unique", unique_}}; }

 protected:
  std::vector<AcceleratorConfig> propose(std::size_t n) override;
  void observe(std::span<const TrialRecord> records) override;

 private:
  AcceleratorConfig draw_unseen(const std::unordered_set<std::uint64_t>& batch);

  bool unique_;
  std::unordered_set<std::uint64_t> seen_;
};

}  // namespace dse

#endif  // DSE_RANDOM_SEARCH_HPP_
