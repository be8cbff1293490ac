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

#include "dse/random_search.hpp"

namespace dse {

std::vector<AcceleratorConfig> RandomSearch::propose(std::size_t n) {
  std::vector<AcceleratorConfig> out;
  out.reserve(n);
  std::unordered_set<std::uint64_t> batch;
  for (std::size_t i = 0; i < n; ++i) {
    auto c = unique_ ? draw_unseen(batch) : space().sample_uniform(rng());
    batch.insert(space().rank(c));
    out.push_back(std::move(c));
  }
  return out;
}

AcceleratorConfig RandomSearch::draw_unseen(const std::unordered_set<std::uint64_t>& batch) {
  auto taken = [&](std::uint64_t r) {
    return seen_.contains(r) || batch.contains(r) || pending_contains(r);
  };
  for (int attempt = 0; attempt < 64; ++attempt) {
    auto c = space().sample_uniform(rng());
    if (!taken(space().rank(c))) return c;
  }
  if (space().cardinality() > (1ULL << 24)) {
    for (;;) {
      auto c = space().sample_uniform(rng());
      if (!taken(space().rank(c))) return c;
    }
  }
  // Small, mostly visited space: pick uniformly among the remaining ranks.
  std::vector<std::uint64_t> remaining;
  for (std::uint64_t r = 0; r < space().cardinality(); ++r)
    if (!taken(r)) remaining.push_back(r);
  if (remaining.empty()) return space().sample_uniform(rng());
  return space().unrank(remaining[rng().below(remaining.size())]);
}

void RandomSearch::observe(std::span<const TrialRecord> records) {
  if (!unique_) return;
  for (const auto& r : records) seen_.insert(space().rank(r.config));
}

}  // namespace dse
