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

#include "dse/optimizer.hpp"

#include <algorithm>

#include "dse/error.hpp"

namespace dse {

Optimizer::Optimizer(SearchSpace space, std::uint64_t seed)
    : space_(std::move(space)), rng_(seed) {}

std::vector<AcceleratorConfig> Optimizer::ask(std::size_t n) {
  if (n == 0) return {};
  if (pending_.size() + n > space_.cardinality())
    throw ValidationError("ask: not enough distinct configurations left to propose");
  auto proposals = propose(n);
  if (proposals.size() != n) throw Error("strategy returned the wrong number of proposals");
  std::unordered_set<std::uint64_t> batch;
  for (auto& p : proposals) {
    space_.check(p);
    auto r = space_.rank(p);
    if (pending_.contains(r) || batch.contains(r)) {
      p = repair(p, batch);
      r = space_.rank(p);
    }
    batch.insert(r);
  }
  pending_.insert(batch.begin(), batch.end());
  return proposals;
}

AcceleratorConfig Optimizer::repair(const AcceleratorConfig& config,
                                    const std::unordered_set<std::uint64_t>& taken) {
  auto free = [&](const AcceleratorConfig& c) {
    const auto r = space_.rank(c);
    return !pending_.contains(r) && !taken.contains(r);
  };
  AcceleratorConfig c = config;
  for (int attempt = 0; attempt < 64; ++attempt) {
    c = space_.mutate_gene(c, rng_.below(space_.num_params()), rng_);
    if (free(c)) return c;
  }
  for (int attempt = 0; attempt < 4096; ++attempt) {
    c = space_.sample_uniform(rng_);
    if (free(c)) return c;
  }
  for (std::uint64_t r = 0; r < space_.cardinality(); ++r) {
    c = space_.unrank(r);
    if (free(c)) return c;
  }
  throw ValidationError("ask: search space exhausted by pending configurations");
}

void Optimizer::tell(std::span<const TrialRecord> records) {
  if (records.empty()) return;
  for (const auto& r : records) {
    space_.check(r.config);
    pending_.erase(space_.rank(r.config));
    history_.push_back(r);
  }
  observe(records);
}

std::vector<AcceleratorConfig> Optimizer::pending_configs() const {
  std::vector<std::uint64_t> ranks(pending_.begin(), pending_.end());
  std::sort(ranks.begin(), ranks.end());
  std::vector<AcceleratorConfig> out;
  out.reserve(ranks.size());
  for (auto r : ranks) out.push_back(space_.unrank(r));
  return out;
}

std::unique_ptr<Optimizer> Optimizer::spawn_perturbed(Rng&, std::uint64_t) const {
  return nullptr;
}

double perturb(double x, double lo, double hi, Rng& rng) {
  return std::clamp(x * rng.uniform(0.5, 2.0), lo, hi);
}

}  // namespace dse
