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

#include "dse/exhaustive.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "dse/error.hpp"

namespace dse {

PruneFilter PruneFilter::none() {
  constexpr double inf = std::numeric_limits<double>::infinity();
  PruneFilter f;
  f.total_memory_mb = {-inf, inf};
  f.total_pes = {-inf, inf};
  return f;
}

void PruneFilter::validate(const SearchSpace& space) const {
  if (!(total_memory_mb.first <= total_memory_mb.second))
    throw ValidationError("filter: total_memory_mb range is empty");
  if (!(total_pes.first <= total_pes.second)) throw ValidationError("filter: total_pes range is empty");
  for (const auto& [name, r] : index_ranges) {
    const auto g = space.find(name);
    if (!g) throw ValidationError("filter: unknown parameter " + name);
    if (r.first > r.second || r.first < 0 ||
        r.second >= static_cast<int>(space.param(*g).size()))
      throw ValidationError("filter: bad index range for " + name);
  }
}

PruneFilter PruneFilter::from_json(const nlohmann::json& j) {
  PruneFilter f;
  try {
    for (const auto& [key, _] : j.items())
      if (key != "total_memory_mb" && key != "total_pes" && key != "index_ranges")
        throw ParseError("filter: unknown field " + key);
    if (j.contains("total_memory_mb"))
      f.total_memory_mb = j.at("total_memory_mb").get<std::pair<double, double>>();
    if (j.contains("total_pes")) f.total_pes = j.at("total_pes").get<std::pair<double, double>>();
    if (j.contains("index_ranges"))
      f.index_ranges = j.at("index_ranges").get<std::map<std::string, std::pair<int, int>>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("filter: ") + e.what());
  }
  return f;
}

PruneFilter PruneFilter::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open filter " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

nlohmann::json PruneFilter::to_json() const {
  return {{"total_memory_mb", total_memory_mb},
          {"total_pes", total_pes},
          {"index_ranges", index_ranges}};
}

double total_memory_mb(const HardwareParams& hw) {
  return hw.global_memory_mb + hw.parameter_memory_mb + hw.activation_memory_mb +
         hw.local_memory_kb * hw.num_pes() / 1024.0;
}

namespace {

class Enumerator {
 public:
  Enumerator(const CostModel& model, const PruneFilter& filter, std::optional<double> budget,
             const std::function<bool(const AcceleratorConfig&)>& visit)
      : model_(model), filter_(filter), budget_(budget), visit_(visit) {
    const auto& space = model.space();
    filter.validate(space);
    const std::size_t n = space.num_params();
    lo_.resize(n);
    hi_.resize(n);
    min_at_.resize(n);
    max_at_.resize(n);
    for (std::size_t g = 0; g < n; ++g) {
      lo_[g] = 0;
      hi_[g] = static_cast<int>(space.param(g).size()) - 1;
      if (auto it = filter.index_ranges.find(space.param(g).name); it != filter.index_ranges.end()) {
        lo_[g] = it->second.first;
        hi_[g] = it->second.second;
      }
      const auto& v = space.param(g).values;
      min_at_[g] = max_at_[g] = lo_[g];
      for (int i = lo_[g]; i <= hi_[g]; ++i) {
        if (v[static_cast<std::size_t>(i)] < v[static_cast<std::size_t>(min_at_[g])]) min_at_[g] = i;
        if (v[static_cast<std::size_t>(i)] > v[static_cast<std::size_t>(max_at_[g])]) max_at_[g] = i;
      }
    }
    low_.genome = min_at_;
    high_.genome = max_at_;
  }

  void run() { descend(0); }

 private:
  // Area, memory and PE count grow with every parameter value, so filling the
  // unassigned genes with their smallest (largest) values bounds them below
  // (above).
  bool viable() const {
    const HardwareParams lo = model_.hardware(low_);
    const HardwareParams hi = model_.hardware(high_);
    if (budget_ && area_mm2(lo, model_.calibration()) > *budget_) return false;
    if (total_memory_mb(lo) > filter_.total_memory_mb.second) return false;
    if (total_memory_mb(hi) < filter_.total_memory_mb.first) return false;
    if (lo.num_pes() > filter_.total_pes.second) return false;
    if (hi.num_pes() < filter_.total_pes.first) return false;
    return true;
  }

  bool descend(std::size_t g) {
    const std::size_t n = lo_.size();
    if (g == n) return visit_(low_);
    for (int i = lo_[g]; i <= hi_[g]; ++i) {
      low_.genome[g] = high_.genome[g] = i;
      if (viable() && !descend(g + 1)) return false;
    }
    low_.genome[g] = min_at_[g];
    high_.genome[g] = max_at_[g];
    return true;
  }

  const CostModel& model_;
  const PruneFilter& filter_;
  std::optional<double> budget_;
  const std::function<bool(const AcceleratorConfig&)>& visit_;
  std::vector<int> lo_, hi_, min_at_, max_at_;
  AcceleratorConfig low_, high_;
};

}  // namespace

void prune_enumerate(const CostModel& model, const PruneFilter& filter,
                     std::optional<double> area_budget,
                     const std::function<bool(const AcceleratorConfig&)>& visit) {
  Enumerator(model, filter, area_budget, visit).run();
}

std::uint64_t count_survivors(const CostModel& model, const PruneFilter& filter,
                              std::optional<double> area_budget) {
  std::uint64_t n = 0;
  prune_enumerate(model, filter, area_budget, [&](const AcceleratorConfig&) {
    ++n;
    return true;
  });
  return n;
}

ExhaustiveResult run_exhaustive(const StudySpec& spec, const StudyContext& context,
                                const PruneFilter& filter,
                                const std::function<void(const TrialRecord&)>& on_eval) {
  spec.validate();
  CostModel model(context.space, context.calibration);
  Scorer scorer(model, context.suite, spec);
  ExhaustiveResult best;
  bool found = false;
  prune_enumerate(model, filter, spec.area_budget_mm2, [&](const AcceleratorConfig& c) {
    const Score s = scorer.score(c);
    const bool feasible = s.feasible && s.reward > 0;
    if (on_eval) {
      TrialRecord r;
      r.config = c;
      r.feasible = feasible;
      r.reward = feasible ? s.reward : 0.0;
      if (!feasible) r.infeasibility_reasons = s.reasons;
      r.area_mm2 = s.evaluation.area_mm2;
      r.latency_s = s.evaluation.latency_s;
      r.trial_index = static_cast<std::size_t>(best.n_evaluated);
      r.optimizer_tag = "exhaustive";
      on_eval(r);
    }
    ++best.n_evaluated;
    if (feasible) {
      ++best.n_feasible;
      if (!found || s.reward > best.best_reward) {
        best.best_reward = s.reward;
        best.best_config = c;
        found = true;
      }
    }
    return true;
  });
  if (best.n_evaluated == 0) throw ValidationError("exhaustive: zero survivors after pruning");
  if (!found)
    throw ValidationError("exhaustive: zero feasible survivors among " +
                          std::to_string(best.n_evaluated) + " evaluated");
  return best;
}

}  // namespace dse
