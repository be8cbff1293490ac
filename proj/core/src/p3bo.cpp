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

#include "dse/p3bo.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "dse/error.hpp"
#include "dse/strategy.hpp"

namespace dse {

std::vector<double> p3bo_credits(std::span<const CreditEvent> events, std::size_t n_members,
                                 std::int64_t current_round, double decay) {
  std::vector<double> credit(n_members, 0.0);
  for (const auto& e : events) {
    if (e.member >= n_members) throw ValidationError("p3bo: credit event for unknown member");
    const auto age = std::max<std::int64_t>(0, current_round - e.round);
    credit[e.member] += std::pow(decay, static_cast<double>(age)) * e.improvement;
  }
  return credit;
}

std::vector<double> p3bo_weights(std::span<const double> credits) {
  if (credits.empty()) return {};
  const double top = *std::max_element(credits.begin(), credits.end());
  const double temperature = top > 0 ? top : 1.0;
  std::vector<double> w(credits.size());
  double sum = 0;
  for (std::size_t i = 0; i < credits.size(); ++i) {
    // Shifted by the max so the largest exponent is 0.
    w[i] = std::exp((credits[i] - top) / temperature);
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  return w;
}

std::vector<std::size_t> allocate_slots(std::span<const double> weights, std::size_t n, Rng& rng) {
  if (weights.empty()) throw ValidationError("allocate_slots: no members");
  double total = 0;
  for (double w : weights) {
    if (!(w >= 0)) throw ValidationError("allocate_slots: negative or NaN weight");
    total += w;
  }
  if (!(total > 0)) throw ValidationError("allocate_slots: weights sum to zero");
  std::vector<std::size_t> counts(weights.size(), 0);
  for (std::size_t s = 0; s < n; ++s) {
    double u = rng.uniform() * total;
    std::size_t pick = weights.size() - 1;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0) continue;
      if (u < weights[i]) {
        pick = i;
        break;
      }
      u -= weights[i];
    }
    while (weights[pick] <= 0) --pick;
    ++counts[pick];
  }
  return counts;
}

void P3boParams::validate() const {
  if (!(decay > 0 && decay <= 1)) throw ValidationError("p3bo: decay must be in (0,1]");
  if (round_size < 1) throw ValidationError("p3bo: round_size must be >= 1");
  if (adapt_every_rounds < 1) throw ValidationError("p3bo: adapt_every_rounds must be >= 1");
  for (const auto& m : portfolio)
    if (m.kind == "p3bo") throw ValidationError("p3bo: portfolio members cannot be p3bo");
}

P3boParams P3boParams::from_json(const nlohmann::json& j) {
  P3boParams p;
  p.decay = j.value("decay", p.decay);
  p.round_size = j.value("round_size", p.round_size);
  p.adaptive = j.value("adaptive", p.adaptive);
  p.adapt_every_rounds = j.value("adapt_every_rounds", p.adapt_every_rounds);
  if (j.contains("portfolio"))
    for (const auto& m : j.at("portfolio")) p.portfolio.push_back(optimizer_spec_from_json(m));
  p.validate();
  return p;
}

nlohmann::json P3boParams::to_json() const {
  nlohmann::json members = nlohmann::json::array();
  for (const auto& m : portfolio) members.push_back(optimizer_spec_to_json(m));
  return {{"portfolio", members},
          {"decay", decay},
          {"round_size", round_size},
          {"adaptive", adaptive},
          {"adapt_every_rounds", adapt_every_rounds}};
}

P3bo::P3bo(SearchSpace space, std::uint64_t seed, P3boParams params)
    : Optimizer(std::move(space), seed), params_(std::move(params)) {
  if (params_.portfolio.empty()) params_.portfolio = {{"evolutionary", nlohmann::json::object()}, {"mbo", nlohmann::json::object()}};
  params_.validate();
  if (params_.portfolio.size() < 2) throw ValidationError("p3bo: portfolio needs >= 2 members");
  for (const auto& spec : params_.portfolio)
    members_.push_back(make_optimizer(spec, this->space(), rng().next()));
}

nlohmann::json P3bo::hyperparameters() const {
  nlohmann::json j = params_.to_json();
  nlohmann::json live = nlohmann::json::array();
  for (const auto& m : members_)
    live.push_back({{"kind", std::string(m->kind())}, {"params", m->hyperparameters()}});
  j["members"] = live;
  return j;
}

std::vector<double> P3bo::credits() const {
  return p3bo_credits(events_, members_.size(), round_, params_.decay);
}

std::vector<double> P3bo::weights() const { return p3bo_weights(credits()); }

std::vector<AcceleratorConfig> P3bo::propose(std::size_t n) {
  const auto w = weights();
  const auto counts = allocate_slots(w, n, rng());
  std::vector<AcceleratorConfig> out;
  std::unordered_set<std::uint64_t> batch;
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (counts[i] == 0) continue;
    for (auto& c : members_[i]->ask(counts[i])) {
      const auto r = space().rank(c);
      if (batch.contains(r) || pending_contains(r)) {
        // Left to the base-class repair, which hands back an unowned config.
        members_[i]->cancel(c);
      } else {
        owner_[r] = i;
        batch.insert(r);
      }
      out.push_back(std::move(c));
    }
  }
  return out;
}

void P3bo::observe(std::span<const TrialRecord> records) {
  for (const auto& r : records) {
    const auto key = space().rank(r.config);
    const double before = have_best_ ? best_ : 0.0;
    if (auto it = owner_.find(key); it != owner_.end()) {
      const double gain = r.reward - before;
      if (gain > 0) events_.push_back({it->second, gain, round_});
      owner_.erase(it);
    }
    if (!have_best_ || r.reward > best_) best_ = r.reward;
    have_best_ = true;
    ++told_;
    round_ = static_cast<std::int64_t>(told_ / params_.round_size);
  }
  for (auto& m : members_) m->tell(records);
  if (params_.adaptive) adapt();
}

bool P3bo::adapt() {
  if (round_ <= 0 || round_ % params_.adapt_every_rounds != 0 || round_ == last_adapt_) return false;
  last_adapt_ = round_;
  const auto c = credits();
  std::size_t winner = 0, loser = 0;
  for (std::size_t i = 1; i < c.size(); ++i) {
    if (c[i] > c[winner]) winner = i;
    if (c[i] <= c[loser]) loser = i;
  }
  if (winner == loser) return false;
  auto clone = members_[winner]->spawn_perturbed(rng(), rng().next());
  if (!clone) return false;
  if (!shared_.empty()) clone->warm_start(shared_);
  clone->tell(history());
  members_[loser] = std::move(clone);

  std::vector<CreditEvent> kept;
  for (const auto& e : events_)
    if (e.member != loser) kept.push_back(e);
  for (const auto& e : events_)
    if (e.member == winner) kept.push_back({loser, e.improvement, e.round});
  events_ = std::move(kept);
  for (auto it = owner_.begin(); it != owner_.end();)
    it = it->second == loser ? owner_.erase(it) : std::next(it);
  return true;
}

void P3bo::warm_start(std::span<const TrialRecord> seeds) {
  if (seeds.empty()) return;
  shared_.insert(shared_.end(), seeds.begin(), seeds.end());
  for (auto& m : members_) m->warm_start(seeds);
  for (const auto& r : seeds)
    if (!have_best_ || r.reward > best_) {
      best_ = r.reward;
      have_best_ = true;
    }
}

}  // namespace dse
