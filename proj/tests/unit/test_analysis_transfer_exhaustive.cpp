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

#include <cmath>
#include <fstream>
#include <set>

#include "doctest.h"
#include "dse/analysis.hpp"
#include "dse/error.hpp"
#include "dse/evolution.hpp"
#include "dse/exhaustive.hpp"
#include "dse/gp_bandit.hpp"
#include "dse/random_search.hpp"
#include "dse/runner.hpp"
#include "dse/transfer.hpp"
#include "temp_dir.hpp"

using namespace dse;
namespace fs = std::filesystem;

namespace {

TrialRecord rec(const AcceleratorConfig& c, double reward, double area = 1.0) {
  TrialRecord r;
  r.config = c;
  r.reward = reward;
  r.feasible = reward > 0;
  r.area_mm2 = area;
  return r;
}

const SearchSpace& line() {
  static const SearchSpace s({{"a", {0, 1, 2, 3, 4}}, {"b", {0, 1, 2}}});
  return s;
}

}  // namespace

TEST_CASE("best-so-far curve and trials to reach") {
  const std::vector<TrialRecord> log{rec({{0, 0}}, 0.0), rec({{1, 0}}, 2.0), rec({{2, 0}}, 1.0),
                                     rec({{3, 0}}, 3.0)};
  CHECK(best_so_far_curve(log) == std::vector<double>{0.0, 2.0, 2.0, 3.0});
  CHECK(trials_to_reach(log, 2.0) == 2);
  CHECK(trials_to_reach(log, 2.5) == 4);
  CHECK(trials_to_reach(log, 3.5) == 5);
  CHECK(best_so_far_curve({}).empty());
}

TEST_CASE("ratios") {
  const std::vector<TrialRecord> log{rec({{0, 0}}, 0.0), rec({{0, 0}}, 0.0), rec({{1, 0}}, 2.0),
                                     rec({{2, 1}}, 1.0)};
  CHECK(feasibility_ratio(log) == 0.5);
  CHECK(uniqueness_ratio(log) == 0.75);
  CHECK_THROWS_AS(feasibility_ratio({}), ValidationError);
}

TEST_CASE("diversity is the mean pairwise distance among near-best designs") {
  // Top is 4; threshold 3 keeps the three designs with reward >= 3 (one repeated).
  const std::vector<TrialRecord> log{rec({{0, 0}}, 4.0), rec({{4, 0}}, 3.5), rec({{4, 2}}, 3.0),
                                     rec({{4, 2}}, 3.0), rec({{2, 1}}, 1.0)};
  // encodings (0,0), (1,0), (1,1): distances 1, sqrt 2, 1
  CHECK(diversity_score(log, line(), 0.75) == doctest::Approx((2.0 + std::sqrt(2.0)) / 3.0));
  CHECK(diversity_score({log.data(), 1}, line(), 0.75) == 0.0);
}

TEST_CASE("bootstrap interval") {
  Rng rng(1);
  const std::vector<double> constant(5, 0.7);
  const auto c = bootstrap_ci(constant, rng);
  CHECK(c.lo == 0.7);
  CHECK(c.hi == 0.7);
  const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const auto ci = bootstrap_ci(v, rng, 0.95, 4000);
  CHECK(ci.lo < 5.5);
  CHECK(ci.hi > 5.5);
  // sd of the mean is about 0.91; a 95% interval is near +-1.8
  CHECK(ci.hi - ci.lo == doctest::Approx(3.56).epsilon(0.15));
  CHECK_THROWS_AS(bootstrap_ci(std::vector<double>{}, rng), ValidationError);
  CHECK_THROWS_AS(bootstrap_ci(v, rng, 1.0), ValidationError);
}

TEST_CASE("median") {
  CHECK(median({3, 1, 2}) == 2);
  CHECK(median({4, 1, 2, 3}) == 2.5);
  CHECK_THROWS_AS(median({}), ValidationError);
}

TEST_CASE("top-k export writes unique designs best first") {
  testing::TempDir tmp;
  const std::vector<TrialRecord> log{rec({{1, 1}}, 2.0), rec({{4, 2}}, 5.0), rec({{4, 2}}, 5.0),
                                     rec({{0, 0}}, 0.0)};
  top_k_export(log, line(), tmp.path() / "top.csv", 2);
  std::ifstream in(tmp.path() / "top.csv");
  std::string header, first, second, extra;
  std::getline(in, header);
  std::getline(in, first);
  std::getline(in, second);
  CHECK(header == "rank,a,b,enc_a,enc_b,reward");
  CHECK(first == "1,4,2,1,1,5");
  CHECK(second == "2,1,1,0.25,0.5,2");
  CHECK_FALSE(std::getline(in, extra));
}

TEST_CASE("comparison report over two studies") {
  testing::TempDir tmp;
  const StudyContext ctx;
  for (const std::string kind : {"random", "evolutionary"}) {
    StudySpec s;
    s.name = kind;
    s.optimizer.kind = kind;
    s.trial_budget = 60;
    s.n_seeds = 3;
    s.max_concurrent = 1;
    RunOptions o;
    o.study_dir = tmp.path() / kind;
    run_study(s, ctx, spec_factory(s, ctx.space), o);
  }
  const auto report = compare_report({tmp.path() / "random", tmp.path() / "evolutionary"},
                                     tmp.path() / "out", ctx.space);
  CHECK(report["strategies"].size() == 2);
  CHECK(report["warnings"].empty());
  CHECK(report["strategies"][0]["final_best_per_seed"].size() == 3);
  const double overall = report["overall_best"];
  for (const auto& row : report["strategies"]) CHECK(row["final_best_median"].get<double>() <= overall);
  for (const char* f : {"report.json", "curves.csv", "metrics.csv", "top50.csv"})
    CHECK(fs::exists(tmp.path() / "out" / f));
  std::ifstream curves(tmp.path() / "out" / "curves.csv");
  std::string line;
  std::size_t rows = 0;
  while (std::getline(curves, line)) ++rows;
  CHECK(rows == 1 + 2 * 60);

  CHECK_THROWS_AS(load_study(tmp.path() / "nothing", ctx.space), NotFoundError);
  CHECK_THROWS_AS(compare_report({}, tmp.path() / "o2", ctx.space), ValidationError);
}

// ---------------------------------------------------------------------------

TEST_CASE("seed selection filters, deduplicates and ranks") {
  std::vector<TrialRecord> log{
      rec({{0, 0}}, 0.5, 4.0),  rec({{1, 0}}, 0.9, 4.0),  // above threshold
      rec({{2, 0}}, 0.7, 5.0),                            // too big
      rec({{3, 0}}, 0.6, 4.8),  rec({{3, 0}}, 0.6, 4.8),  // duplicate
      rec({{4, 0}}, 0.0, 1.0),                            // infeasible
      rec({{0, 1}}, 0.8, 3.0)};
  const auto picked = select_seed_trials(log, 4.8, 0.8, 100);
  REQUIRE(picked.size() == 3);
  CHECK(picked[0].reward == 0.8);
  CHECK(picked[1].reward == 0.6);
  CHECK(picked[2].reward == 0.5);
  CHECK(select_seed_trials(log, 4.8, 0.8, 2).size() == 2);
  try {
    select_seed_trials(log, 0.5, 0.8);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("no transferable trials") != std::string::npos);
  }
}

TEST_CASE("population warm start is limited to population strategies") {
  const auto space = SearchSpace::default_space();
  RegularizedEvolution evo(space, 1);
  RandomSearch rnd(space, 1);
  const std::vector<TrialRecord> seeds{rec(space.min_config(), 0.4), rec(space.max_config(), 0.6)};
  warm_start_population(evo, seeds);
  CHECK(evo.population().size() == 2);
  CHECK_THROWS_AS(warm_start_population(rnd, seeds), ValidationError);
  CHECK_THROWS_AS(warm_start_population(evo, {}), ValidationError);
  GpBandit gp(space, 1);
  CHECK_THROWS_AS(warm_start_gp_stack(gp, {seeds.data(), 1}), ValidationError);
  warm_start_gp_stack(gp, seeds);
  CHECK(gp.model().has_base());
}

// ---------------------------------------------------------------------------

namespace {

SearchSpace small_space() {
  return SearchSpace(std::vector<ParamSpec>{{"pes_x", {1, 2, 4}},
                      {"pes_y", {1, 3}},
                      {"local_memory_kb", {64, 512}},
                      {"simd_units", {8, 32}},
                      {"global_memory_mb", {1, 4, 8}},
                      {"compute_lanes", {2, 8}},
                      {"instruction_memory_kb", {16, 64}},
                      {"parameter_memory_mb", {2, 8}},
                      {"activation_memory_mb", {1, 8}},
                      {"io_bandwidth_gbps", {10, 30}}});
}

StudyContext small_context() {
  StudyContext ctx;
  const auto base = CostModel(ctx.space, ctx.calibration).baseline_latencies(ctx.suite);
  ctx.suite = WorkloadSuite(ctx.suite.workloads());
  ctx.suite.set_baseline_latency(base);
  ctx.space = small_space();
  return ctx;
}

}  // namespace

TEST_CASE("pruned enumeration equals a brute-force filter") {
  const StudyContext ctx = small_context();
  const CostModel model(ctx.space, ctx.calibration);
  PruneFilter f;
  f.total_memory_mb = {4, 16};
  f.total_pes = {2, 8};
  f.index_ranges = {{"simd_units", {1, 1}}};
  for (std::optional<double> budget : {std::optional<double>{}, std::optional<double>{4.8}}) {
    std::set<std::uint64_t> brute;
    for (std::uint64_t r = 0; r < ctx.space.cardinality(); ++r) {
      const auto c = ctx.space.unrank(r);
      const auto hw = model.hardware(c);
      const double mem = hw.global_memory_mb + hw.parameter_memory_mb + hw.activation_memory_mb +
                         hw.local_memory_kb * hw.pes_x * hw.pes_y / 1024.0;
      const double pes = hw.pes_x * hw.pes_y;
      if (mem < 4 || mem > 16 || pes < 2 || pes > 8 || c.genome[3] != 1) continue;
      if (budget && model.area(c) > *budget) continue;
      brute.insert(r);
    }
    std::set<std::uint64_t> seen;
    std::uint64_t last = 0;
    bool ordered = true;
    prune_enumerate(model, f, budget, [&](const AcceleratorConfig& c) {
      const auto r = ctx.space.rank(c);
      ordered &= seen.empty() || r > last;
      last = r;
      seen.insert(r);
      return true;
    });
    CHECK(ordered);
    CHECK(seen == brute);
    CHECK(count_survivors(model, f, budget) == brute.size());
  }
}

TEST_CASE("enumeration stops when the visitor says so") {
  const StudyContext ctx = small_context();
  const CostModel model(ctx.space, ctx.calibration);
  int n = 0;
  prune_enumerate(model, PruneFilter::none(), std::nullopt, [&](const AcceleratorConfig&) { return ++n < 5; });
  CHECK(n == 5);
}

TEST_CASE("run_exhaustive finds the brute-force optimum of the pruned region") {
  const StudyContext ctx = small_context();
  StudySpec spec;
  spec.area_budget_mm2 = 6.8;
  PruneFilter f;
  f.total_memory_mb = {4, 32};
  const CostModel model(ctx.space, ctx.calibration);
  const Scorer scorer(model, ctx.suite, spec);
  double best = 0;
  AcceleratorConfig arg;
  std::uint64_t survivors = 0;
  prune_enumerate(model, f, 6.8, [&](const AcceleratorConfig& c) {
    ++survivors;
    const auto s = scorer.score(c);
    if (s.feasible && s.reward > best) {
      best = s.reward;
      arg = c;
    }
    return true;
  });
  std::size_t streamed = 0;
  const auto ex = run_exhaustive(spec, ctx, f, [&](const TrialRecord&) { ++streamed; });
  CHECK(ex.best_reward == best);
  CHECK(ex.best_config == arg);
  CHECK(ex.n_evaluated == survivors);
  CHECK(streamed == survivors);
  CHECK(ex.n_feasible > 0);

  PruneFilter empty;
  empty.total_pes = {1000, 2000};
  CHECK_THROWS_AS(run_exhaustive(spec, ctx, empty), ValidationError);
}

TEST_CASE("filter parsing") {
  const auto f = PruneFilter::from_json(nlohmann::json::parse(
      R"({"total_memory_mb": [1, 2], "index_ranges": {"pes_x": [0, 3]}})"));
  CHECK(f.total_memory_mb == std::pair<double, double>{1, 2});
  CHECK(f.total_pes == std::pair<double, double>{2, 16});
  CHECK(f.index_ranges.at("pes_x") == std::pair<int, int>{0, 3});
  CHECK_THROWS_AS(PruneFilter::from_json(nlohmann::json::parse(R"({"memory": [1, 2]})")), ParseError);
  CHECK_THROWS_AS(PruneFilter::from_json(nlohmann::json::parse(R"({"total_pes": "x"})")), ParseError);
  PruneFilter bad;
  bad.index_ranges = {{"pes_x", {0, 10}}};
  CHECK_THROWS_AS(bad.validate(SearchSpace::default_space()), ValidationError);
  bad.index_ranges = {{"warp", {0, 1}}};
  CHECK_THROWS_AS(bad.validate(SearchSpace::default_space()), ValidationError);
  CHECK_THROWS_AS(PruneFilter::load("/nonexistent.json"), NotFoundError);
  for (const char* name : {"default.json", "edge.json"})
    CHECK_NOTHROW(PruneFilter::load(fs::path(DSE_DATA_DIR) / "filters" / name).validate(SearchSpace::default_space()));
}
