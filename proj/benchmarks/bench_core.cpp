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

#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "dse/costmodel.hpp"
#include "dse/exhaustive.hpp"
#include "dse/gaussian_process.hpp"
#include "dse/objective.hpp"
#include "dse/rng.hpp"
#include "dse/space.hpp"
#include "dse/strategy.hpp"
#include "dse/workload.hpp"

namespace {

using namespace dse;

void BM_CostModelEvaluate(benchmark::State& state) {
  const CostModel model(SearchSpace::default_space(), Calibration{});
  const WorkloadSuite suite = WorkloadSuite::default_suite();
  const auto names = suite.names();
  Rng rng(1);
  std::vector<AcceleratorConfig> configs;
  for (int i = 0; i < 1024; ++i) configs.push_back(model.space().sample_uniform(rng));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.evaluate(configs[i++ % configs.size()], suite, names));
  }
}
BENCHMARK(BM_CostModelEvaluate);

void BM_ScorerScore(benchmark::State& state) {
  const CostModel model(SearchSpace::default_space(), Calibration{});
  const WorkloadSuite suite = WorkloadSuite::default_suite();
  StudySpec spec;
  spec.area_budget_mm2 = 6.8;
  const Scorer scorer(model, suite, spec);
  Rng rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(scorer.score(model.space().sample_uniform(rng)));
}
BENCHMARK(BM_ScorerScore);

// Fit with the full hyperparameter grid search on n points of the one-hot width.
void BM_GpFit(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const SearchSpace space = SearchSpace::default_space();
  Rng rng(3);
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(space.onehot_width()));
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto bits = space.encode_onehot(space.sample_uniform(rng));
    for (Eigen::Index d = 0; d < x.cols(); ++d) x(i, d) = bits[static_cast<std::size_t>(d)];
    y(i) = rng.uniform();
  }
  const Eigen::MatrixXd d2 = pairwise_sq_dists(x);
  for (auto _ : state) benchmark::DoNotOptimize(GaussianProcess::fit(d2, y));
}
BENCHMARK(BM_GpFit)->Arg(16)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_GpPredict(benchmark::State& state) {
  Rng rng(4);
  Eigen::MatrixXd x(128, 77);
  Eigen::VectorXd y(128);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index d = 0; d < x.cols(); ++d) x(i, d) = rng.bernoulli(0.13) ? 1.0 : 0.0;
    y(i) = rng.uniform();
  }
  const auto gp = GaussianProcess::fit_points(x, y);
  Eigen::VectorXd q(77);
  for (auto _ : state) {
    for (Eigen::Index d = 0; d < q.size(); ++d) q(d) = rng.bernoulli(0.13) ? 1.0 : 0.0;
    benchmark::DoNotOptimize(gp.predict_point(x, q));
  }
}
BENCHMARK(BM_GpPredict);

// One ask(16)/tell(16) round with synthetic rewards.
void BM_AskTell(benchmark::State& state, const char* kind) {
  const SearchSpace space = SearchSpace::default_space();
  auto opt = make_optimizer(OptimizerSpec{kind, nlohmann::json::object()}, space, 5);
  std::size_t index = 0;
  for (auto _ : state) {
    const auto batch = opt->ask(16);
    std::vector<TrialRecord> done(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      done[i].config = batch[i];
      done[i].trial_index = index++;
      done[i].feasible = true;
      done[i].reward = space.encode_numeric(batch[i])[0];
    }
    opt->tell(done);
  }
}
BENCHMARK_CAPTURE(BM_AskTell, random, "random");
BENCHMARK_CAPTURE(BM_AskTell, evolutionary, "evolutionary");
BENCHMARK_CAPTURE(BM_AskTell, p3bo, "p3bo")->Iterations(64);

void BM_PruneEnumerate(benchmark::State& state) {
  const CostModel model(SearchSpace::default_space(), Calibration{});
  const PruneFilter filter = PruneFilter::load(DSE_DATA_DIR "/filters/edge.json");
  for (auto _ : state) {
    std::size_t n = 0;
    prune_enumerate(model, filter, 6.8, [&](const AcceleratorConfig&) {
      ++n;
      return true;
    });
    benchmark::DoNotOptimize(n);
  }
}
BENCHMARK(BM_PruneEnumerate)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
