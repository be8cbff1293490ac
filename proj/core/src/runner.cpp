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

#include "dse/runner.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <fstream>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "dse/error.hpp"
#include "dse/strategy.hpp"
#include "dse/trial_log.hpp"

namespace dse {

namespace fs = std::filesystem;

StudyContext StudyContext::for_spec(const StudySpec& spec) {
  StudyContext c;
  if (spec.space_file) c.space = SearchSpace::load(*spec.space_file);
  if (spec.suite_file) c.suite = load_suite(*spec.suite_file);
  if (spec.calibration_file) c.calibration = Calibration::load(*spec.calibration_file);
  return c;
}

StrategyFactory spec_factory(const StudySpec& spec, const SearchSpace& space) {
  make_optimizer(spec.optimizer, space, 0);  // fail fast on bad params
  return [opt = spec.optimizer, space](std::uint64_t seed) {
    return make_optimizer(opt, space, seed);
  };
}

fs::path seed_log_path(const fs::path& study_dir, std::uint64_t seed) {
  return study_dir / ("seed" + std::to_string(seed) + ".jsonl");
}

nlohmann::json StudyResult::to_json() const {
  nlohmann::json runs_j = nlohmann::json::array();
  for (const auto& r : runs)
    runs_j.push_back({{"seed", r.seed}, {"trials", r.log.size()}, {"best_reward", r.best_reward}});
  return {{"spec_hash", spec.hash()},
          {"name", spec.name},
          {"optimizer", spec.optimizer.kind},
          {"runs", runs_j},
          {"wall_time_s", wall_time_s}};
}

namespace {

struct Evaluated {
  AcceleratorConfig config;
  Score score;
  std::int64_t proposed_at_ms = 0;
};

Score guarded(const std::function<Score(const AcceleratorConfig&)>& eval,
              const AcceleratorConfig& config) {
  try {
    return eval(config);
  } catch (...) {
    Score s;
    s.reasons = {std::string(reason::kEvaluatorError)};
    return s;
  }
}

// Fixed pool of workers; results come back in completion order.
class EvalPool {
 public:
  EvalPool(std::size_t workers, std::function<Score(const AcceleratorConfig&)> eval)
      : eval_(std::move(eval)) {
    for (std::size_t i = 0; i < workers; ++i) threads_.emplace_back([this] { loop(); });
  }
  ~EvalPool() {
    {
      std::lock_guard lock(mu_);
      stop_ = true;
    }
    jobs_cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  void submit(Evaluated job) {
    {
      std::lock_guard lock(mu_);
      jobs_.push_back(std::move(job));
    }
    jobs_cv_.notify_one();
  }

  // Blocks for at least one result, then drains whatever else is ready.
  std::vector<Evaluated> collect() {
    std::unique_lock lock(mu_);
    done_cv_.wait(lock, [this] { return !done_.empty(); });
    std::vector<Evaluated> out(std::make_move_iterator(done_.begin()),
                               std::make_move_iterator(done_.end()));
    done_.clear();
    return out;
  }

 private:
  void loop() {
    for (;;) {
      Evaluated job;
      {
        std::unique_lock lock(mu_);
        jobs_cv_.wait(lock, [this] { return stop_ || !jobs_.empty(); });
        if (stop_) return;
        job = std::move(jobs_.front());
        jobs_.pop_front();
      }
      job.score = guarded(eval_, job.config);
      {
        std::lock_guard lock(mu_);
        done_.push_back(std::move(job));
      }
      done_cv_.notify_one();
    }
  }

  std::function<Score(const AcceleratorConfig&)> eval_;
  std::mutex mu_;
  std::condition_variable jobs_cv_, done_cv_;
  std::deque<Evaluated> jobs_, done_;
  bool stop_ = false;
  std::vector<std::thread> threads_;
};

class SeedDriver {
 public:
  SeedDriver(const StudySpec& spec, const SearchSpace& space,
             std::function<Score(const AcceleratorConfig&)> eval, const RunOptions& options,
             std::uint64_t seed, Optimizer& opt, std::vector<TrialRecord>& log,
             TrialLogWriter* writer)
      : spec_(spec), space_(space), eval_(std::move(eval)), options_(options), seed_(seed),
        opt_(opt), log_(log), writer_(writer), logical_(spec.max_concurrent == 1),
        start_(std::chrono::steady_clock::now()) {
    if (!log_.empty()) clock_ = log_.back().completed_at_ms + 1;
  }

  void run() {
    if (log_.size() >= spec_.trial_budget) return;
    if (spec_.max_concurrent == 1) {
      while (log_.size() < spec_.trial_budget) {
        Evaluated e{opt_.ask(1).front(), {}, now()};
        e.score = score(e.config);
        finish({&e, 1});
      }
      return;
    }
    EvalPool pool(spec_.max_concurrent, [this](const AcceleratorConfig& c) { return score(c); });
    std::size_t issued = log_.size();
    std::size_t in_flight = 0;
    while (log_.size() < spec_.trial_budget) {
      const std::size_t room = std::min<std::size_t>(spec_.max_concurrent - in_flight,
                                                     spec_.trial_budget - issued);
      if (room > 0) {
        for (auto& c : opt_.ask(room)) pool.submit({std::move(c), {}, now()});
        issued += room;
        in_flight += room;
      }
      assert(in_flight <= spec_.max_concurrent);
      if (in_flight > spec_.max_concurrent) throw Error("runner: concurrency bound exceeded");
      auto done = pool.collect();
      in_flight -= done.size();
      finish(done);
    }
  }

 private:
  std::int64_t now() {
    if (logical_) return clock_++;
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

  Score score(const AcceleratorConfig& c) {
    if (!options_.memoize) return guarded(eval_, c);
    const auto key = space_.rank(c);
    {
      std::lock_guard lock(memo_mu_);
      if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    }
    Score s = guarded(eval_, c);
    std::lock_guard lock(memo_mu_);
    memo_.emplace(key, s);
    return s;
  }

  void finish(std::span<Evaluated> done) {
    std::vector<TrialRecord> batch;
    for (auto& e : done) {
      TrialRecord r;
      r.config = std::move(e.config);
      r.feasible = e.score.feasible && e.score.reward > 0;
      r.reward = r.feasible ? e.score.reward : 0.0;
      r.infeasibility_reasons = e.score.reasons;
      if (!r.feasible && r.infeasibility_reasons.empty())
        r.infeasibility_reasons = {std::string(reason::kEvaluatorError)};
      if (r.feasible) r.infeasibility_reasons.clear();
      r.area_mm2 = e.score.evaluation.area_mm2;
      r.latency_s = e.score.evaluation.latency_s;
      r.trial_index = log_.size();
      r.seed = seed_;
      r.optimizer_tag = std::string(opt_.kind());
      r.proposed_at_ms = e.proposed_at_ms;
      r.completed_at_ms = std::max(now(), r.proposed_at_ms);
      r.transfer_source = options_.transfer_source;
      if (writer_) writer_->write(r);
      log_.push_back(r);
      batch.push_back(std::move(r));
    }
    opt_.tell(batch);
  }

  const StudySpec& spec_;
  const SearchSpace& space_;
  std::function<Score(const AcceleratorConfig&)> eval_;
  const RunOptions& options_;
  std::uint64_t seed_;
  Optimizer& opt_;
  std::vector<TrialRecord>& log_;
  TrialLogWriter* writer_;
  bool logical_;
  std::int64_t clock_ = 0;
  std::chrono::steady_clock::time_point start_;
  std::mutex memo_mu_;
  std::unordered_map<std::uint64_t, Score> memo_;
};

std::vector<std::uint64_t> seed_list(const StudySpec& spec, const RunOptions& options) {
  if (options.seeds) return *options.seeds;
  std::vector<std::uint64_t> s;
  for (std::size_t i = 0; i < spec.n_seeds; ++i) s.push_back(spec.first_seed + i);
  return s;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  out << j.dump(2) << '\n';
  if (!out) throw Error("cannot write " + path.string());
}

StudyResult drive(const StudySpec& spec, const StudyContext& context, const StrategyFactory& factory,
                  const RunOptions& options, bool resuming) {
  spec.validate();
  const auto t0 = std::chrono::steady_clock::now();
  CostModel model(context.space, context.calibration);
  Scorer scorer(model, context.suite, spec);
  auto eval = options.evaluator
                  ? options.evaluator
                  : std::function<Score(const AcceleratorConfig&)>(
                        [&scorer](const AcceleratorConfig& c) { return scorer.score(c); });

  std::vector<TrialRecord> seeds = rescore(options.warm_start, spec, context);
  if (options.study_dir) {
    const fs::path& dir = *options.study_dir;
    if (resuming) {
      const auto stored = StudySpec::from_json(nlohmann::json::parse(std::ifstream(dir / "spec.json")));
      if (stored.hash() != spec.hash())
        throw ValidationError("spec hash mismatch: study " + dir.string() + " was created with " +
                              stored.hash() + ", got " + spec.hash());
      if (seeds.empty() && fs::exists(dir / "warm_start.jsonl"))
        seeds = read_trial_log(dir / "warm_start.jsonl", context.space);
    } else {
      if (fs::exists(dir) && !fs::is_empty(dir)) {
        if (!options.force)
          throw ValidationError("study directory " + dir.string() +
                                " already exists (use --force to overwrite)");
        fs::remove_all(dir);
      }
      fs::create_directories(dir);
      write_json(dir / "spec.json", spec.to_json());
      if (!seeds.empty()) write_trial_log(dir / "warm_start.jsonl", seeds, context.space);
    }
  }

  StudyResult result;
  result.spec = spec;
  for (std::uint64_t seed : seed_list(spec, options)) {
    auto opt = factory(seed);
    if (!opt) throw Error("strategy factory returned null");
    if (!seeds.empty()) opt->warm_start(seeds);

    SeedRun run;
    run.seed = seed;
    std::unique_ptr<TrialLogWriter> writer;
    if (options.study_dir) {
      const fs::path path = seed_log_path(*options.study_dir, seed);
      if (resuming && fs::exists(path)) {
        run.log = read_trial_log(path, context.space);
        for (std::size_t i = 0; i < run.log.size(); ++i) {
          const TrialRecord& r = run.log[i];
          if (r.trial_index != i || r.seed != seed)
            throw ParseError(path.string() + ":" + std::to_string(i + 1) +
                             ": record does not belong to this seed log");
          if (spec.max_concurrent == 1) {
            const auto c = opt->ask(1).front();
            if (c != r.config)
              throw ValidationError("replay diverged at trial " + std::to_string(i) + " of " +
                                    path.string());
          }
          opt->tell(r);
        }
        if (run.log.size() > spec.trial_budget)
          throw ValidationError(path.string() + " holds more trials than the budget");
      }
      writer = std::make_unique<TrialLogWriter>(path, context.space, resuming);
    }
    SeedDriver(spec, context.space, eval, options, seed, *opt, run.log, writer.get()).run();
    for (const auto& r : run.log) run.best_reward = std::max(run.best_reward, r.reward);
    result.runs.push_back(std::move(run));
  }
  result.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (options.study_dir) write_json(*options.study_dir / "result.json", result.to_json());
  return result;
}

}  // namespace

std::vector<TrialRecord> rescore(std::span<const TrialRecord> records, const StudySpec& spec,
                                 const StudyContext& context) {
  CostModel model(context.space, context.calibration);
  Scorer scorer(model, context.suite, spec);
  std::vector<TrialRecord> out;
  for (const auto& src : records) {
    TrialRecord r = src;
    const Score s = guarded([&](const AcceleratorConfig& c) { return scorer.score(c); }, r.config);
    r.feasible = s.feasible && s.reward > 0;
    r.reward = r.feasible ? s.reward : 0.0;
    r.infeasibility_reasons = r.feasible ? std::vector<std::string>{} : s.reasons;
    r.area_mm2 = s.evaluation.area_mm2;
    r.latency_s = s.evaluation.latency_s;
    out.push_back(std::move(r));
  }
  return out;
}

StudyResult run_study(const StudySpec& spec, const StudyContext& context,
                      const StrategyFactory& factory, const RunOptions& options) {
  return drive(spec, context, factory, options, false);
}

StudyResult resume_study(const StudySpec& spec, const StudyContext& context,
                         const StrategyFactory& factory, const RunOptions& options) {
  if (!options.study_dir) throw ValidationError("resume needs a study directory");
  if (!fs::exists(*options.study_dir / "spec.json"))
    throw NotFoundError("no study at " + options.study_dir->string());
  return drive(spec, context, factory, options, true);
}

}  // namespace dse
