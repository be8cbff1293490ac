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

#include "dse/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <unordered_set>

#include "dse/error.hpp"
#include "dse/trial_log.hpp"

namespace dse {

namespace fs = std::filesystem;

std::vector<double> best_so_far_curve(std::span<const TrialRecord> log) {
  std::vector<double> out;
  out.reserve(log.size());
  double best = 0;
  for (std::size_t i = 0; i < log.size(); ++i) {
    best = i == 0 ? log[i].reward : std::max(best, log[i].reward);
    out.push_back(best);
  }
  return out;
}

namespace {

double quantile_sorted(const std::vector<double>& s, double q) {
  const double pos = q * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

std::string fmt(double v) {
  std::ostringstream o;
  o << std::setprecision(17) << v;
  return o.str();
}

}  // namespace

Interval bootstrap_ci(std::span<const double> values, Rng& rng, double level,
                      std::size_t resamples) {
  if (values.empty()) throw ValidationError("bootstrap_ci: no values");
  if (!(level > 0 && level < 1)) throw ValidationError("bootstrap_ci: level must be in (0,1)");
  if (resamples == 0) throw ValidationError("bootstrap_ci: resamples must be positive");
  if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values[0]; }))
    return {values[0], values[0]};
  double mean = 0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  std::vector<double> means(resamples);
  for (auto& m : means) {
    double s = 0;
    for (std::size_t i = 0; i < values.size(); ++i) s += values[rng.below(values.size())];
    m = s / static_cast<double>(values.size());
  }
  std::sort(means.begin(), means.end());
  Interval ci{quantile_sorted(means, (1 - level) / 2), quantile_sorted(means, (1 + level) / 2)};
  ci.lo = std::min(ci.lo, mean);
  ci.hi = std::max(ci.hi, mean);
  return ci;
}

double feasibility_ratio(std::span<const TrialRecord> log) {
  if (log.empty()) throw ValidationError("feasibility_ratio: empty log");
  const auto n = std::count_if(log.begin(), log.end(), [](const auto& r) { return r.feasible; });
  return static_cast<double>(n) / static_cast<double>(log.size());
}

double uniqueness_ratio(std::span<const TrialRecord> log) {
  if (log.empty()) throw ValidationError("uniqueness_ratio: empty log");
  std::unordered_set<AcceleratorConfig, ConfigHash> seen;
  for (const auto& r : log) seen.insert(r.config);
  return static_cast<double>(seen.size()) / static_cast<double>(log.size());
}

double diversity_score(std::span<const TrialRecord> log, const SearchSpace& space,
                       double fraction) {
  double top = 0;
  for (const auto& r : log) top = std::max(top, r.reward);
  if (top <= 0) return 0;
  std::unordered_set<AcceleratorConfig, ConfigHash> seen;
  std::vector<AcceleratorConfig> picked;
  for (const auto& r : log)
    if (r.reward >= fraction * top && seen.insert(r.config).second) picked.push_back(r.config);
  if (picked.size() < 2) return 0;
  // Sorted so the floating-point sum does not depend on log order.
  std::sort(picked.begin(), picked.end());
  std::vector<std::vector<double>> enc;
  for (const auto& c : picked) enc.push_back(space.encode_numeric(c));
  double sum = 0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < enc.size(); ++i)
    for (std::size_t j = i + 1; j < enc.size(); ++j) {
      sum += euclidean_distance(enc[i], enc[j]);
      ++pairs;
    }
  return sum / static_cast<double>(pairs);
}

std::size_t trials_to_reach(std::span<const TrialRecord> log, double target) {
  for (std::size_t i = 0; i < log.size(); ++i)
    if (log[i].reward >= target) return i + 1;
  return log.size() + 1;
}

double median(std::vector<double> values) {
  if (values.empty()) throw ValidationError("median: no values");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

std::vector<const TrialRecord*> top_unique(std::span<const TrialRecord> log, std::size_t k) {
  std::vector<const TrialRecord*> all;
  for (const auto& r : log) all.push_back(&r);
  std::stable_sort(all.begin(), all.end(),
                   [](const TrialRecord* a, const TrialRecord* b) { return a->reward > b->reward; });
  std::unordered_set<AcceleratorConfig, ConfigHash> seen;
  std::vector<const TrialRecord*> out;
  for (const auto* r : all) {
    if (out.size() >= k) break;
    if (seen.insert(r->config).second) out.push_back(r);
  }
  return out;
}

std::string top_k_header(const SearchSpace& space, bool with_strategy) {
  std::string h = with_strategy ? "strategy,rank" : "rank";
  for (const auto& p : space.params()) h += "," + p.name;
  for (const auto& p : space.params()) h += ",enc_" + p.name;
  return h + ",reward";
}

void top_k_rows(std::ostream& out, std::span<const TrialRecord> log, const SearchSpace& space,
                std::size_t k, const std::string* strategy) {
  std::size_t rank = 0;
  for (const auto* r : top_unique(log, k)) {
    if (strategy) out << *strategy << ',';
    out << ++rank;
    for (int g : r->config.genome) out << ',' << g;
    for (double v : space.encode_numeric(r->config)) out << ',' << fmt(v);
    out << ',' << fmt(r->reward) << '\n';
  }
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

void top_k_export(std::span<const TrialRecord> log, const SearchSpace& space,
                  const fs::path& path, std::size_t k) {
  auto out = open_out(path);
  out << top_k_header(space, false) << '\n';
  top_k_rows(out, log, space, k, nullptr);
  if (!out) throw Error("write failed: " + path.string());
}

StudyData load_study(const fs::path& dir, const SearchSpace& space) {
  if (!fs::is_regular_file(dir / "spec.json")) throw NotFoundError("no study at " + dir.string());
  StudyData d;
  std::ifstream in(dir / "spec.json");
  try {
    d.spec = StudySpec::from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError((dir / "spec.json").string() + ": " + e.what());
  }
  d.label = d.spec.optimizer.kind;
  std::vector<std::pair<std::uint64_t, fs::path>> logs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("seed", 0) != 0 || entry.path().extension() != ".jsonl") continue;
    const std::string digits = name.substr(4, name.size() - 4 - 6);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) continue;
    logs.emplace_back(std::stoull(digits), entry.path());
  }
  std::sort(logs.begin(), logs.end());
  for (const auto& [seed, path] : logs) {
    SeedRun run;
    run.seed = seed;
    run.log = read_trial_log(path, space);
    for (const auto& r : run.log) run.best_reward = std::max(run.best_reward, r.reward);
    if (!run.log.empty()) d.runs.push_back(std::move(run));
  }
  if (d.runs.empty()) throw NotFoundError("study " + dir.string() + " has no trial logs");
  return d;
}

nlohmann::json compare_report(const std::vector<fs::path>& study_dirs, const fs::path& out_dir,
                              const SearchSpace& space) {
  if (study_dirs.empty()) throw ValidationError("report: no studies given");
  std::vector<StudyData> studies;
  std::map<std::string, int> label_uses;
  for (const auto& dir : study_dirs) {
    studies.push_back(load_study(dir, space));
    if (label_uses[studies.back().label]++ > 0)
      studies.back().label += "@" + dir.filename().string();
  }

  nlohmann::json warnings = nlohmann::json::array();
  auto comparable = [](const StudySpec& s) {
    auto j = s.to_json();
    j.erase("name");
    j.erase("optimizer");
    j.erase("n_seeds");
    j.erase("first_seed");
    j.erase("max_concurrent");
    return j;
  };
  for (std::size_t i = 1; i < studies.size(); ++i)
    if (comparable(studies[i].spec) != comparable(studies[0].spec))
      warnings.push_back("study " + study_dirs[i].string() + " has a different problem setup than " +
                         study_dirs[0].string());

  double overall_best = 0;
  for (const auto& s : studies)
    for (const auto& r : s.runs) overall_best = std::max(overall_best, r.best_reward);

  fs::create_directories(out_dir);
  auto curves = open_out(out_dir / "curves.csv");
  curves << "strategy,trial_index,median,ci_lo,ci_hi\n";
  auto metrics = open_out(out_dir / "metrics.csv");
  metrics << "strategy,seeds,final_best_median,final_best_ci_lo,final_best_ci_hi,"
             "feasibility_ratio,uniqueness_ratio,diversity,trials_to_90,trials_to_95,trials_to_99\n";
  auto top = open_out(out_dir / "top50.csv");
  top << top_k_header(space, true) << '\n';

  Rng rng(0);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& s : studies) {
    std::vector<double> finals, feas, uniq, div;
    std::map<double, std::vector<double>> reach;
    std::vector<std::vector<double>> seed_curves;
    std::vector<TrialRecord> pooled;
    std::size_t longest = 0;
    for (const auto& r : s.runs) {
      finals.push_back(r.best_reward);
      feas.push_back(feasibility_ratio(r.log));
      uniq.push_back(uniqueness_ratio(r.log));
      div.push_back(diversity_score(r.log, space));
      for (double f : {0.90, 0.95, 0.99})
        reach[f].push_back(static_cast<double>(trials_to_reach(r.log, f * overall_best)));
      seed_curves.push_back(best_so_far_curve(r.log));
      longest = std::max(longest, r.log.size());
      pooled.insert(pooled.end(), r.log.begin(), r.log.end());
    }
    const Interval ci = bootstrap_ci(finals, rng);
    for (std::size_t i = 0; i < longest; ++i) {
      std::vector<double> at;
      for (const auto& c : seed_curves) at.push_back(c[std::min(i, c.size() - 1)]);
      const Interval band = bootstrap_ci(at, rng);
      curves << s.label << ',' << i << ',' << fmt(median(at)) << ',' << fmt(band.lo) << ','
             << fmt(band.hi) << '\n';
    }
    nlohmann::json row = {{"strategy", s.label},
                          {"spec_hash", s.spec.hash()},
                          {"seeds", s.runs.size()},
                          {"final_best_median", median(finals)},
                          {"final_best_ci", {ci.lo, ci.hi}},
                          {"final_best_per_seed", finals},
                          {"feasibility_ratio", median(feas)},
                          {"uniqueness_ratio", median(uniq)},
                          {"diversity", median(div)},
                          {"trials_to_reach",
                           {{"0.9", median(reach[0.90])},
                            {"0.95", median(reach[0.95])},
                            {"0.99", median(reach[0.99])}}}};
    metrics << s.label << ',' << s.runs.size() << ',' << fmt(median(finals)) << ',' << fmt(ci.lo)
            << ',' << fmt(ci.hi) << ',' << fmt(median(feas)) << ',' << fmt(median(uniq)) << ','
            << fmt(median(div)) << ',' << fmt(median(reach[0.90])) << ','
            << fmt(median(reach[0.95])) << ',' << fmt(median(reach[0.99])) << '\n';
    top_k_rows(top, pooled, space, 50, &s.label);
    rows.push_back(std::move(row));
  }

  nlohmann::json report = {{"strategies", rows},
                           {"overall_best", overall_best},
                           {"warnings", warnings}};
  auto out = open_out(out_dir / "report.json");
  out << report.dump(2) << '\n';
  if (!out || !curves || !metrics || !top) throw Error("report: write failed in " + out_dir.string());
  return report;
}

}  // namespace dse
