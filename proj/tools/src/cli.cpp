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

#include "dse_tools/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "dse/analysis.hpp"
#include "dse/error.hpp"
#include "dse/exhaustive.hpp"
#include "dse/runner.hpp"
#include "dse/strategy.hpp"
#include "dse/trial_log.hpp"
#include "dse/transfer.hpp"

namespace dse::cli {

namespace fs = std::filesystem;

namespace {

fs::path data_root() {
  if (const char* env = std::getenv("APOLLO_DSE_DATA_DIR"); env && *env) return env;
  return DSE_DEFAULT_DATA_DIR;
}

fs::path study_root(const std::string& out_flag) {
  if (!out_flag.empty()) return out_flag;
  if (const char* env = std::getenv("APOLLO_DSE_DATA_DIR"); env && *env) return env;
  return ".";
}

fs::path default_space_file() { return data_root() / "space" / "default.json"; }
fs::path default_suite_file() { return data_root() / "workloads" / "default_suite.json"; }
fs::path default_calibration_file() {
  return data_root() / "costmodel" / "default_calibration.json";
}

StudyContext context_for(const StudySpec& spec) {
  StudyContext c;
  if (spec.space_file) c.space = SearchSpace::load(*spec.space_file);
  else if (fs::exists(default_space_file())) c.space = SearchSpace::load(default_space_file());
  if (spec.suite_file) c.suite = load_suite(*spec.suite_file);
  else if (fs::exists(default_suite_file())) c.suite = load_suite(default_suite_file());
  if (spec.calibration_file) c.calibration = Calibration::load(*spec.calibration_file);
  else if (fs::exists(default_calibration_file()))
    c.calibration = Calibration::load(default_calibration_file());
  return c;
}

std::string with_commas(std::uint64_t v) {
  std::string s = std::to_string(v);
  for (int i = static_cast<int>(s.size()) - 3; i > 0; i -= 3) s.insert(static_cast<std::size_t>(i), ",");
  return s;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  out << j.dump(2) << '\n';
  if (!out) throw Error("cannot write " + path.string());
}

// Flag values shared by run and transfer; unset ones leave the spec alone.
struct Overrides {
  std::string spec_file;
  std::string optimizer;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> workers;
  std::optional<std::uint64_t> seed;
  std::optional<double> area_budget;
  std::string name;
  std::string out;
  bool force = false;
  bool memoize = false;
};

void add_override_flags(CLI::App* cmd, Overrides& o, const std::string& spec_flag = "--spec") {
  cmd->add_option(spec_flag, o.spec_file, "Study spec JSON (default: geomean speedup, all workloads)");
  cmd->add_option("--optimizer", o.optimizer, "Strategy kind; replaces the spec's optimizer");
  cmd->add_option("--trials", o.trials, "Trial budget per seed");
  cmd->add_option("--workers", o.workers, "Maximum concurrent evaluations");
  cmd->add_option("--seed", o.seed, "Run only this seed");
  cmd->add_option("--area-budget", o.area_budget, "Area budget in mm^2");
  cmd->add_option("--name", o.name, "Study name (directory under <out>/study/)");
  cmd->add_option("--out", o.out, "Root for study/ (default: $APOLLO_DSE_DATA_DIR or .)");
  cmd->add_flag("--force", o.force, "Overwrite an existing study directory");
  cmd->add_flag("--memoize", o.memoize, "Reuse scores of repeated genomes");
}

// Precedence: flags > environment > spec file.
StudySpec resolve_spec(const Overrides& o) {
  StudySpec spec;
  if (!o.spec_file.empty()) spec = StudySpec::load(o.spec_file);
  if (const char* env = std::getenv("APOLLO_DSE_WORKERS"); env && *env) {
    try {
      spec.max_concurrent = std::stoul(env);
    } catch (const std::exception&) {
      throw ValidationError(std::string("APOLLO_DSE_WORKERS is not a number: ") + env);
    }
  }
  if (!o.optimizer.empty()) spec.optimizer = OptimizerSpec{o.optimizer, nlohmann::json::object()};
  if (o.trials) spec.trial_budget = *o.trials;
  if (o.workers) spec.max_concurrent = *o.workers;
  if (o.seed) {
    spec.first_seed = *o.seed;
    spec.n_seeds = 1;
  }
  if (o.area_budget) spec.area_budget_mm2 = *o.area_budget;
  if (!o.name.empty()) spec.name = o.name;
  else if (o.spec_file.empty()) spec.name = spec.optimizer.kind;
  spec.validate();
  return spec;
}

void print_result(std::ostream& out, const StudyResult& r, const fs::path& dir) {
  out << "study: " << dir.string() << '\n';
  for (const auto& run : r.runs)
    out << "seed " << run.seed << ": " << run.log.size() << " trials, best reward "
        << std::setprecision(6) << run.best_reward << '\n';
  out << "wall time: " << std::setprecision(3) << r.wall_time_s << " s\n";
}

int cmd_space_info(const std::string& file, std::ostream& out) {
  const SearchSpace space = !file.empty() ? SearchSpace::load(file)
                            : fs::exists(default_space_file()) ? SearchSpace::load(default_space_file())
                                                               : SearchSpace::default_space();
  for (const auto& p : space.params()) {
    out << std::left << std::setw(24) << p.name << std::right << std::setw(3) << p.size() << "  ";
    for (std::size_t i = 0; i < p.values.size(); ++i) out << (i ? "," : "") << p.values[i];
    out << '\n';
  }
  out << "cardinality " << space.cardinality() << " (" << with_commas(space.cardinality()) << ")\n";
  out << "onehot_width " << space.onehot_width() << '\n';
  return 0;
}

int cmd_run(const Overrides& o, bool resume, std::ostream& out) {
  const StudySpec spec = resolve_spec(o);
  const StudyContext ctx = context_for(spec);
  const fs::path dir = study_root(o.out) / "study" / spec.name;
  out << "spec hash: " << spec.hash() << '\n';
  RunOptions opts;
  opts.study_dir = dir;
  opts.force = o.force;
  opts.memoize = o.memoize;
  const auto factory = spec_factory(spec, ctx.space);
  const StudyResult r = resume ? resume_study(spec, ctx, factory, opts)
                               : run_study(spec, ctx, factory, opts);
  print_result(out, r, dir);
  return 0;
}

int cmd_transfer(const Overrides& o, const std::string& source, double threshold,
                 std::size_t count, std::ostream& out) {
  StudySpec spec = resolve_spec(o);
  if (!spec.area_budget_mm2)
    throw ValidationError("transfer: the target study needs an area budget");
  const StudyContext ctx = context_for(spec);
  const StudyData src = load_study(source, ctx.space);
  std::vector<TrialRecord> pooled;
  for (const auto& run : src.runs) pooled.insert(pooled.end(), run.log.begin(), run.log.end());
  const auto seeds = select_seed_trials(pooled, *spec.area_budget_mm2, threshold, count);
  out << "spec hash: " << spec.hash() << '\n';
  out << "seed trials: " << seeds.size() << " from " << source << '\n';
  const fs::path dir = study_root(o.out) / "study" / spec.name;
  RunOptions opts;
  opts.study_dir = dir;
  opts.force = o.force;
  opts.memoize = o.memoize;
  opts.warm_start = seeds;
  opts.transfer_source = fs::path(source).lexically_normal().filename().string();
  if (opts.transfer_source.empty()) opts.transfer_source = source;
  const StudyResult r = run_study(spec, ctx, spec_factory(spec, ctx.space), opts);
  print_result(out, r, dir);
  return 0;
}

int cmd_exhaustive(const std::string& filter_file, const std::string& spec_file,
                   const std::string& out_dir, std::ostream& out) {
  Overrides o;
  o.spec_file = spec_file;
  const StudySpec spec = resolve_spec(o);
  const StudyContext ctx = context_for(spec);
  const PruneFilter filter = filter_file.empty() ? PruneFilter{} : PruneFilter::load(filter_file);
  filter.validate(ctx.space);
  out << "spec hash: " << spec.hash() << '\n';
  fs::create_directories(out_dir);
  TrialLogWriter log(fs::path(out_dir) / "evaluations.jsonl", ctx.space, false);
  const ExhaustiveResult r =
      run_exhaustive(spec, ctx, filter, [&](const TrialRecord& t) { log.write(t); });
  nlohmann::json best = {{"survivors_count", r.n_evaluated},
                         {"feasible_count", r.n_feasible},
                         {"best_reward", r.best_reward},
                         {"best_genome", r.best_config.genome},
                         {"best_values", ctx.space.values(r.best_config)},
                         {"filter", filter.to_json()},
                         {"spec_hash", spec.hash()}};
  write_json(fs::path(out_dir) / "best.json", best);
  std::ofstream(fs::path(out_dir) / "survivors_count") << r.n_evaluated << '\n';
  out << "survivors_count " << r.n_evaluated << '\n';
  out << "feasible " << r.n_feasible << '\n';
  out << "best reward " << std::setprecision(8) << r.best_reward << '\n';
  return 0;
}

int cmd_report(const std::vector<std::string>& dirs, const std::string& out_dir, std::ostream& out) {
  std::vector<fs::path> studies;
  for (const auto& d : dirs) {
    if (fs::is_regular_file(fs::path(d) / "spec.json")) {
      studies.emplace_back(d);
      continue;
    }
    if (!fs::is_directory(d)) throw NotFoundError("not a directory: " + d);
    std::vector<fs::path> found;
    for (const auto& e : fs::directory_iterator(d))
      if (fs::is_regular_file(e.path() / "spec.json")) found.push_back(e.path());
    std::sort(found.begin(), found.end());
    studies.insert(studies.end(), found.begin(), found.end());
  }
  if (studies.empty()) throw NotFoundError("report: no studies found");
  const fs::path dest = out_dir.empty() ? fs::path("report") : fs::path(out_dir);
  const SearchSpace space = fs::exists(default_space_file()) ? SearchSpace::load(default_space_file())
                                                             : SearchSpace::default_space();
  const auto report = compare_report(studies, dest, space);
  for (const auto& w : report.at("warnings")) out << "warning: " << w.get<std::string>() << '\n';
  for (const auto& row : report.at("strategies"))
    out << row.at("strategy").get<std::string>() << ": median best "
        << row.at("final_best_median").get<double>() << ", feasible "
        << row.at("feasibility_ratio").get<double>() << ", unique "
        << row.at("uniqueness_ratio").get<double>() << '\n';
  out << "report written to " << dest.string() << '\n';
  return 0;
}

int cmd_validate(std::map<std::string, std::vector<std::string>> files, std::ostream& out,
                 std::ostream& err) {
  bool any = false;
  for (const auto& [_, v] : files) any = any || !v.empty();
  if (!any) {
    files["space"] = {default_space_file().string()};
    files["suite"] = {default_suite_file().string()};
    files["calibration"] = {default_calibration_file().string()};
  }
  const SearchSpace space = SearchSpace::default_space();
  int failures = 0;
  for (const auto& [kind, paths] : files)
    for (const auto& p : paths) {
      try {
        if (kind == "space") SearchSpace::load(p);
        else if (kind == "suite") load_suite(p);
        else if (kind == "calibration") Calibration::load(p);
        else if (kind == "spec") {
          const auto spec = StudySpec::load(p);
          make_optimizer(spec.optimizer, space, 0);
          const auto ctx = context_for(spec);
          CostModel model(ctx.space, ctx.calibration);
          Scorer scorer(model, ctx.suite, spec);
        } else if (kind == "filter") PruneFilter::load(p).validate(space);
        out << "ok " << kind << ' ' << p << '\n';
      } catch (const Error& e) {
        err << "invalid " << kind << ' ' << p << ": " << e.what() << '\n';
        ++failures;
      }
    }
  return failures ? 1 : 0;
}

int cmd_data_export(const std::string& out_dir, std::ostream& out) {
  const fs::path root(out_dir);
  fs::create_directories(root / "space");
  fs::create_directories(root / "workloads");
  fs::create_directories(root / "costmodel");
  write_json(root / "space" / "default.json", SearchSpace::default_space().to_json());
  save_suite(WorkloadSuite::default_suite(), root / "workloads" / "default_suite.json");
  write_json(root / "costmodel" / "default_calibration.json", Calibration{}.to_json());
  out << "wrote defaults to " << root.string() << '\n';
  return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{
      "Accelerator design-space exploration.\n"
      "Flags override environment variables (APOLLO_DSE_WORKERS, APOLLO_DSE_DATA_DIR),\n"
      "which override spec files.",
      "dse"};
  app.require_subcommand(1);

  auto* space_cmd = app.add_subcommand("space", "Search-space utilities");
  space_cmd->require_subcommand(1);
  std::string space_file;
  auto* space_info = space_cmd->add_subcommand("info", "Print parameters and cardinality");
  space_info->add_option("--space", space_file, "Space JSON (default: data dir)");

  Overrides run_o;
  bool resume = false;
  auto* run_cmd = app.add_subcommand("run", "Run a study (all seeds of the spec)");
  add_override_flags(run_cmd, run_o);
  run_cmd->add_flag("--resume", resume, "Continue an interrupted study by replaying its logs");

  Overrides tr_o;
  std::string source;
  double threshold = 0.8;
  std::size_t count = 100;
  auto* tr_cmd = app.add_subcommand("transfer", "Warm-start a study from a source study");
  add_override_flags(tr_cmd, tr_o, "--target-spec,--spec");
  tr_cmd->add_option("--source", source, "Source study directory")->required();
  tr_cmd->add_option("--threshold", threshold, "Keep seed trials with reward <= threshold");
  tr_cmd->add_option("--count", count, "Number of seed trials");

  std::string filter_file, ex_spec, ex_out;
  auto* ex_cmd = app.add_subcommand("exhaustive", "Evaluate every survivor of the pruning filter");
  ex_cmd->add_option("--filter", filter_file, "Filter JSON (default: memory 4-16 MB, PEs 2-16)");
  ex_cmd->add_option("--spec", ex_spec, "Study spec JSON");
  ex_cmd->add_option("--out", ex_out, "Output directory")->required();

  std::vector<std::string> report_dirs;
  std::string report_out;
  auto* rep_cmd = app.add_subcommand("report", "Compare studies");
  rep_cmd->add_option("studies", report_dirs, "Study directories, or directories holding them")
      ->required();
  rep_cmd->add_option("--out", report_out, "Output directory (default: ./report)");

  std::map<std::string, std::vector<std::string>> vfiles;
  auto* val_cmd = app.add_subcommand("validate", "Schema-check configuration files");
  for (const char* kind : {"space", "suite", "calibration", "spec", "filter"})
    val_cmd->add_option(std::string("--") + kind, vfiles[kind], std::string(kind) + " file(s)");

  std::string export_out;
  auto* data_cmd = app.add_subcommand("data", "Built-in default data files");
  data_cmd->require_subcommand(1);
  auto* export_cmd = data_cmd->add_subcommand("export", "Write the default space, suite and calibration");
  export_cmd->add_option("--out", export_out, "Output directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (space_info->parsed()) return cmd_space_info(space_file, out);
    if (run_cmd->parsed()) return cmd_run(run_o, resume, out);
    if (tr_cmd->parsed()) return cmd_transfer(tr_o, source, threshold, count, out);
    if (ex_cmd->parsed()) return cmd_exhaustive(filter_file, ex_spec, ex_out, out);
    if (rep_cmd->parsed()) return cmd_report(report_dirs, report_out, out);
    if (val_cmd->parsed()) return cmd_validate(vfiles, out, err);
    if (export_cmd->parsed()) return cmd_data_export(export_out, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 2;
  }
  err << app.help();
  return 1;
}

}  // namespace dse::cli
