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

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "dse/space.hpp"
#include "dse/trial_log.hpp"
#include "dse_tools/cli.hpp"
#include "temp_dir.hpp"

namespace fs = std::filesystem;
using dse::cli::dispatch;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t count_lines(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) n += !line.empty();
  return n;
}

}  // namespace

TEST_CASE("space info prints the cardinality") {
  const auto r = cli({"space", "info"});
  CHECK(r.code == 0);
  CHECK(r.out.find("cardinality 452760000 (452,760,000)") != std::string::npos);
  CHECK(r.out.find("onehot_width 77") != std::string::npos);
}

TEST_CASE("run writes one JSONL line per trial and refuses to overwrite") {
  dse::testing::TempDir tmp;
  const std::string out = tmp.path().string();
  auto r = cli({"run", "--optimizer", "random", "--trials", "10", "--seed", "3", "--out", out});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("spec hash: ") != std::string::npos);
  const fs::path log = tmp.path() / "study" / "random" / "seed3.jsonl";
  CHECK(count_lines(log) == 10);
  CHECK(dse::read_trial_log(log, dse::SearchSpace::default_space()).size() == 10);

  r = cli({"run", "--optimizer", "random", "--trials", "10", "--seed", "3", "--out", out});
  CHECK(r.code == 1);
  CHECK(r.err.find("already exists") != std::string::npos);
  r = cli({"run", "--optimizer", "random", "--trials", "12", "--seed", "3", "--out", out, "--force"});
  CHECK(r.code == 0);
  CHECK(count_lines(log) == 12);
}

TEST_CASE("run from a spec file, then resume") {
  dse::testing::TempDir tmp;
  const fs::path spec = tmp.path() / "spec.json";
  std::ofstream(spec) << R"({"name": "evo", "optimizer": "evolutionary", "trial_budget": 40,
                             "n_seeds": 2, "max_concurrent": 1, "area_budget_mm2": 6.8})";
  const std::string out = tmp.path().string();
  auto r = cli({"run", "--spec", spec.string(), "--out", out});
  REQUIRE(r.code == 0);
  CHECK(count_lines(tmp.path() / "study" / "evo" / "seed0.jsonl") == 40);
  CHECK(count_lines(tmp.path() / "study" / "evo" / "seed1.jsonl") == 40);
  r = cli({"run", "--spec", spec.string(), "--out", out, "--resume"});
  CHECK(r.code == 0);
  CHECK(count_lines(tmp.path() / "study" / "evo" / "seed1.jsonl") == 40);
  r = cli({"run", "--spec", spec.string(), "--out", out, "--resume", "--trials", "50"});
  CHECK(r.code == 1);
  CHECK(r.err.find("hash mismatch") != std::string::npos);
}

TEST_CASE("transfer and report") {
  dse::testing::TempDir tmp;
  const std::string out = tmp.path().string();
  REQUIRE(cli({"run", "--optimizer", "random", "--trials", "300", "--area-budget", "6.8", "--name",
               "src", "--out", out}).code == 0);
  auto r = cli({"transfer", "--source", (tmp.path() / "study" / "src").string(), "--optimizer",
                "evolutionary", "--trials", "20", "--area-budget", "4.8", "--name", "dst",
                "--threshold", "10", "--count", "5", "--out", out});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("seed trials: 5") != std::string::npos);
  CHECK(count_lines(tmp.path() / "study" / "dst" / "warm_start.jsonl") == 5);

  r = cli({"report", (tmp.path() / "study").string(), "--out", (tmp.path() / "rep").string()});
  CHECK(r.code == 0);
  CHECK(fs::exists(tmp.path() / "rep" / "report.json"));
  const auto rep = nlohmann::json::parse(std::ifstream(tmp.path() / "rep" / "report.json"));
  CHECK(rep["strategies"].size() == 2);
  CHECK(rep["warnings"].size() == 1);  // different area budgets

  r = cli({"transfer", "--source", (tmp.path() / "study" / "src").string(), "--trials", "5",
           "--out", out, "--name", "nobudget"});
  CHECK(r.code == 1);
}

TEST_CASE("report on an empty directory is a user error") {
  dse::testing::TempDir tmp;
  const auto r = cli({"report", tmp.path().string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("no studies") != std::string::npos);
}

TEST_CASE("exhaustive writes survivors and the best design") {
  dse::testing::TempDir tmp;
  const fs::path spec = tmp.path() / "spec.json";
  std::ofstream(spec) << R"({"area_budget_mm2": 6.8})";
  const auto r = cli({"exhaustive", "--filter", std::string(DSE_DATA_DIR) + "/filters/edge.json",
                      "--spec", spec.string(), "--out", (tmp.path() / "ex").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("survivors_count 4312") != std::string::npos);
  CHECK(count_lines(tmp.path() / "ex" / "evaluations.jsonl") == 4312);
  const auto best = nlohmann::json::parse(std::ifstream(tmp.path() / "ex" / "best.json"));
  CHECK(best["survivors_count"] == 4312);
  CHECK(best["best_reward"].get<double>() > 1.0);
}

TEST_CASE("validate and data export") {
  dse::testing::TempDir tmp;
  auto r = cli({"data", "export", "--out", tmp.path().string()});
  REQUIRE(r.code == 0);
  r = cli({"validate", "--space", (tmp.path() / "space" / "default.json").string(), "--suite",
           (tmp.path() / "workloads" / "default_suite.json").string()});
  CHECK(r.code == 0);
  std::ofstream(tmp.path() / "bad.json") << R"({"trial_budget": -3})";
  r = cli({"validate", "--spec", (tmp.path() / "bad.json").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("invalid spec") != std::string::npos);
  CHECK(cli({"validate"}).code == 0);
}

TEST_CASE("usage errors exit with 1, help with 0") {
  CHECK(cli({"run", "--bogus"}).code == 1);
  CHECK(cli({}).code == 1);
  CHECK(cli({"run", "--optimizer", "annealing", "--trials", "3"}).code == 1);
  CHECK(cli({"--help"}).code == 0);
}
