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

#ifndef DSE_COSTMODEL_HPP_
#define DSE_COSTMODEL_HPP_

#include <array>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dse/error.hpp"
#include "dse/space.hpp"
#include "dse/workload.hpp"

namespace dse {

// Constants of the analytical area/latency model.
struct Calibration {
  double clock_hz = 8e8;
  double a_pe_base = 0.01;        // mm^2 per PE
  double a_mac = 0.0006;          // mm^2 per MAC unit
  double a_sram = 0.15;           // mm^2 per MB of SRAM
  double a_io = 0.01;             // mm^2 per GB/s
  double a_fixed = 0.4;           // mm^2
  double layer_overhead_cycles = 1000;
  double instr_bytes_per_layer = 64;
  double stream_penalty = 0.5;    // utilization when weights spill local memory

  // Throws ValidationError unless all fields are > 0 and stream_penalty <= 1.
  void validate() const;
  static Calibration from_json(const nlohmann::json& doc);
  static Calibration load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

// Physical parameter values of one configuration.
struct HardwareParams {
  double pes_x = 1;
  double pes_y = 1;
  double local_memory_kb = 0;
  double simd_units = 1;
  double global_memory_mb = 0;
  double compute_lanes = 1;
  double instruction_memory_kb = 0;
  double parameter_memory_mb = 0;
  double activation_memory_mb = 0;
  double io_bandwidth_gbps = 0;

  double num_pes() const { return pes_x * pes_y; }
  double macs_per_cycle() const { return num_pes() * compute_lanes * simd_units; }
};

namespace reason {
inline constexpr std::string_view kActivationMemory = "activation_memory";
inline constexpr std::string_view kGlobalMemory = "global_memory";
inline constexpr std::string_view kInstructionMemory = "instruction_memory";
inline constexpr std::string_view kParameterStorage = "parameter_storage";
inline constexpr std::string_view kAreaBudget = "area_budget";
inline constexpr std::string_view kLatencyBudget = "latency_budget";
inline constexpr std::string_view kEvaluatorError = "evaluator_error";
}  // namespace reason

struct Feasibility {
  bool feasible = true;
  std::vector<std::string> reasons;
};

struct Evaluation {
  double area_mm2 = 0;
  std::map<std::string, double> latency_s;
  bool feasible = false;
  std::vector<std::string> infeasibility_reasons;
};

// Raised by latency() for a configuration that cannot run the workload.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, std::vector<std::string> reasons)
      : Error(what), reasons_(std::move(reasons)) {}
  const std::vector<std::string>& reasons() const { return reasons_; }

 private:
  std::vector<std::string> reasons_;
};

double area_mm2(const HardwareParams& hw, const Calibration& cal);
Feasibility check_feasible(const HardwareParams& hw, const Workload& workload,
                           const Calibration& cal);
// Roofline-style per-layer latency; throws InfeasibleError when
// check_feasible fails.
double latency_s(const HardwareParams& hw, const Workload& workload, const Calibration& cal);

// Binds the formulas to a search space so that configurations (grid indices)
// can be evaluated directly. Requires the ten canonical parameter names.
class CostModel {
 public:
  CostModel(SearchSpace space, Calibration calibration);

  const SearchSpace& space() const { return space_; }
  const Calibration& calibration() const { return calibration_; }

  HardwareParams hardware(const AcceleratorConfig& config) const;
  double area(const AcceleratorConfig& config) const { return area_mm2(hardware(config), calibration_); }
  Feasibility feasible(const AcceleratorConfig& config, const Workload& w) const {
    return check_feasible(hardware(config), w, calibration_);
  }
  double latency(const AcceleratorConfig& config, const Workload& w) const {
    return latency_s(hardware(config), w, calibration_);
  }

  // Feasible iff feasible for every named workload. Area is always filled in;
  // latencies only when feasible. Throws NotFoundError for unknown names and
  // ValidationError for an empty list.
  Evaluation evaluate(const AcceleratorConfig& config, const WorkloadSuite& suite,
                      std::span<const std::string> workload_names) const;

  // Baseline latencies of the suite: explicit ones, or those of its baseline
  // configuration under this model.
  std::map<std::string, double> baseline_latencies(const WorkloadSuite& suite) const;

 private:
  SearchSpace space_;
  Calibration calibration_;
  std::array<std::size_t, 10> slot_{};  // canonical role -> gene index
};

}  // namespace dse

#endif  // DSE_COSTMODEL_HPP_
