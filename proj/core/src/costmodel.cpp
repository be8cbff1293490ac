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

#include "dse/costmodel.hpp"

#include <cmath>
#include <algorithm>
#include <fstream>
#include <set>

namespace dse {
namespace {

constexpr double kMiB = 1048576.0;

constexpr std::array<std::string_view, 10> kRoles = {
    param::kPesX,           param::kPesY,          param::kLocalMemoryKb,
    param::kSimdUnits,      param::kGlobalMemoryMb, param::kComputeLanes,
    param::kInstructionMemoryKb, param::kParameterMemoryMb, param::kActivationMemoryMb,
    param::kIoBandwidthGbps};

}  // namespace

void Calibration::validate() const {
  const std::pair<const char*, double> fields[] = {
      {"clock_hz", clock_hz},
      {"a_pe_base", a_pe_base},
      {"a_mac", a_mac},
      {"a_sram", a_sram},
      {"a_io", a_io},
      {"a_fixed", a_fixed},
      {"layer_overhead_cycles", layer_overhead_cycles},
      {"instr_bytes_per_layer", instr_bytes_per_layer},
      {"stream_penalty", stream_penalty}};
  for (const auto& [name, v] : fields)
    if (!(v > 0)) throw ValidationError(std::string("calibration.") + name + " must be > 0");
  if (stream_penalty > 1) throw ValidationError("calibration.stream_penalty must be <= 1");
}

Calibration Calibration::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("calibration: document is not an object");
  Calibration c;
  auto read = [&](const char* key, double& field) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_number()) throw ParseError(std::string("calibration.") + key + " is not a number");
    field = doc[key].get<double>();
  };
  for (const auto& [key, _] : doc.items()) {
    static const std::set<std::string> known = {
        "clock_hz", "a_pe_base", "a_mac", "a_sram", "a_io", "a_fixed",
        "layer_overhead_cycles", "instr_bytes_per_layer", "stream_penalty"};
    if (!known.contains(key)) throw ParseError("calibration: unknown field '" + key + "'");
  }
  read("clock_hz", c.clock_hz);
  read("a_pe_base", c.a_pe_base);
  read("a_mac", c.a_mac);
  read("a_sram", c.a_sram);
  read("a_io", c.a_io);
  read("a_fixed", c.a_fixed);
  read("layer_overhead_cycles", c.layer_overhead_cycles);
  read("instr_bytes_per_layer", c.instr_bytes_per_layer);
  read("stream_penalty", c.stream_penalty);
  try {
    c.validate();
  } catch (const ValidationError& e) {
    throw ParseError(e.what());
  }
  return c;
}

Calibration Calibration::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("calibration file not found: " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("calibration file " + path.string() + ": " + e.what());
  }
  return from_json(doc);
}

nlohmann::json Calibration::to_json() const {
  return {{"clock_hz", clock_hz},
          {"a_pe_base", a_pe_base},
          {"a_mac", a_mac},
          {"a_sram", a_sram},
          {"a_io", a_io},
          {"a_fixed", a_fixed},
          {"layer_overhead_cycles", layer_overhead_cycles},
          {"instr_bytes_per_layer", instr_bytes_per_layer},
          {"stream_penalty", stream_penalty}};
}

double area_mm2(const HardwareParams& hw, const Calibration& cal) {
  const double npe = hw.num_pes();
  const double sram_mb = npe * hw.local_memory_kb / 1024.0 + hw.global_memory_mb +
                         hw.parameter_memory_mb + hw.activation_memory_mb +
                         hw.instruction_memory_kb / 1024.0;
  return cal.a_fixed + cal.a_pe_base * npe + cal.a_mac * hw.macs_per_cycle() +
         cal.a_sram * sram_mb + cal.a_io * hw.io_bandwidth_gbps;
}

Feasibility check_feasible(const HardwareParams& hw, const Workload& workload,
                           const Calibration& cal) {
  const auto& t = workload.totals();
  Feasibility f;
  auto fail = [&](std::string_view tag) {
    f.feasible = false;
    f.reasons.emplace_back(tag);
  };
  if (static_cast<double>(t.max_activation_bytes) > hw.activation_memory_mb * kMiB)
    fail(reason::kActivationMemory);
  if (static_cast<double>(t.max_weight_bytes) > hw.global_memory_mb * kMiB)
    fail(reason::kGlobalMemory);
  if (static_cast<double>(t.n_layers) * cal.instr_bytes_per_layer > hw.instruction_memory_kb * 1024.0)
    fail(reason::kInstructionMemory);
  if (static_cast<double>(t.weight_bytes) > (hw.parameter_memory_mb + hw.global_memory_mb) * kMiB)
    fail(reason::kParameterStorage);
  return f;
}

double latency_s(const HardwareParams& hw, const Workload& workload, const Calibration& cal) {
  auto f = check_feasible(hw, workload, cal);
  if (!f.feasible)
    throw InfeasibleError("configuration cannot run workload '" + workload.name() + "'",
                          std::move(f.reasons));
  const double npe = hw.num_pes();
  const double macs_per_cycle = hw.macs_per_cycle();
  const double local_bytes = hw.local_memory_kb * 1024.0;
  const double bytes_per_cycle = hw.io_bandwidth_gbps * 1e9 / cal.clock_hz;
  double cycles = 0;
  for (const auto& l : workload.layers()) {
    const double util =
        static_cast<double>(l.weight_bytes) / npe <= local_bytes ? 1.0 : cal.stream_penalty;
    const double compute = std::ceil(static_cast<double>(l.macs) / (macs_per_cycle * util));
    const double memory =
        std::ceil(static_cast<double>(l.weight_bytes + l.activation_bytes) / bytes_per_cycle);
    cycles += std::max(compute, memory) + cal.layer_overhead_cycles;
  }
  return cycles / cal.clock_hz;
}

CostModel::CostModel(SearchSpace space, Calibration calibration)
    : space_(std::move(space)), calibration_(calibration) {
  calibration_.validate();
  for (std::size_t r = 0; r < kRoles.size(); ++r) {
    auto idx = space_.find(kRoles[r]);
    if (!idx)
      throw ValidationError("search space lacks parameter '" + std::string(kRoles[r]) +
                            "' required by the cost model");
    slot_[r] = *idx;
  }
}

HardwareParams CostModel::hardware(const AcceleratorConfig& config) const {
  auto v = [&](std::size_t role) { return space_.value(config, slot_[role]); };
  HardwareParams hw;
  hw.pes_x = v(0);
  hw.pes_y = v(1);
  hw.local_memory_kb = v(2);
  hw.simd_units = v(3);
  hw.global_memory_mb = v(4);
  hw.compute_lanes = v(5);
  hw.instruction_memory_kb = v(6);
  hw.parameter_memory_mb = v(7);
  hw.activation_memory_mb = v(8);
  hw.io_bandwidth_gbps = v(9);
  return hw;
}

Evaluation CostModel::evaluate(const AcceleratorConfig& config, const WorkloadSuite& suite,
                               std::span<const std::string> workload_names) const {
  if (workload_names.empty()) throw ValidationError("evaluate: empty workload list");
  const HardwareParams hw = hardware(config);
  Evaluation e;
  e.area_mm2 = area_mm2(hw, calibration_);
  std::vector<const Workload*> ws;
  for (const auto& name : workload_names) ws.push_back(&suite.at(name));
  e.feasible = true;
  for (const Workload* w : ws) {
    auto f = check_feasible(hw, *w, calibration_);
    if (!f.feasible) {
      e.feasible = false;
      for (auto& r : f.reasons)
        if (std::find(e.infeasibility_reasons.begin(), e.infeasibility_reasons.end(), r) ==
            e.infeasibility_reasons.end())
          e.infeasibility_reasons.push_back(std::move(r));
    }
  }
  if (e.feasible)
    for (const Workload* w : ws) e.latency_s[w->name()] = latency_s(hw, *w, calibration_);
  return e;
}

std::map<std::string, double> CostModel::baseline_latencies(const WorkloadSuite& suite) const {
  if (!suite.baseline_config()) {
    if (suite.baseline_latency_s().empty())
      throw ValidationError("suite has no baseline configuration or latencies");
    return suite.baseline_latency_s();
  }
  const AcceleratorConfig ref = space_.from_values(*suite.baseline_config());
  std::map<std::string, double> out;
  for (const auto& w : suite.workloads()) out[w.name()] = latency(ref, w);
  return out;
}

}  // namespace dse
