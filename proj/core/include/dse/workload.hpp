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

#ifndef DSE_WORKLOAD_HPP_
#define DSE_WORKLOAD_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace dse {

struct LayerDescriptor {
  std::string name;
  std::int64_t macs = 0;
  std::int64_t weight_bytes = 0;
  std::int64_t activation_bytes = 0;  // peak working set of the layer

  friend bool operator==(const LayerDescriptor&, const LayerDescriptor&) = default;
};

struct WorkloadTotals {
  std::int64_t macs = 0;
  std::int64_t weight_bytes = 0;
  std::int64_t max_weight_bytes = 0;
  std::int64_t max_activation_bytes = 0;
  std::size_t n_layers = 0;
};

// A neural model reduced to the per-layer quantities the cost model reads.
// Immutable once constructed; totals are computed up front.
class Workload {
 public:
  // Throws ValidationError on an empty layer list, negative quantities or a
  // layer without MACs.
  Workload(std::string name, std::string domain, std::vector<LayerDescriptor> layers);

  const std::string& name() const { return name_; }
  const std::string& domain() const { return domain_; }
  const std::vector<LayerDescriptor>& layers() const { return layers_; }
  const WorkloadTotals& totals() const { return totals_; }

  friend bool operator==(const Workload& a, const Workload& b) {
    return a.name_ == b.name_ && a.domain_ == b.domain_ && a.layers_ == b.layers_;
  }

 private:
  std::string name_;
  std::string domain_;
  std::vector<LayerDescriptor> layers_;
  WorkloadTotals totals_;
};

inline constexpr double kActivationBytesPerSqrtMac = 64.0;

// Splits the totals over `n_layers` layers using seeded log-normal (sigma = 1)
// shares and largest-remainder rounding, so the sums are exact.
// total_params_mb * 2^20 is rounded to the nearest byte first.
Workload synthesize_workload(std::string name, std::string domain, std::size_t n_layers,
                             double total_params_mb, std::int64_t total_macs,
                             std::uint64_t seed);

// Aggregates of one of the seven reference models.
struct ModelAggregate {
  std::string_view name;
  std::string_view domain;
  std::size_t n_layers;
  double params_mb;
  std::int64_t macs;
  std::uint64_t seed;
};

const std::vector<ModelAggregate>& reference_models();

class WorkloadSuite {
 public:
  WorkloadSuite() = default;
  // Throws ValidationError on duplicate workload names.
  explicit WorkloadSuite(std::vector<Workload> workloads);

  // Seven synthesized reference models; baseline = the mid-grid reference
  // configuration (latencies resolved by the cost model).
  static WorkloadSuite default_suite();
  static WorkloadSuite from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;

  const std::vector<Workload>& workloads() const { return workloads_; }
  const Workload* find(std::string_view name) const;
  const Workload& at(std::string_view name) const;
  std::vector<std::string> names() const;

  // Baseline either as explicit latencies or as a configuration (parameter
  // values) evaluated by the cost model.
  const std::map<std::string, double>& baseline_latency_s() const { return baseline_latency_s_; }
  const std::optional<std::map<std::string, double>>& baseline_config() const {
    return baseline_config_;
  }
  void set_baseline_latency(std::map<std::string, double> latencies);
  void set_baseline_config(std::map<std::string, double> values) {
    baseline_config_ = std::move(values);
  }

 private:
  std::vector<Workload> workloads_;
  std::map<std::string, double> baseline_latency_s_;
  std::optional<std::map<std::string, double>> baseline_config_;
};

// Parameter values of the mid-grid reference accelerator.
std::map<std::string, double> reference_config_values();

WorkloadSuite load_suite(const std::filesystem::path& path);
void save_suite(const WorkloadSuite& suite, const std::filesystem::path& path);

}  // namespace dse

#endif  // DSE_WORKLOAD_HPP_
