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

#ifndef DSE_SPACE_HPP_
#define DSE_SPACE_HPP_

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dse/rng.hpp"

namespace dse {

// Canonical parameter names of the accelerator space, in genome order.
namespace param {
inline constexpr std::string_view kPesX = "pes_x";
inline constexpr std::string_view kPesY = "pes_y";
inline constexpr std::string_view kLocalMemoryKb = "local_memory_kb";
inline constexpr std::string_view kSimdUnits = "simd_units";
inline constexpr std::string_view kGlobalMemoryMb = "global_memory_mb";
inline constexpr std::string_view kComputeLanes = "compute_lanes";
inline constexpr std::string_view kInstructionMemoryKb = "instruction_memory_kb";
inline constexpr std::string_view kParameterMemoryMb = "parameter_memory_mb";
inline constexpr std::string_view kActivationMemoryMb = "activation_memory_mb";
inline constexpr std::string_view kIoBandwidthGbps = "io_bandwidth_gbps";
}  // namespace param

struct ParamSpec {
  std::string name;
  std::vector<double> values;  // strictly increasing grid

  std::size_t size() const { return values.size(); }
};

// One point of the search space, stored as grid indices so that variation
// operators never need to know parameter units.
struct AcceleratorConfig {
  std::vector<int> genome;

  friend bool operator==(const AcceleratorConfig&, const AcceleratorConfig&) = default;
  friend auto operator<=>(const AcceleratorConfig&, const AcceleratorConfig&) = default;
};

class SearchSpace {
 public:
  // Throws ValidationError when a grid is empty or not strictly increasing,
  // or when names repeat.
  explicit SearchSpace(std::vector<ParamSpec> params);

  // The ten-parameter edge-accelerator space, 452,760,000 points.
  static SearchSpace default_space();
  static SearchSpace from_json(const nlohmann::json& doc);
  static SearchSpace load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  std::size_t num_params() const { return params_.size(); }
  const ParamSpec& param(std::size_t i) const { return params_[i]; }
  const std::vector<ParamSpec>& params() const { return params_; }
  std::optional<std::size_t> find(std::string_view name) const;

  // Exact product of the per-parameter counts. Throws if it overflows 64 bits.
  std::uint64_t cardinality() const { return cardinality_; }
  // Sum of per-parameter counts, i.e. the one-hot width.
  std::size_t onehot_width() const { return onehot_width_; }

  bool contains(const AcceleratorConfig& config) const;
  // Throws ValidationError naming the offending gene.
  void check(const AcceleratorConfig& config) const;

  AcceleratorConfig sample_uniform(Rng& rng) const;
  AcceleratorConfig min_config() const;
  AcceleratorConfig max_config() const;

  // index / (count - 1) per gene; single-valued parameters map to 0.
  std::vector<double> encode_numeric(const AcceleratorConfig& config) const;
  std::vector<std::uint8_t> encode_onehot(const AcceleratorConfig& config) const;
  // Argmax per block.
  AcceleratorConfig decode_onehot(std::span<const std::uint8_t> bits) const;

  // Resamples gene `gene` uniformly among the other values of its grid.
  // Identity when the grid has a single value.
  AcceleratorConfig mutate_gene(const AcceleratorConfig& config, std::size_t gene,
                                Rng& rng) const;

  // Mixed-radix rank in row-major order (last gene fastest); a bijection onto
  // [0, cardinality).
  std::uint64_t rank(const AcceleratorConfig& config) const;
  AcceleratorConfig unrank(std::uint64_t rank) const;

  double value(const AcceleratorConfig& config, std::size_t gene) const {
    return params_[gene].values[static_cast<std::size_t>(config.genome[gene])];
  }
  std::map<std::string, double> values(const AcceleratorConfig& config) const;
  // Nearest grid index per named value; throws if a value is not on the grid.
  AcceleratorConfig from_values(const std::map<std::string, double>& values) const;

  friend bool operator==(const SearchSpace& a, const SearchSpace& b) {
    return a.params_.size() == b.params_.size() &&
           std::equal(a.params_.begin(), a.params_.end(), b.params_.begin(),
                      [](const ParamSpec& x, const ParamSpec& y) {
                        return x.name == y.name && x.values == y.values;
                      });
  }

 private:
  std::vector<ParamSpec> params_;
  std::uint64_t cardinality_ = 1;
  std::size_t onehot_width_ = 0;
};

double euclidean_distance(std::span<const double> a, std::span<const double> b);

struct ConfigHash {
  std::size_t operator()(const AcceleratorConfig& c) const noexcept;
};

}  // namespace dse

#endif  // DSE_SPACE_HPP_
