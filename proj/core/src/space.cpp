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

#include "dse/space.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "dse/error.hpp"

namespace dse {

SearchSpace::SearchSpace(std::vector<ParamSpec> params) : params_(std::move(params)) {
  if (params_.empty()) throw ValidationError("search space has no parameters");
  std::set<std::string> names;
  for (const auto& p : params_) {
    if (p.name.empty()) throw ValidationError("parameter with empty name");
    if (!names.insert(p.name).second)
      throw ValidationError("duplicate parameter name '" + p.name + "'");
    if (p.values.empty())
      throw ValidationError("parameter '" + p.name + "' has no values");
    for (std::size_t i = 1; i < p.values.size(); ++i) {
      if (!(p.values[i] > p.values[i - 1]))
        throw ValidationError("parameter '" + p.name + "' values not strictly increasing");
    }
    const auto count = static_cast<std::uint64_t>(p.values.size());
    if (cardinality_ > std::numeric_limits<std::uint64_t>::max() / count)
      throw ValidationError("search space cardinality overflows 64 bits");
    cardinality_ *= count;
    onehot_width_ += p.values.size();
  }
}

SearchSpace SearchSpace::default_space() {
  auto range = [](int lo, int hi) {
    std::vector<double> v;
    for (int i = lo; i <= hi; ++i) v.push_back(i);
    return v;
  };
  return SearchSpace({
      {std::string(param::kPesX), range(1, 10)},
      {std::string(param::kPesY), range(1, 10)},
      {std::string(param::kLocalMemoryKb), {32, 64, 128, 256, 512, 1024, 2048}},
      {std::string(param::kSimdUnits), {1, 2, 4, 8, 16, 32, 64}},
      {std::string(param::kGlobalMemoryMb), {0.5, 1, 2, 3, 4, 6, 8, 12, 16, 24, 32}},
      {std::string(param::kComputeLanes), range(1, 10)},
      {std::string(param::kInstructionMemoryKb), {16, 32, 64, 128}},
      {std::string(param::kParameterMemoryMb), {1, 2, 4, 8, 16}},
      {std::string(param::kActivationMemoryMb), {0.5, 1, 2, 4, 8, 16, 32}},
      {std::string(param::kIoBandwidthGbps), {5, 10, 15, 20, 25, 30}},
  });
}

SearchSpace SearchSpace::from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("parameters") || !doc["parameters"].is_array())
    throw ParseError("space: expected object with 'parameters' array");
  std::vector<ParamSpec> params;
  std::size_t i = 0;
  for (const auto& entry : doc["parameters"]) {
    const std::string where = "space: parameters[" + std::to_string(i++) + "]";
    if (!entry.is_object()) throw ParseError(where + " is not an object");
    if (!entry.contains("name") || !entry["name"].is_string())
      throw ParseError(where + ".name missing or not a string");
    if (!entry.contains("values") || !entry["values"].is_array())
      throw ParseError(where + ".values missing or not an array");
    ParamSpec spec;
    spec.name = entry["name"].get<std::string>();
    for (const auto& v : entry["values"]) {
      if (!v.is_number()) throw ParseError(where + ".values contains a non-number");
      spec.values.push_back(v.get<double>());
    }
    params.push_back(std::move(spec));
  }
  return SearchSpace(std::move(params));
}

SearchSpace SearchSpace::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("space file not found: " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("space file " + path.string() + ": " + e.what());
  }
  return from_json(doc);
}

nlohmann::json SearchSpace::to_json() const {
  nlohmann::json params = nlohmann::json::array();
  for (const auto& p : params_) params.push_back({{"name", p.name}, {"values", p.values}});
  return {{"parameters", params}};
}

std::optional<std::size_t> SearchSpace::find(std::string_view name) const {
  for (std::size_t i = 0; i < params_.size(); ++i)
    if (params_[i].name == name) return i;
  return std::nullopt;
}

bool SearchSpace::contains(const AcceleratorConfig& config) const {
  if (config.genome.size() != params_.size()) return false;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const int idx = config.genome[i];
    if (idx < 0 || static_cast<std::size_t>(idx) >= params_[i].size()) return false;
  }
  return true;
}

void SearchSpace::check(const AcceleratorConfig& config) const {
  if (config.genome.size() != params_.size())
    throw ValidationError("genome has " + std::to_string(config.genome.size()) +
                          " genes, space has " + std::to_string(params_.size()));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const int idx = config.genome[i];
    if (idx < 0 || static_cast<std::size_t>(idx) >= params_[i].size())
      throw ValidationError("gene '" + params_[i].name + "' index " + std::to_string(idx) +
                            " out of range");
  }
}

AcceleratorConfig SearchSpace::sample_uniform(Rng& rng) const {
  AcceleratorConfig c;
  c.genome.resize(params_.size());
  for (std::size_t i = 0; i < params_.size(); ++i)
    c.genome[i] = static_cast<int>(rng.below(params_[i].size()));
  return c;
}

AcceleratorConfig SearchSpace::min_config() const {
  return AcceleratorConfig{std::vector<int>(params_.size(), 0)};
}

AcceleratorConfig SearchSpace::max_config() const {
  AcceleratorConfig c;
  for (const auto& p : params_) c.genome.push_back(static_cast<int>(p.size()) - 1);
  return c;
}

std::vector<double> SearchSpace::encode_numeric(const AcceleratorConfig& config) const {
  std::vector<double> x(params_.size(), 0.0);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const std::size_t count = params_[i].size();
    if (count > 1) x[i] = static_cast<double>(config.genome[i]) / static_cast<double>(count - 1);
  }
  return x;
}

std::vector<std::uint8_t> SearchSpace::encode_onehot(const AcceleratorConfig& config) const {
  std::vector<std::uint8_t> bits(onehot_width_, 0);
  std::size_t offset = 0;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    bits[offset + static_cast<std::size_t>(config.genome[i])] = 1;
    offset += params_[i].size();
  }
  return bits;
}

AcceleratorConfig SearchSpace::decode_onehot(std::span<const std::uint8_t> bits) const {
  if (bits.size() != onehot_width_)
    throw ValidationError("one-hot vector has wrong width " + std::to_string(bits.size()));
  AcceleratorConfig c;
  std::size_t offset = 0;
  for (const auto& p : params_) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < p.size(); ++j)
      if (bits[offset + j] > bits[offset + best]) best = j;
    c.genome.push_back(static_cast<int>(best));
    offset += p.size();
  }
  return c;
}

AcceleratorConfig SearchSpace::mutate_gene(const AcceleratorConfig& config, std::size_t gene,
                                           Rng& rng) const {
  AcceleratorConfig out = config;
  const std::size_t count = params_.at(gene).size();
  if (count <= 1) return out;
  // Draw from the count-1 other values by skipping over the current one.
  auto draw = static_cast<int>(rng.below(count - 1));
  if (draw >= config.genome[gene]) ++draw;
  out.genome[gene] = draw;
  return out;
}

std::uint64_t SearchSpace::rank(const AcceleratorConfig& config) const {
  std::uint64_t r = 0;
  for (std::size_t i = 0; i < params_.size(); ++i)
    r = r * params_[i].size() + static_cast<std::uint64_t>(config.genome[i]);
  return r;
}

AcceleratorConfig SearchSpace::unrank(std::uint64_t r) const {
  AcceleratorConfig c;
  c.genome.resize(params_.size());
  for (std::size_t i = params_.size(); i-- > 0;) {
    c.genome[i] = static_cast<int>(r % params_[i].size());
    r /= params_[i].size();
  }
  return c;
}

std::map<std::string, double> SearchSpace::values(const AcceleratorConfig& config) const {
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < params_.size(); ++i) out[params_[i].name] = value(config, i);
  return out;
}

AcceleratorConfig SearchSpace::from_values(const std::map<std::string, double>& vals) const {
  AcceleratorConfig c;
  for (const auto& p : params_) {
    auto it = vals.find(p.name);
    if (it == vals.end()) throw ValidationError("missing value for parameter '" + p.name + "'");
    int found = -1;
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (std::abs(p.values[j] - it->second) <= 1e-9 * std::max(1.0, std::abs(it->second)))
        found = static_cast<int>(j);
    }
    if (found < 0) {
      std::ostringstream os;
      os << "value " << it->second << " is not on the grid of '" << p.name << "'";
      throw ValidationError(os.str());
    }
    c.genome.push_back(found);
  }
  return c;
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

std::size_t ConfigHash::operator()(const AcceleratorConfig& c) const noexcept {
  std::uint64_t h = 14695981039346656037ULL;
  for (int g : c.genome) {
    h ^= static_cast<std::uint64_t>(g) + 1;
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

}  // namespace dse
