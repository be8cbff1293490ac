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

#include "dse/workload.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include "dse/error.hpp"
#include "dse/rng.hpp"
#include "dse/space.hpp"

namespace dse {
namespace {

// Largest-remainder apportionment of `total` proportionally to `shares`.
std::vector<std::int64_t> apportion(std::int64_t total, const std::vector<double>& shares) {
  const double sum = std::accumulate(shares.begin(), shares.end(), 0.0);
  std::vector<std::int64_t> out(shares.size());
  std::vector<double> frac(shares.size());
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < shares.size(); ++i) {
    const double ideal = static_cast<double>(total) * shares[i] / sum;
    out[i] = static_cast<std::int64_t>(std::floor(ideal));
    frac[i] = ideal - static_cast<double>(out[i]);
    assigned += out[i];
  }
  std::vector<std::size_t> order(shares.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  // Floating-point floors can overshoot by a unit in pathological cases; the
  // second loop settles the sum exactly either way.
  const std::size_t n = order.size();
  std::int64_t remainder = total - assigned;
  for (std::size_t k = 0; remainder > 0; ++k, --remainder) ++out[order[k % n]];
  for (std::size_t k = 0; remainder < 0; ++k) {
    auto& v = out[order[n - 1 - k % n]];
    if (v > 0) {
      --v;
      ++remainder;
    }
  }
  return out;
}

std::vector<double> lognormal_shares(std::size_t n, Rng& rng) {
  std::vector<double> s(n);
  for (auto& v : s) v = std::exp(1.0 * rng.normal());
  return s;
}

std::int64_t json_int(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_number())
    throw ParseError(where + "." + key + " missing or not a number");
  const double v = j[key].get<double>();
  if (v < 0 || v != std::floor(v)) throw ParseError(where + "." + key + " must be a non-negative integer");
  return static_cast<std::int64_t>(v);
}

}  // namespace

Workload::Workload(std::string name, std::string domain, std::vector<LayerDescriptor> layers)
    : name_(std::move(name)), domain_(std::move(domain)), layers_(std::move(layers)) {
  if (layers_.empty()) throw ValidationError("workload '" + name_ + "' has no layers");
  for (const auto& l : layers_) {
    if (l.macs <= 0 || l.weight_bytes < 0 || l.activation_bytes < 0)
      throw ValidationError("workload '" + name_ + "' layer '" + l.name +
                            "' has invalid quantities");
    totals_.macs += l.macs;
    totals_.weight_bytes += l.weight_bytes;
    totals_.max_weight_bytes = std::max(totals_.max_weight_bytes, l.weight_bytes);
    totals_.max_activation_bytes = std::max(totals_.max_activation_bytes, l.activation_bytes);
  }
  totals_.n_layers = layers_.size();
}

Workload synthesize_workload(std::string name, std::string domain, std::size_t n_layers,
                             double total_params_mb, std::int64_t total_macs,
                             std::uint64_t seed) {
  if (n_layers == 0) throw ValidationError("synthesize_workload: n_layers must be >= 1");
  if (!(total_params_mb > 0) || total_macs <= 0)
    throw ValidationError("synthesize_workload: totals must be positive");
  if (static_cast<std::int64_t>(n_layers) > total_macs)
    throw ValidationError("synthesize_workload: fewer MACs than layers");

  Rng rng(seed);
  const auto mac_shares = lognormal_shares(n_layers, rng);
  const auto weight_shares = lognormal_shares(n_layers, rng);
  const auto total_weight = static_cast<std::int64_t>(std::llround(total_params_mb * 1048576.0));

  auto macs = apportion(total_macs, mac_shares);
  // Every compute layer needs at least one MAC; borrow from the largest.
  for (auto& m : macs) {
    if (m == 0) {
      auto largest = std::max_element(macs.begin(), macs.end());
      --*largest;
      m = 1;
    }
  }
  const auto weights = apportion(total_weight, weight_shares);

  std::vector<LayerDescriptor> layers(n_layers);
  for (std::size_t i = 0; i < n_layers; ++i) {
    layers[i].name = "layer" + std::to_string(i);
    layers[i].macs = macs[i];
    layers[i].weight_bytes = weights[i];
    layers[i].activation_bytes = static_cast<std::int64_t>(
        std::llround(kActivationBytesPerSqrtMac * std::sqrt(static_cast<double>(macs[i]))));
  }
  return Workload(std::move(name), std::move(domain), std::move(layers));
}

const std::vector<ModelAggregate>& reference_models() {
  static const std::vector<ModelAggregate> models = {
      {"MobileNetV2", "Image Classification", 76, 3.33, 301'000'000, 1},
      {"MobileNetEdge", "Image Classification", 93, 3.88, 991'000'000, 2},
      {"M3", "Object Detection", 93, 2.19, 464'000'000, 3},
      {"M4", "Object Detection", 111, 0.42, 107'000'000, 4},
      {"M5", "Object Detection", 60, 6.29, 1'721'000'000, 5},
      {"M6", "Semantic Segmentation", 62, 0.37, 591'000'000, 6},
      {"M7", "OCR", 56, 0.30, 5'190'000, 7},
  };
  return models;
}

std::map<std::string, double> reference_config_values() {
  return {
      {std::string(param::kPesX), 4},
      {std::string(param::kPesY), 4},
      {std::string(param::kLocalMemoryKb), 512},
      {std::string(param::kSimdUnits), 16},
      {std::string(param::kGlobalMemoryMb), 8},
      {std::string(param::kComputeLanes), 4},
      {std::string(param::kInstructionMemoryKb), 64},
      {std::string(param::kParameterMemoryMb), 8},
      {std::string(param::kActivationMemoryMb), 8},
      {std::string(param::kIoBandwidthGbps), 20},
  };
}

WorkloadSuite::WorkloadSuite(std::vector<Workload> workloads) : workloads_(std::move(workloads)) {
  std::set<std::string> seen;
  for (const auto& w : workloads_)
    if (!seen.insert(w.name()).second)
      throw ValidationError("duplicate workload name '" + w.name() + "'");
}

WorkloadSuite WorkloadSuite::default_suite() {
  std::vector<Workload> ws;
  for (const auto& m : reference_models())
    ws.push_back(synthesize_workload(std::string(m.name), std::string(m.domain), m.n_layers,
                                     m.params_mb, m.macs, m.seed));
  WorkloadSuite suite(std::move(ws));
  suite.set_baseline_config(reference_config_values());
  return suite;
}

const Workload* WorkloadSuite::find(std::string_view name) const {
  for (const auto& w : workloads_)
    if (w.name() == name) return &w;
  return nullptr;
}

const Workload& WorkloadSuite::at(std::string_view name) const {
  const Workload* w = find(name);
  if (!w) throw NotFoundError("unknown workload '" + std::string(name) + "'");
  return *w;
}

std::vector<std::string> WorkloadSuite::names() const {
  std::vector<std::string> out;
  for (const auto& w : workloads_) out.push_back(w.name());
  return out;
}

void WorkloadSuite::set_baseline_latency(std::map<std::string, double> latencies) {
  for (const auto& [name, sec] : latencies) {
    if (!find(name)) throw ValidationError("baseline names unknown workload '" + name + "'");
    if (!(sec > 0)) throw ValidationError("baseline latency for '" + name + "' must be > 0");
  }
  baseline_latency_s_ = std::move(latencies);
}

WorkloadSuite WorkloadSuite::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("suite: document is not an object");
  if (!doc.contains("workloads") || !doc["workloads"].is_array())
    throw ParseError("suite: 'workloads' missing or not an array");
  std::vector<Workload> ws;
  std::size_t wi = 0;
  for (const auto& w : doc["workloads"]) {
    const std::string where = "suite: workloads[" + std::to_string(wi++) + "]";
    if (!w.is_object()) throw ParseError(where + " is not an object");
    if (!w.contains("name") || !w["name"].is_string())
      throw ParseError(where + ".name missing or not a string");
    if (!w.contains("layers") || !w["layers"].is_array())
      throw ParseError(where + ".layers missing or not an array");
    std::vector<LayerDescriptor> layers;
    std::size_t li = 0;
    for (const auto& l : w["layers"]) {
      const std::string lw = where + ".layers[" + std::to_string(li++) + "]";
      if (!l.is_object()) throw ParseError(lw + " is not an object");
      LayerDescriptor d;
      d.name = l.value("name", "layer" + std::to_string(li - 1));
      d.macs = json_int(l, "macs", lw);
      d.weight_bytes = json_int(l, "weight_bytes", lw);
      d.activation_bytes = json_int(l, "activation_bytes", lw);
      layers.push_back(std::move(d));
    }
    try {
      ws.emplace_back(w["name"].get<std::string>(), w.value("domain", ""), std::move(layers));
    } catch (const ValidationError& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  WorkloadSuite suite(std::move(ws));
  if (doc.contains("baseline")) {
    const auto& b = doc["baseline"];
    if (!b.is_object()) throw ParseError("suite: 'baseline' is not an object");
    if (b.contains("reference")) {
      if (b["reference"] != "mid_grid")
        throw ParseError("suite: baseline.reference must be \"mid_grid\"");
      suite.set_baseline_config(reference_config_values());
    } else if (b.contains("config")) {
      if (!b["config"].is_object()) throw ParseError("suite: baseline.config is not an object");
      suite.set_baseline_config(b["config"].get<std::map<std::string, double>>());
    } else if (b.contains("latency_s")) {
      if (!b["latency_s"].is_object())
        throw ParseError("suite: baseline.latency_s is not an object");
      try {
        suite.set_baseline_latency(b["latency_s"].get<std::map<std::string, double>>());
      } catch (const ValidationError& e) {
        throw ParseError(std::string("suite: baseline.latency_s: ") + e.what());
      }
    } else {
      throw ParseError("suite: baseline needs one of 'reference', 'config', 'latency_s'");
    }
  }
  return suite;
}

nlohmann::json WorkloadSuite::to_json() const {
  nlohmann::json ws = nlohmann::json::array();
  for (const auto& w : workloads_) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& l : w.layers())
      layers.push_back({{"name", l.name},
                        {"macs", l.macs},
                        {"weight_bytes", l.weight_bytes},
                        {"activation_bytes", l.activation_bytes}});
    ws.push_back({{"name", w.name()}, {"domain", w.domain()}, {"layers", layers}});
  }
  nlohmann::json doc = {{"workloads", ws}};
  if (baseline_config_) {
    if (*baseline_config_ == reference_config_values())
      doc["baseline"] = {{"reference", "mid_grid"}};
    else
      doc["baseline"] = {{"config", *baseline_config_}};
  } else if (!baseline_latency_s_.empty()) {
    doc["baseline"] = {{"latency_s", baseline_latency_s_}};
  }
  return doc;
}

WorkloadSuite load_suite(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("suite file not found: " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("suite file " + path.string() + ": " + e.what());
  }
  return WorkloadSuite::from_json(doc);
}

void save_suite(const WorkloadSuite& suite, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write suite file: " + path.string());
  out << suite.to_json().dump(1) << '\n';
}

}  // namespace dse
