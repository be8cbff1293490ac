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

#include "dse/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dse/error.hpp"

namespace dse {

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double expected_improvement(double mu, double sigma, double best_so_far, double xi) {
  const double gain = mu - best_so_far - xi;
  if (!(sigma > 0)) return std::max(0.0, gain);
  const double z = gain / sigma;
  return gain * normal_cdf(z) + sigma * normal_pdf(z);
}

AcceleratorConfig hill_climb_from(const AcquisitionFn& acquisition, const SearchSpace& space,
                                  AcceleratorConfig start, double* best_value) {
  AcceleratorConfig current = std::move(start);
  double current_value = acquisition(current);
  for (;;) {
    AcceleratorConfig best_move;
    double best_move_value = current_value;
    bool improved = false;
    for (std::size_t g = 0; g < space.num_params(); ++g) {
      const int original = current.genome[g];
      for (int v = 0; v < static_cast<int>(space.param(g).size()); ++v) {
        if (v == original) continue;
        current.genome[g] = v;
        const double value = acquisition(current);
        if (value > best_move_value) {
          best_move_value = value;
          best_move = current;
          improved = true;
        }
      }
      current.genome[g] = original;
    }
    if (!improved) break;
    current = std::move(best_move);
    current_value = best_move_value;
  }
  if (best_value) *best_value = current_value;
  return current;
}

AcceleratorConfig hill_climb(const AcquisitionFn& acquisition, const SearchSpace& space,
                             std::size_t restarts, Rng& rng) {
  if (restarts == 0) throw ValidationError("hill_climb: restarts must be >= 1");
  AcceleratorConfig best;
  double best_value = 0;
  for (std::size_t r = 0; r < restarts; ++r) {
    double value = 0;
    auto local = hill_climb_from(acquisition, space, space.sample_uniform(rng), &value);
    if (r == 0 || value > best_value) {
      best = std::move(local);
      best_value = value;
    }
  }
  return best;
}

}  // namespace dse
