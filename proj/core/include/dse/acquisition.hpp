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

#ifndef DSE_ACQUISITION_HPP_
#define DSE_ACQUISITION_HPP_

#include <cstddef>
#include <functional>

#include "dse/rng.hpp"
#include "dse/space.hpp"

namespace dse {

double normal_pdf(double z);
double normal_cdf(double z);

// Expected improvement for maximization:
//   z = (mu - best - xi) / sigma,  EI = (mu - best - xi) Phi(z) + sigma phi(z),
// and max(0, mu - best - xi) when sigma = 0.
double expected_improvement(double mu, double sigma, double best_so_far, double xi);

using AcquisitionFn = std::function<double(const AcceleratorConfig&)>;

// Steepest-ascent local search from `start` over single-gene moves: every
// neighbor is scored and the best strictly improving one is taken, until no
// neighbor improves. Ties keep the first neighbor in (gene, value) order.
AcceleratorConfig hill_climb_from(const AcquisitionFn& acquisition, const SearchSpace& space,
                                  AcceleratorConfig start, double* best_value = nullptr);

// Best local optimum over `restarts` uniform random starts.
AcceleratorConfig hill_climb(const AcquisitionFn& acquisition, const SearchSpace& space,
                             std::size_t restarts, Rng& rng);

}  // namespace dse

#endif  // DSE_ACQUISITION_HPP_
