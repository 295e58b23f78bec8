// Copyright 2026 The synthaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SYNTHAUDIT_SAMPLING_H_
#define SYNTHAUDIT_SAMPLING_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "synthaudit/corpus.h"
#include "synthaudit/embedding.h"

namespace synthaudit::sampling {

// Cochran sample size for an infinite population, Z^2 * sigma2 / E^2.
// Unrounded. Throws InvalidArgument for Z <= 0, E <= 0 or sigma2 < 0.
double CochranInfinite(double z, double sigma2, double error_margin);

// Finite-population Cochran size,
//   ceil(Z^2 sigma2 N / (E^2 (N - 1) + Z^2 sigma2)), clamped to [1, N].
size_t CochranFinite(double z, double sigma2, double error_margin,
                     size_t population);

struct StratumInput {
  size_t size = 0;     // N_w
  double sigma = 0.0;  // within-stratum standard deviation
};

struct NeymanAllocation {
  std::vector<double> raw_shares;  // n * N_w sigma_w / sum(N_w sigma_w)
  std::vector<size_t> allocations;
  size_t total = 0;  // may exceed n after rounding up
};

// Shares proportional to N_w * sigma_w, each rounded up, floored at 1 and
// capped at N_w. Throws InvalidArgument when every weight is zero.
NeymanAllocation NeymanAllocate(size_t n,
                                const std::vector<StratumInput>& strata);

struct Stratum {
  std::string author;
  size_t size = 0;
  double sigma = 0.0;
  double raw_share = 0.0;
  size_t allocated = 0;
};

struct SamplingPlan {
  double z = 1.96;
  double error_margin = 0.0;
  double sigma2 = 0.0;
  size_t population = 0;
  double infinite_n = 0.0;
  size_t n = 0;                 // Cochran finite size
  size_t allocated = 0;         // sum of stratum allocations
  std::vector<Stratum> strata;  // ordered by author label
};

// Builds the full plan: sigma2 = tr(cov) over all posts, per-author sigma_w =
// sqrt(tr(cov_w)) (zero for single-post authors), Neyman allocation of n.
// `embeddings` must be in corpus post order.
SamplingPlan PlanSample(const corpus::Corpus& corpus,
                        const std::vector<embedding::PostEmbedding>& embeddings,
                        double z, double error_margin);

// Per-author uniform sample without replacement. Output keeps corpus order.
// Throws InvalidArgument if an allocation exceeds an author's posts or names an
// unknown author.
corpus::Corpus DrawSample(const corpus::Corpus& corpus,
                          const std::map<std::string, size_t>& allocations,
                          uint64_t seed);

std::map<std::string, size_t> AllocationMap(const SamplingPlan& plan);

}  // namespace synthaudit::sampling

#endif  // SYNTHAUDIT_SAMPLING_H_
