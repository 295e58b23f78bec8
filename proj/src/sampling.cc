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

#include "synthaudit/sampling.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "synthaudit/errors.h"
#include "synthaudit/rng.h"

namespace synthaudit::sampling {
namespace {

// Rounding up tolerates representation error in values that are integral in
// exact arithmetic (e.g. 3.0000000000000004).
constexpr double kCeilSlack = 1e-9;

size_t CeilWithSlack(double x) {
  return static_cast<size_t>(std::ceil(x - kCeilSlack));
}

void CheckCochranInputs(double z, double sigma2, double error_margin) {
  if (!(z > 0.0)) throw InvalidArgument("Z must be positive");
  if (!(error_margin > 0.0)) throw InvalidArgument("E must be positive");
  if (!(sigma2 >= 0.0)) throw InvalidArgument("sigma2 must be nonnegative");
}

}  // namespace

double CochranInfinite(double z, double sigma2, double error_margin) {
  CheckCochranInputs(z, sigma2, error_margin);
  return z * z * sigma2 / (error_margin * error_margin);
}

size_t CochranFinite(double z, double sigma2, double error_margin,
                     size_t population) {
  CheckCochranInputs(z, sigma2, error_margin);
  if (population == 0) throw InvalidArgument("N must be at least 1");
  const double zs = z * z * sigma2;
  const double big_n = static_cast<double>(population);
  const double denom = error_margin * error_margin * (big_n - 1.0) + zs;
  const double n = denom > 0.0 ? zs * big_n / denom : 0.0;
  return std::clamp<size_t>(CeilWithSlack(n), 1, population);
}

NeymanAllocation NeymanAllocate(size_t n,
                                const std::vector<StratumInput>& strata) {
  if (n == 0) throw InvalidArgument("Neyman allocation needs n >= 1");
  double total_weight = 0.0;
  for (const auto& s : strata) {
    if (s.sigma < 0.0) throw InvalidArgument("stratum sigma must be >= 0");
    total_weight += static_cast<double>(s.size) * s.sigma;
  }
  if (!(total_weight > 0.0)) {
    throw InvalidArgument("Neyman allocation: all stratum weights are zero");
  }
  NeymanAllocation out;
  out.raw_shares.reserve(strata.size());
  out.allocations.reserve(strata.size());
  for (const auto& s : strata) {
    const double share = static_cast<double>(n) *
                         (static_cast<double>(s.size) * s.sigma) / total_weight;
    out.raw_shares.push_back(share);
    size_t alloc = std::max<size_t>(CeilWithSlack(share), 1);
    alloc = std::min(alloc, s.size);
    out.allocations.push_back(alloc);
    out.total += alloc;
  }
  return out;
}

SamplingPlan PlanSample(const corpus::Corpus& corpus,
                        const std::vector<embedding::PostEmbedding>& embeddings,
                        double z, double error_margin) {
  if (embeddings.size() != corpus.size()) {
    throw InvalidArgument("one embedding per post is required");
  }
  SamplingPlan plan;
  plan.z = z;
  plan.error_margin = error_margin;
  plan.population = corpus.size();
  const embedding::PointSet all = embedding::ToPointSet(embeddings);
  plan.sigma2 = embedding::SummarizeCovariance(all).trace;
  plan.infinite_n = CochranInfinite(z, plan.sigma2, error_margin);
  plan.n = CochranFinite(z, plan.sigma2, error_margin, plan.population);

  std::map<std::string, embedding::PointSet> groups;
  for (size_t i = 0; i < corpus.size(); ++i) {
    auto& group = groups[corpus.posts()[i].author];
    group.dim = all.dim;
    group.Append(all.row(i));
  }
  std::vector<StratumInput> inputs;
  for (const auto& [author, points] : groups) {
    Stratum s;
    s.author = author;
    s.size = points.size();
    s.sigma = points.size() >= 2
                  ? std::sqrt(embedding::SummarizeCovariance(points).trace)
                  : 0.0;
    inputs.push_back({s.size, s.sigma});
    plan.strata.push_back(std::move(s));
  }
  NeymanAllocation alloc = NeymanAllocate(plan.n, inputs);
  for (size_t i = 0; i < plan.strata.size(); ++i) {
    plan.strata[i].raw_share = alloc.raw_shares[i];
    plan.strata[i].allocated = alloc.allocations[i];
  }
  plan.allocated = alloc.total;
  return plan;
}

corpus::Corpus DrawSample(const corpus::Corpus& corpus,
                          const std::map<std::string, size_t>& allocations,
                          uint64_t seed) {
  std::map<std::string, std::vector<size_t>> by_author;
  for (size_t i = 0; i < corpus.size(); ++i) {
    by_author[corpus.posts()[i].author].push_back(i);
  }
  std::vector<bool> keep(corpus.size(), false);
  Rng rng(seed);
  for (const auto& [author, want] : allocations) {
    auto it = by_author.find(author);
    if (it == by_author.end()) {
      throw InvalidArgument("allocation names unknown author '" + author + "'");
    }
    std::vector<size_t>& indices = it->second;
    if (want > indices.size()) {
      throw InvalidArgument("allocation of " + std::to_string(want) +
                            " for author '" + author + "' exceeds " +
                            std::to_string(indices.size()) + " posts");
    }
    // Partial Fisher-Yates: the first `want` slots are the sample.
    for (size_t j = 0; j < want; ++j) {
      const size_t pick =
          j + static_cast<size_t>(rng.UniformIndex(indices.size() - j));
      std::swap(indices[j], indices[pick]);
      keep[indices[j]] = true;
    }
  }
  return corpus.Filter([&](size_t i) { return keep[i]; });
}

std::map<std::string, size_t> AllocationMap(const SamplingPlan& plan) {
  std::map<std::string, size_t> out;
  for (const auto& s : plan.strata) out[s.author] = s.allocated;
  return out;
}

}  // namespace synthaudit::sampling
