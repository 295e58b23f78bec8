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

#include "synthaudit/embedding.h"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "synthaudit/errors.h"
#include "synthaudit/parallel.h"
#include "synthaudit/rng.h"

namespace synthaudit::embedding {
namespace {

// Polynomial used by Royston's coefficient approximation.
double Poly(const double* coeffs, int order, double x) {
  double result = coeffs[0];
  if (order > 1) {
    double p = x * coeffs[order - 1];
    for (int j = order - 2; j > 0; --j) p = (p + coeffs[j]) * x;
    result += p;
  }
  return result;
}

double NormalQuantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

size_t NearestCentroid(std::span<const double> point, const PointSet& centroids,
                       double* best_distance) {
  size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (size_t c = 0; c < centroids.size(); ++c) {
    const double d = SquaredDistance(point, centroids.row(c));
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (best_distance) *best_distance = best_d;
  return best;
}

double Inertia(const PointSet& points, const PointSet& centroids,
               const std::vector<size_t>& assignments) {
  double total = 0.0;
  for (size_t i = 0; i < points.size(); ++i) {
    total += SquaredDistance(points.row(i), centroids.row(assignments[i]));
  }
  return total;
}

}  // namespace

void PointSet::Append(std::span<const double> point) {
  if (dim == 0 && values.empty()) dim = point.size();
  if (point.size() != dim) {
    throw InvalidArgument("point dimension " + std::to_string(point.size()) +
                          " does not match " + std::to_string(dim));
  }
  values.insert(values.end(), point.begin(), point.end());
}

void EmbeddingTable::Add(std::string token, std::span<const double> vector) {
  if (vector.empty()) throw DataError("empty vector for token '" + token + "'");
  if (dim_ == 0) dim_ = vector.size();
  if (vector.size() != dim_) {
    throw DataError("dimension mismatch for token '" + token + "': got " +
                    std::to_string(vector.size()) + ", expected " +
                    std::to_string(dim_));
  }
  if (index_.count(token)) {
    throw DataError("repeated token '" + token + "'");
  }
  index_.emplace(token, tokens_.size());
  tokens_.push_back(std::move(token));
  values_.insert(values_.end(), vector.begin(), vector.end());
}

const double* EmbeddingTable::Lookup(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return nullptr;
  return values_.data() + it->second * dim_;
}

EmbeddingTable ReadEmbeddingTable(std::istream& in) {
  EmbeddingTable table;
  std::string line;
  size_t line_no = 0;
  std::vector<double> vec;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token)) continue;
    vec.clear();
    std::string field;
    while (fields >> field) {
      double value = 0.0;
      auto [ptr, ec] =
          std::from_chars(field.data(), field.data() + field.size(), value);
      if (ec != std::errc() || ptr != field.data() + field.size() ||
          !std::isfinite(value)) {
        throw DataError("line " + std::to_string(line_no) +
                        ": non-numeric component '" + field + "'");
      }
      vec.push_back(value);
    }
    try {
      table.Add(token, vec);
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return table;
}

EmbeddingTable LoadEmbeddingTable(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embedding table " + path.string());
  try {
    return ReadEmbeddingTable(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

PostEmbedding EmbedPost(const corpus::TokenizedPost& tokenized,
                        const EmbeddingTable& table) {
  PostEmbedding out;
  out.post_id = tokenized.post_id;
  out.vector.assign(table.dimension(), 0.0);
  if (tokenized.word_tokens.empty()) return out;
  std::vector<const std::string*> tokens;
  tokens.reserve(tokenized.word_tokens.size());
  for (const auto& t : tokenized.word_tokens) tokens.push_back(&t);
  std::sort(tokens.begin(), tokens.end(),
            [](const std::string* a, const std::string* b) { return *a < *b; });
  size_t hits = 0;
  for (const std::string* t : tokens) {
    const double* v = table.Lookup(*t);
    if (!v) continue;
    ++hits;
    for (size_t d = 0; d < out.vector.size(); ++d) out.vector[d] += v[d];
  }
  if (hits > 0) {
    for (double& x : out.vector) x /= static_cast<double>(hits);
  }
  out.oov_fraction = static_cast<double>(tokens.size() - hits) /
                     static_cast<double>(tokens.size());
  return out;
}

std::vector<PostEmbedding> EmbedAll(
    const std::vector<corpus::TokenizedPost>& tokenized,
    const EmbeddingTable& table, int threads) {
  std::vector<PostEmbedding> out(tokenized.size());
  ParallelFor(tokenized.size(), threads,
              [&](size_t i) { out[i] = EmbedPost(tokenized[i], table); });
  return out;
}

PointSet ToPointSet(const std::vector<PostEmbedding>& embeddings) {
  PointSet points;
  if (embeddings.empty()) return points;
  points.dim = embeddings.front().vector.size();
  points.values.reserve(points.dim * embeddings.size());
  for (const auto& e : embeddings) points.Append(e.vector);
  return points;
}

CovarianceSummary SummarizeCovariance(const PointSet& points) {
  const size_t n = points.size();
  if (n < 2) {
    throw InvalidArgument("covariance summary needs at least 2 points, got " +
                          std::to_string(n));
  }
  CovarianceSummary summary;
  summary.variances.assign(points.dim, 0.0);
  std::vector<double> mean(points.dim, 0.0);
  for (size_t i = 0; i < n; ++i) {
    for (size_t d = 0; d < points.dim; ++d) mean[d] += points.row(i)[d];
  }
  for (double& m : mean) m /= static_cast<double>(n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t d = 0; d < points.dim; ++d) {
      const double dev = points.row(i)[d] - mean[d];
      summary.variances[d] += dev * dev;
    }
  }
  for (double& v : summary.variances) {
    v /= static_cast<double>(n - 1);
    summary.trace += v;
  }
  return summary;
}

std::optional<double> ShapiroWilkW(std::vector<double> x) {
  const size_t n = x.size();
  if (n < 3) throw InvalidArgument("Shapiro-Wilk needs at least 3 values");
  if (n > 5000) throw InvalidArgument("Shapiro-Wilk supports n <= 5000");
  std::sort(x.begin(), x.end());
  const double range = x.back() - x.front();
  if (!(range > 1e-19)) return std::nullopt;

  // Half-vector of coefficients a[1..n/2] (1-based as in the algorithm).
  const size_t half = n / 2;
  std::vector<double> a(half + 1, 0.0);
  if (n == 3) {
    a[1] = std::sqrt(0.5);
  } else {
    static constexpr double kC1[] = {0.0,       0.221157, -0.147981,
                                     -2.071190, 4.434685, -2.706056};
    static constexpr double kC2[] = {0.0,       0.042981, -0.293762,
                                     -1.752461, 5.682633, -3.582633};
    const double an = static_cast<double>(n);
    std::vector<double> m(half + 1, 0.0);
    double summ2 = 0.0;
    for (size_t i = 1; i <= half; ++i) {
      m[i] = NormalQuantile((static_cast<double>(i) - 0.375) / (an + 0.25));
      summ2 += m[i] * m[i];
    }
    summ2 *= 2.0;
    const double ssumm2 = std::sqrt(summ2);
    const double rsn = 1.0 / std::sqrt(an);
    const double a1 = Poly(kC1, 6, rsn) - m[1] / ssumm2;
    size_t first_scaled;
    double fac;
    if (n > 5) {
      first_scaled = 3;
      const double a2 = -m[2] / ssumm2 + Poly(kC2, 6, rsn);
      fac = std::sqrt((summ2 - 2.0 * m[1] * m[1] - 2.0 * m[2] * m[2]) /
                      (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
      a[2] = a2;
    } else {
      first_scaled = 2;
      fac = std::sqrt((summ2 - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1));
    }
    a[1] = a1;
    for (size_t i = first_scaled; i <= half; ++i) a[i] = -m[i] / fac;
  }

  // W is the squared correlation between the ordered sample and the
  // antisymmetric coefficient vector (which sums to zero).
  double mean = 0.0;
  for (double v : x) mean += v / range;
  mean /= static_cast<double>(n);
  double numerator = 0.0;
  double ssa = 0.0;
  double ssx = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double xi = x[i] / range;
    double coeff = 0.0;
    if (i < half) {
      coeff = -a[i + 1];
    } else if (n - 1 - i < half) {
      coeff = a[n - i];
    }
    numerator += coeff * xi;
    ssa += coeff * coeff;
    ssx += (xi - mean) * (xi - mean);
  }
  double w = numerator * numerator / (ssa * ssx);
  if (n == 3) w = std::max(w, 0.75);
  return std::min(w, 1.0);
}

NormalityReport CheckNormality(const PointSet& points, size_t max_n,
                               uint64_t seed) {
  const size_t n = points.size();
  if (n < 3) throw InvalidArgument("normality check needs at least 3 points");
  if (max_n < 3 || max_n > 5000) {
    throw InvalidArgument("max_n must lie in [3, 5000]");
  }
  std::vector<size_t> rows(n);
  std::iota(rows.begin(), rows.end(), size_t{0});
  NormalityReport report;
  if (n > max_n) {
    Rng rng(seed);
    rng.Shuffle(rows);
    rows.resize(max_n);
    std::sort(rows.begin(), rows.end());
    report.subsampled = true;
  }
  report.sample_size = rows.size();
  report.w.resize(points.dim);
  std::vector<double> column(rows.size());
  for (size_t d = 0; d < points.dim; ++d) {
    for (size_t r = 0; r < rows.size(); ++r) {
      column[r] = points.row(rows[r])[d];
    }
    report.w[d] = ShapiroWilkW(column);
    if (!report.w[d]) report.degenerate_dims.push_back(d);
  }
  return report;
}

double SquaredDistance(std::span<const double> a, std::span<const double> b) {
  double total = 0.0;
  for (size_t d = 0; d < a.size(); ++d) {
    const double diff = a[d] - b[d];
    total += diff * diff;
  }
  return total;
}

Clustering KMeans(const PointSet& points, size_t k, uint64_t seed,
                  const KMeansOptions& options) {
  const size_t n = points.size();
  if (k == 0) throw InvalidArgument("k-means needs k >= 1");
  if (k > n) {
    throw InvalidArgument("k-means with k=" + std::to_string(k) +
                          " exceeds the number of points (" +
                          std::to_string(n) + ")");
  }
  Rng rng(seed);
  Clustering result;
  result.k = k;
  result.centroids.dim = points.dim;

  // k-means++ seeding.
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  size_t chosen = static_cast<size_t>(rng.UniformIndex(n));
  for (size_t c = 0; c < k; ++c) {
    if (c > 0) {
      double total = 0.0;
      for (double d : nearest) total += d;
      if (total <= 0.0) {
        chosen = static_cast<size_t>(rng.UniformIndex(n));
      } else {
        const double target = rng.UniformDouble() * total;
        double cumulative = 0.0;
        chosen = n - 1;
        for (size_t i = 0; i < n; ++i) {
          cumulative += nearest[i];
          if (cumulative > target) {
            chosen = i;
            break;
          }
        }
      }
    }
    result.centroids.Append(points.row(chosen));
    const auto centre = result.centroids.row(c);
    ParallelFor(n, options.threads, [&](size_t i) {
      nearest[i] = std::min(nearest[i], SquaredDistance(points.row(i), centre));
    });
  }

  auto assign = [&](std::vector<size_t>& out) {
    ParallelFor(n, options.threads, [&](size_t i) {
      out[i] = NearestCentroid(points.row(i), result.centroids, nullptr);
    });
  };

  result.assignments.assign(n, 0);
  assign(result.assignments);
  std::vector<size_t> next(n);
  std::vector<size_t> counts(k);
  for (size_t iter = 1; iter <= options.max_iter; ++iter) {
    result.iterations = iter;
    result.inertia_trace.push_back(
        Inertia(points, result.centroids, result.assignments));

    std::fill(result.centroids.values.begin(), result.centroids.values.end(),
              0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (size_t i = 0; i < n; ++i) {
      const size_t c = result.assignments[i];
      ++counts[c];
      auto centre = result.centroids.row(c);
      const auto p = points.row(i);
      for (size_t d = 0; d < points.dim; ++d) centre[d] += p[d];
    }
    std::vector<size_t> empty;
    for (size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        empty.push_back(c);
        continue;
      }
      for (double& v : result.centroids.row(c)) {
        v /= static_cast<double>(counts[c]);
      }
    }
    if (!empty.empty()) {
      std::vector<std::pair<double, size_t>> far;
      far.reserve(n);
      for (size_t i = 0; i < n; ++i) {
        const size_t c = result.assignments[i];
        far.emplace_back(
            SquaredDistance(points.row(i), result.centroids.row(c)), i);
      }
      std::stable_sort(
          far.begin(), far.end(),
          [](const auto& a, const auto& b) { return a.first > b.first; });
      for (size_t e = 0; e < empty.size(); ++e) {
        const auto src = points.row(far[e].second);
        std::copy(src.begin(), src.end(),
                  result.centroids.row(empty[e]).begin());
      }
    }
    result.inertia_trace.push_back(
        Inertia(points, result.centroids, result.assignments));

    assign(next);
    const bool stable = next == result.assignments;
    result.assignments.swap(next);
    if (stable) break;
  }
  result.inertia = Inertia(points, result.centroids, result.assignments);
  result.inertia_trace.push_back(result.inertia);
  return result;
}

void SymmetricEigen(std::vector<double> a, size_t n,
                    std::vector<double>& eigenvalues,
                    std::vector<double>& eigenvectors) {
  std::vector<double> v(n * n, 0.0);
  for (size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  auto at = [&](size_t r, size_t c) -> double& { return a[r * n + c]; };
  double scale = 0.0;
  for (double x : a) scale += x * x;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (size_t p = 0; p < n; ++p) {
      for (size_t q = p + 1; q < n; ++q) off += at(p, q) * at(p, q);
    }
    if (off <= 1e-30 * scale || off == 0.0) break;
    for (size_t p = 0; p < n; ++p) {
      for (size_t q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (size_t k = 0; k < n; ++k) {
          const double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (size_t k = 0; k < n; ++k) {
          const double apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
        at(p, q) = at(q, p) = 0.0;
        for (size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p], vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t i, size_t j) {
    return a[i * n + i] > a[j * n + j];
  });
  eigenvalues.resize(n);
  eigenvectors.assign(n * n, 0.0);
  for (size_t r = 0; r < n; ++r) {
    const size_t src = order[r];
    eigenvalues[r] = a[src * n + src];
    size_t largest = 0;
    for (size_t k = 0; k < n; ++k) {
      if (std::abs(v[k * n + src]) > std::abs(v[largest * n + src])) {
        largest = k;
      }
    }
    const double sign = v[largest * n + src] < 0 ? -1.0 : 1.0;
    for (size_t k = 0; k < n; ++k) {
      eigenvectors[r * n + k] = sign * v[k * n + src];
    }
  }
}

Projection PcaProject(const PointSet& points, size_t out_dim) {
  const size_t n = points.size();
  const size_t dim = points.dim;
  if (out_dim == 0) throw InvalidArgument("PCA output dimension must be > 0");
  if (n < std::max<size_t>(2, out_dim) || dim < out_dim) {
    throw InvalidArgument("PCA needs at least out_dim points and dimensions");
  }
  std::vector<double> mean(dim, 0.0);
  for (size_t i = 0; i < n; ++i) {
    for (size_t d = 0; d < dim; ++d) mean[d] += points.row(i)[d];
  }
  for (double& m : mean) m /= static_cast<double>(n);
  std::vector<double> cov(dim * dim, 0.0);
  for (size_t i = 0; i < n; ++i) {
    const auto p = points.row(i);
    for (size_t r = 0; r < dim; ++r) {
      const double dr = p[r] - mean[r];
      for (size_t c = r; c < dim; ++c)
        cov[r * dim + c] += dr * (p[c] - mean[c]);
    }
  }
  double trace = 0.0;
  for (size_t r = 0; r < dim; ++r) {
    for (size_t c = r; c < dim; ++c) {
      cov[r * dim + c] /= static_cast<double>(n - 1);
      cov[c * dim + r] = cov[r * dim + c];
    }
    trace += cov[r * dim + r];
  }
  Projection proj;
  proj.coordinates = PointSet(out_dim, std::vector<double>(n * out_dim, 0.0));
  if (!(trace > 0.0)) {
    proj.degenerate = true;
    proj.eigenvalues.assign(out_dim, 0.0);
    proj.components.assign(out_dim * dim, 0.0);
    return proj;
  }
  std::vector<double> values, vectors;
  SymmetricEigen(std::move(cov), dim, values, vectors);
  proj.eigenvalues.assign(values.begin(), values.begin() + out_dim);
  proj.components.assign(vectors.begin(), vectors.begin() + out_dim * dim);
  for (size_t i = 0; i < n; ++i) {
    const auto p = points.row(i);
    auto out = proj.coordinates.row(i);
    for (size_t c = 0; c < out_dim; ++c) {
      double s = 0.0;
      for (size_t d = 0; d < dim; ++d) {
        s += (p[d] - mean[d]) * proj.components[c * dim + d];
      }
      out[c] = s;
    }
  }
  return proj;
}

void WriteProjectionCsv(std::ostream& out,
                        const std::vector<std::string>& post_ids,
                        const Projection& projection,
                        const std::vector<size_t>* clusters) {
  if (post_ids.size() != projection.coordinates.size()) {
    throw InvalidArgument("post id count does not match projection rows");
  }
  out << "post_id,x,y,cluster\n";
  char buf[64];
  for (size_t i = 0; i < post_ids.size(); ++i) {
    const auto row = projection.coordinates.row(i);
    out << post_ids[i];
    for (size_t c = 0; c < 2; ++c) {
      const double v = c < row.size() ? row[c] : 0.0;
      std::snprintf(buf, sizeof(buf), ",%.10g", v);
      out << buf;
    }
    out << ',';
    if (clusters) out << (*clusters)[i];
    out << '\n';
  }
}

}  // namespace synthaudit::embedding
