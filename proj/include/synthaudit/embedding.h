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

#ifndef SYNTHAUDIT_EMBEDDING_H_
#define SYNTHAUDIT_EMBEDDING_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "synthaudit/corpus.h"

namespace synthaudit::embedding {

// Row-major n x dim matrix of doubles.
struct PointSet {
  size_t dim = 0;
  std::vector<double> values;

  PointSet() = default;
  PointSet(size_t dimension, std::vector<double> flat)
      : dim(dimension), values(std::move(flat)) {}

  size_t size() const { return dim == 0 ? 0 : values.size() / dim; }
  std::span<const double> row(size_t i) const {
    return {values.data() + i * dim, dim};
  }
  std::span<double> row(size_t i) { return {values.data() + i * dim, dim}; }
  void Append(std::span<const double> point);
};

// Word-vector table in GloVe text format: token followed by dim reals.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;

  size_t dimension() const { return dim_; }
  size_t size() const { return tokens_.size(); }

  // Throws DataError on dimension mismatch or repeated token.
  void Add(std::string token, std::span<const double> vector);
  // Null when the token has no entry.
  const double* Lookup(std::string_view token) const;

 private:
  size_t dim_ = 0;
  std::vector<std::string> tokens_;
  std::vector<double> values_;
  std::unordered_map<std::string, size_t> index_;
};

EmbeddingTable ReadEmbeddingTable(std::istream& in);
EmbeddingTable LoadEmbeddingTable(const std::filesystem::path& path);

struct PostEmbedding {
  std::string post_id;
  std::vector<double> vector;
  double oov_fraction = 0.0;
};

// Mean of the table vectors of in-vocabulary word tokens. Out-of-vocabulary
// tokens are skipped; with no hits the vector is zero. Summation runs in
// sorted token order so the result is independent of token order.
PostEmbedding EmbedPost(const corpus::TokenizedPost& tokenized,
                        const EmbeddingTable& table);

std::vector<PostEmbedding> EmbedAll(
    const std::vector<corpus::TokenizedPost>& tokenized,
    const EmbeddingTable& table, int threads = 1);

PointSet ToPointSet(const std::vector<PostEmbedding>& embeddings);

struct CovarianceSummary {
  double trace = 0.0;
  std::vector<double> variances;  // per dimension, n-1 denominator
};

// Throws InvalidArgument with fewer than two points.
CovarianceSummary SummarizeCovariance(const PointSet& points);

// Shapiro-Wilk W for one sample (Royston's approximation, 3 <= n <= 5000).
// Returns nullopt for a zero-range sample. Throws InvalidArgument for n < 3 or
// n > 5000.
std::optional<double> ShapiroWilkW(std::vector<double> sample);

struct NormalityReport {
  // Per dimension; nullopt marks a degenerate (constant) dimension.
  std::vector<std::optional<double>> w;
  std::vector<size_t> degenerate_dims;
  size_t sample_size = 0;
  bool subsampled = false;
};

// W per dimension. When there are more than max_n points, a seeded subsample
// of max_n rows is tested (the same rows for every dimension).
NormalityReport CheckNormality(const PointSet& points, size_t max_n = 5000,
                               uint64_t seed = 0);

struct Clustering {
  size_t k = 0;
  PointSet centroids;
  std::vector<size_t> assignments;
  double inertia = 0.0;
  size_t iterations = 0;
  // Inertia after every assignment and every centroid update.
  std::vector<double> inertia_trace;
};

struct KMeansOptions {
  size_t max_iter = 300;
  int threads = 1;
};

// k-means++ seeding then Lloyd iterations under squared Euclidean distance.
// Ties in assignment go to the lowest centroid index. An empty cluster is
// reseeded at the point farthest from its current centroid. Deterministic for
// fixed (point order, k, seed).
Clustering KMeans(const PointSet& points, size_t k, uint64_t seed,
                  const KMeansOptions& options = {});

double SquaredDistance(std::span<const double> a, std::span<const double> b);

struct Projection {
  PointSet coordinates;             // n x out_dim
  std::vector<double> eigenvalues;  // top out_dim, descending
  std::vector<double> components;   // out_dim x dim, row-major
  bool degenerate = false;
};

// Symmetric eigendecomposition by cyclic Jacobi. Returns eigenvalues in
// descending order and eigenvectors as rows (row-major dim x dim).
void SymmetricEigen(std::vector<double> matrix, size_t dim,
                    std::vector<double>& eigenvalues,
                    std::vector<double>& eigenvectors);

// Projects centered points onto the top out_dim principal axes of the sample
// covariance. Each axis is signed so its largest-magnitude entry is positive.
Projection PcaProject(const PointSet& points, size_t out_dim = 2);

// CSV with header post_id,x,y,cluster. Cluster may be empty.
void WriteProjectionCsv(std::ostream& out,
                        const std::vector<std::string>& post_ids,
                        const Projection& projection,
                        const std::vector<size_t>* clusters);

}  // namespace synthaudit::embedding

#endif  // SYNTHAUDIT_EMBEDDING_H_
