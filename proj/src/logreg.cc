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

#include "synthaudit/logreg.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "synthaudit/errors.h"
#include "synthaudit/rng.h"

namespace synthaudit::attack {
namespace {

// Rows stored as (column, value) pairs of their nonzero entries.
struct SparseRows {
  std::vector<size_t> offsets;
  std::vector<size_t> cols;
  std::vector<double> vals;
};

SparseRows ToSparse(std::span<const double> x, size_t n, size_t d) {
  SparseRows rows;
  rows.offsets.reserve(n + 1);
  rows.offsets.push_back(0);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < d; ++j) {
      const double v = x[i * d + j];
      if (v == 0.0) continue;
      rows.cols.push_back(j);
      rows.vals.push_back(v);
    }
    rows.offsets.push_back(rows.cols.size());
  }
  return rows;
}

// Softmax regression in standardized coordinates z = (x - mean) / scale,
// evaluated on raw sparse rows. Weights are features x labels here so the
// per-feature label loop is contiguous.
class Trainer {
 public:
  Trainer(const SparseRows& x, std::span<const size_t> y, size_t d,
          size_t num_labels, std::span<const double> mean,
          std::span<const double> scale)
      : x_(x),
        y_(y),
        d_(d),
        k_(num_labels),
        mean_(mean),
        scale_(scale),
        u_(d * num_labels),
        offset_(num_labels),
        probs_(num_labels) {}

  // Folds the standardization into effective raw-space weights.
  void Prepare(std::span<const double> wt, std::span<const double> b) {
    std::copy(b.begin(), b.end(), offset_.begin());
    for (size_t j = 0; j < d_; ++j) {
      const double inv = 1.0 / scale_[j];
      for (size_t l = 0; l < k_; ++l) {
        const double u = wt[j * k_ + l] * inv;
        u_[j * k_ + l] = u;
        offset_[l] -= u * mean_[j];
      }
    }
  }

  // Softmax of row i under the prepared weights; returns log-sum-exp.
  double Forward(size_t i, double* probs) const {
    std::copy(offset_.begin(), offset_.end(), probs);
    for (size_t e = x_.offsets[i]; e < x_.offsets[i + 1]; ++e) {
      const double v = x_.vals[e];
      const double* u = u_.data() + x_.cols[e] * k_;
      for (size_t l = 0; l < k_; ++l) probs[l] += u[l] * v;
    }
    const double max_logit = *std::max_element(probs, probs + k_);
    double sum = 0.0;
    for (size_t l = 0; l < k_; ++l) {
      probs[l] = std::exp(probs[l] - max_logit);
      sum += probs[l];
    }
    for (size_t l = 0; l < k_; ++l) probs[l] /= sum;
    return max_logit + std::log(sum);
  }

  // Mean cross-entropy over rows; with gradients when grad_wt is non-null
  // (features x labels layout, overwritten).
  double CrossEntropy(std::span<const size_t> rows, double* grad_wt,
                      double* grad_b) {
    double total = 0.0;
    if (grad_wt != nullptr) {
      std::fill(grad_wt, grad_wt + d_ * k_, 0.0);
      std::fill(grad_b, grad_b + k_, 0.0);
    }
    for (size_t i : rows) {
      Forward(i, probs_.data());
      total -=
          std::log(std::max(probs_[y_[i]], std::numeric_limits<double>::min()));
      if (grad_wt == nullptr) continue;
      probs_[y_[i]] -= 1.0;
      for (size_t l = 0; l < k_; ++l) grad_b[l] += probs_[l];
      for (size_t e = x_.offsets[i]; e < x_.offsets[i + 1]; ++e) {
        const double v = x_.vals[e];
        double* g = grad_wt + x_.cols[e] * k_;
        for (size_t l = 0; l < k_; ++l) g[l] += probs_[l] * v;
      }
    }
    const double inv_n = 1.0 / static_cast<double>(rows.size());
    if (grad_wt != nullptr) {
      // d/dz = (sum r x - mean * sum r) / scale, averaged over rows.
      for (size_t j = 0; j < d_; ++j) {
        const double inv = inv_n / scale_[j];
        for (size_t l = 0; l < k_; ++l) {
          double& g = grad_wt[j * k_ + l];
          g = (g - mean_[j] * grad_b[l]) * inv;
        }
      }
      for (size_t l = 0; l < k_; ++l) grad_b[l] *= inv_n;
    }
    return total * inv_n;
  }

 private:
  const SparseRows& x_;
  std::span<const size_t> y_;
  size_t d_;
  size_t k_;
  std::span<const double> mean_;
  std::span<const double> scale_;
  std::vector<double> u_;
  std::vector<double> offset_;
  std::vector<double> probs_;
};

double SquaredNorm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

std::vector<double> Transpose(std::span<const double> m, size_t rows,
                              size_t cols) {
  std::vector<double> out(m.size());
  for (size_t r = 0; r < rows; ++r) {
    for (size_t c = 0; c < cols; ++c) out[c * rows + r] = m[r * cols + c];
  }
  return out;
}

void CheckFinite(const features::FeatureMatrix& x) {
  for (double v : x.values()) {
    if (!std::isfinite(v)) throw DataError("NaN or infinite feature value");
  }
}

}  // namespace

Objective EvaluateObjective(std::span<const double> x, size_t num_features,
                            std::span<const size_t> y, size_t num_labels,
                            std::span<const double> weights,
                            std::span<const double> bias, double lambda) {
  const size_t n = y.size();
  const size_t d = num_features;
  if (n == 0 || x.size() != n * d || weights.size() != num_labels * d ||
      bias.size() != num_labels) {
    throw InvalidArgument("objective shapes do not agree");
  }
  const SparseRows rows = ToSparse(x, n, d);
  const std::vector<double> mean(d, 0.0), scale(d, 1.0);
  Trainer trainer(rows, y, d, num_labels, mean, scale);
  trainer.Prepare(Transpose(weights, num_labels, d), bias);
  std::vector<size_t> all(n);
  std::iota(all.begin(), all.end(), size_t{0});
  std::vector<double> grad_wt(d * num_labels);
  Objective obj;
  obj.grad_bias.assign(num_labels, 0.0);
  obj.loss = trainer.CrossEntropy(all, grad_wt.data(), obj.grad_bias.data());
  const double reg = lambda / static_cast<double>(n);
  obj.loss += 0.5 * reg * SquaredNorm(weights);
  obj.grad_weights = Transpose(grad_wt, d, num_labels);
  for (size_t k = 0; k < weights.size(); ++k) {
    obj.grad_weights[k] += reg * weights[k];
  }
  return obj;
}

LogRegModel TrainLogReg(const features::FeatureMatrix& x,
                        std::span<const size_t> y,
                        std::vector<std::string> labels,
                        const LogRegOptions& options) {
  const size_t n = x.rows();
  const size_t d = x.cols();
  const size_t num_labels = labels.size();
  if (y.size() != n) {
    throw InvalidArgument("label count " + std::to_string(y.size()) +
                          " does not match " + std::to_string(n) + " rows");
  }
  if (options.lambda < 0 || options.learning_rate <= 0 || options.epochs < 0) {
    throw InvalidArgument("invalid logistic-regression hyperparameters");
  }
  std::set<size_t> present;
  for (size_t label : y) {
    if (label >= num_labels) throw InvalidArgument("label index out of range");
    present.insert(label);
  }
  if (present.size() < 2) {
    throw InvalidArgument("training needs at least two distinct labels");
  }
  CheckFinite(x);

  LogRegModel model;
  model.labels = std::move(labels);
  model.num_features = d;
  model.options = options;
  model.mean.assign(d, 0.0);
  model.scale.assign(d, 1.0);
  if (options.standardize) {
    for (size_t j = 0; j < d; ++j) {
      double sum = 0.0;
      for (size_t i = 0; i < n; ++i) sum += x.values()[i * d + j];
      const double mean = sum / static_cast<double>(n);
      double ss = 0.0;
      for (size_t i = 0; i < n; ++i) {
        const double dev = x.values()[i * d + j] - mean;
        ss += dev * dev;
      }
      const double sd = std::sqrt(ss / static_cast<double>(n));
      model.mean[j] = mean;
      model.scale[j] = sd > 1e-12 ? sd : 1.0;
    }
  }
  const SparseRows rows = ToSparse(x.values(), n, d);
  Trainer trainer(rows, y, d, num_labels, model.mean, model.scale);

  std::vector<double> wt(d * num_labels, 0.0);
  std::vector<double> bias(num_labels, 0.0);
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  const size_t batch =
      options.batch_size == 0 ? n : std::min(options.batch_size, n);
  const double reg = options.lambda / static_cast<double>(n);
  auto full_loss = [&] {
    trainer.Prepare(wt, bias);
    return trainer.CrossEntropy(order, nullptr, nullptr) +
           0.5 * reg * SquaredNorm(wt);
  };

  Rng rng(options.seed);
  double lr = options.learning_rate;
  double previous = full_loss();
  std::vector<double> grad_wt(wt.size());
  std::vector<double> grad_b(num_labels);
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    const auto saved_w = wt;
    const auto saved_b = bias;
    if (batch < n) rng.Shuffle(order);
    for (size_t start = 0; start < n; start += batch) {
      const std::span<const size_t> batch_rows(order.data() + start,
                                               std::min(batch, n - start));
      trainer.Prepare(wt, bias);
      trainer.CrossEntropy(batch_rows, grad_wt.data(), grad_b.data());
      // Proximal step on the L2 term keeps large lambda stable.
      const double shrink = 1.0 / (1.0 + lr * reg);
      for (size_t k = 0; k < wt.size(); ++k) {
        wt[k] = (wt[k] - lr * grad_wt[k]) * shrink;
      }
      for (size_t l = 0; l < num_labels; ++l) bias[l] -= lr * grad_b[l];
    }
    const double loss = full_loss();
    if (!std::isfinite(loss) || loss > previous) {
      wt = saved_w;
      bias = saved_b;
      lr *= 0.5;
    } else {
      previous = loss;
    }
    model.loss_history.push_back(previous);
  }
  model.weights = Transpose(wt, d, num_labels);
  model.bias = std::move(bias);
  return model;
}

std::vector<double> PredictProbabilities(const LogRegModel& model,
                                         const features::FeatureMatrix& x) {
  if (x.cols() != model.num_features) {
    throw InvalidArgument("feature width " + std::to_string(x.cols()) +
                          " does not match model width " +
                          std::to_string(model.num_features));
  }
  CheckFinite(x);
  const size_t num_labels = model.labels.size();
  const size_t d = model.num_features;
  const SparseRows rows = ToSparse(x.values(), x.rows(), d);
  const std::vector<size_t> no_labels(x.rows(), 0);
  Trainer trainer(rows, no_labels, d, num_labels, model.mean, model.scale);
  trainer.Prepare(Transpose(model.weights, num_labels, d), model.bias);
  std::vector<double> out(x.rows() * num_labels);
  for (size_t i = 0; i < x.rows(); ++i) {
    trainer.Forward(i, out.data() + i * num_labels);
  }
  return out;
}

nlohmann::ordered_json ToJson(const LogRegModel& model) {
  nlohmann::ordered_json j;
  j["labels"] = model.labels;
  j["num_features"] = model.num_features;
  j["lambda"] = model.options.lambda;
  j["epochs"] = model.options.epochs;
  j["learning_rate"] = model.options.learning_rate;
  j["batch_size"] = model.options.batch_size;
  j["seed"] = model.options.seed;
  j["standardize"] = model.options.standardize;
  j["weights"] = model.weights;
  j["bias"] = model.bias;
  j["mean"] = model.mean;
  j["scale"] = model.scale;
  j["loss_history"] = model.loss_history;
  return j;
}

}  // namespace synthaudit::attack
