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

#ifndef SYNTHAUDIT_LOGREG_H_
#define SYNTHAUDIT_LOGREG_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "synthaudit/features.h"

namespace synthaudit::attack {

struct LogRegOptions {
  double lambda = 1.0;
  int epochs = 200;
  double learning_rate = 0.1;
  // 0 trains full-batch.
  size_t batch_size = 32;
  uint64_t seed = 0;
  // z-score columns with training statistics. Turn off for rows that are
  // already L2-normalized (TF-IDF).
  bool standardize = true;
};

// Multinomial softmax regression. Weights are labels x features, row-major.
struct LogRegModel {
  std::vector<std::string> labels;
  size_t num_features = 0;
  std::vector<double> weights;
  std::vector<double> bias;
  std::vector<double> mean;   // per feature; 0 when not standardized
  std::vector<double> scale;  // per feature; 1 when not standardized
  LogRegOptions options;
  // Regularized full-data loss after each epoch (non-increasing).
  std::vector<double> loss_history;
};

// Regularized objective on already-standardized rows:
//   (1/N) sum_i -log softmax(W x_i + b)[y_i] + (lambda / 2N) ||W||^2
// which has the minimizer of summed cross-entropy + (lambda/2) ||W||^2.
struct Objective {
  double loss = 0.0;
  std::vector<double> grad_weights;
  std::vector<double> grad_bias;
};

Objective EvaluateObjective(std::span<const double> x, size_t num_features,
                            std::span<const size_t> y, size_t num_labels,
                            std::span<const double> weights,
                            std::span<const double> bias, double lambda);

// y holds indices into `labels`. Requires at least two distinct labels among
// y and finite features.
LogRegModel TrainLogReg(const features::FeatureMatrix& x,
                        std::span<const size_t> y,
                        std::vector<std::string> labels,
                        const LogRegOptions& options = {});

// Softmax probabilities (rows x labels, row-major) in model label order.
std::vector<double> PredictProbabilities(const LogRegModel& model,
                                         const features::FeatureMatrix& x);

nlohmann::ordered_json ToJson(const LogRegModel& model);

}  // namespace synthaudit::attack

#endif  // SYNTHAUDIT_LOGREG_H_
