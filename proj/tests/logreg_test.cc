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

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "synthaudit/errors.h"
#include "synthaudit/rng.h"

namespace synthaudit::attack {
namespace {

using features::FeatureMatrix;

FeatureMatrix Matrix(size_t cols, std::vector<double> values) {
  const size_t rows = values.size() / cols;
  std::vector<std::string> names, ids;
  for (size_t j = 0; j < cols; ++j) names.push_back("f" + std::to_string(j));
  for (size_t i = 0; i < rows; ++i) ids.push_back("p" + std::to_string(i));
  return FeatureMatrix(names, ids, std::move(values));
}

// Two Gaussian blobs around (-2, -2) and (2, 2).
void Blobs(size_t per_side, uint64_t seed, std::vector<double>& x,
           std::vector<size_t>& y) {
  Rng rng(seed);
  for (size_t i = 0; i < 2 * per_side; ++i) {
    const size_t label = i % 2;
    const double c = label == 0 ? -2.0 : 2.0;
    x.push_back(c + 0.5 * rng.Normal());
    x.push_back(c + 0.5 * rng.Normal());
    y.push_back(label);
  }
}

TEST(LogRegObjectiveTest, GradientMatchesCentralDifferences) {
  Rng rng(99);
  const size_t n = 5, d = 4, k = 3;
  std::vector<double> x(n * d), w(k * d), b(k);
  for (double& v : x) v = rng.Normal();
  for (double& v : w) v = 0.5 * rng.Normal();
  for (double& v : b) v = 0.5 * rng.Normal();
  const std::vector<size_t> y = {0, 2, 1, 2, 0};
  const double lambda = 0.7;
  const auto obj = EvaluateObjective(x, d, y, k, w, b, lambda);

  const double h = 1e-5;
  double worst = 0.0;
  auto check = [&](double analytic, double plus, double minus) {
    const double numeric = (plus - minus) / (2 * h);
    const double scale =
        std::max({std::abs(analytic), std::abs(numeric), 1e-3});
    worst = std::max(worst, std::abs(analytic - numeric) / scale);
  };
  for (size_t i = 0; i < w.size(); ++i) {
    auto wp = w, wm = w;
    wp[i] += h;
    wm[i] -= h;
    check(obj.grad_weights[i],
          EvaluateObjective(x, d, y, k, wp, b, lambda).loss,
          EvaluateObjective(x, d, y, k, wm, b, lambda).loss);
  }
  for (size_t i = 0; i < b.size(); ++i) {
    auto bp = b, bm = b;
    bp[i] += h;
    bm[i] -= h;
    check(obj.grad_bias[i], EvaluateObjective(x, d, y, k, w, bp, lambda).loss,
          EvaluateObjective(x, d, y, k, w, bm, lambda).loss);
  }
  EXPECT_LT(worst, 1e-5);
}

TEST(LogRegObjectiveTest, ZeroWeightsGiveLogOfLabelCount) {
  const std::vector<double> x = {1, 2, 3, 4};
  const std::vector<size_t> y = {0, 1};
  const std::vector<double> w(6, 0.0), b(3, 0.0);
  const auto obj = EvaluateObjective(x, 2, y, 3, w, b, 5.0);
  EXPECT_NEAR(obj.loss, std::log(3.0), 1e-12);
}

TEST(LogRegTest, SeparableClustersFitPerfectly) {
  std::vector<double> x;
  std::vector<size_t> y;
  Blobs(40, 5, x, y);
  const auto m = Matrix(2, x);
  LogRegOptions o;
  o.lambda = 0.01;
  o.seed = 3;
  const auto model = TrainLogReg(m, y, {"neg", "pos"}, o);
  const auto probs = PredictProbabilities(model, m);
  for (size_t i = 0; i < y.size(); ++i) {
    const size_t argmax = probs[2 * i + 1] > probs[2 * i] ? 1 : 0;
    EXPECT_EQ(argmax, y[i]) << "row " << i;
  }
  // Fresh points near each centre follow the cluster membership.
  const auto probe = Matrix(2, {-2.1, -1.7, 1.9, 2.4});
  const auto p = PredictProbabilities(model, probe);
  EXPECT_GT(p[0], 0.9);
  EXPECT_GT(p[3], 0.9);
}

TEST(LogRegTest, HugeLambdaCollapsesToLabelPriors) {
  std::vector<double> x;
  std::vector<size_t> y;
  Rng rng(8);
  for (int i = 0; i < 80; ++i) {
    x.push_back(rng.Normal());
    x.push_back(rng.Normal());
    y.push_back(i % 4 == 0 ? 1 : 0);
  }
  LogRegOptions o;
  o.lambda = 1e6;
  o.epochs = 400;
  o.batch_size = 0;
  o.learning_rate = 1.0;
  const auto model = TrainLogReg(Matrix(2, x), y, {"a", "b"}, o);
  for (double w : model.weights) EXPECT_LT(std::abs(w), 1e-3);
  const auto p = PredictProbabilities(model, Matrix(2, {5.0, -5.0}));
  EXPECT_NEAR(p[0], 0.75, 0.01);
  EXPECT_NEAR(p[1], 0.25, 0.01);
}

TEST(LogRegTest, ZeroEpochModelIsUniform) {
  LogRegOptions o;
  o.epochs = 0;
  const auto model = TrainLogReg(
      Matrix(1, {1, 2, 3}), std::vector<size_t>{0, 1, 2}, {"a", "b", "c"}, o);
  for (double p : PredictProbabilities(model, Matrix(1, {7.0}))) {
    EXPECT_NEAR(p, 1.0 / 3.0, 1e-15);
  }
}

TEST(LogRegTest, LossHistoryNeverIncreases) {
  std::vector<double> x;
  std::vector<size_t> y;
  Blobs(30, 12, x, y);
  for (size_t batch : {size_t{0}, size_t{7}}) {
    LogRegOptions o;
    o.batch_size = batch;
    o.learning_rate = 2.0;  // large enough to trigger step rejection
    o.epochs = 60;
    const auto model = TrainLogReg(Matrix(2, x), y, {"a", "b"}, o);
    ASSERT_EQ(model.loss_history.size(), 60u);
    for (size_t e = 1; e < model.loss_history.size(); ++e) {
      EXPECT_LE(model.loss_history[e], model.loss_history[e - 1] + 1e-6);
    }
  }
}

TEST(LogRegTest, ProbabilitiesSumToOne) {
  Rng rng(2);
  std::vector<double> x;
  std::vector<size_t> y;
  for (int i = 0; i < 60; ++i) {
    for (int j = 0; j < 3; ++j) x.push_back(rng.Normal() * 10);
    y.push_back(rng.UniformIndex(4));
  }
  y[0] = 0;
  y[1] = 1;
  const auto model = TrainLogReg(Matrix(3, x), y, {"a", "b", "c", "d"}, {});
  std::vector<double> probe;
  for (int i = 0; i < 300; ++i) probe.push_back(rng.Normal() * 100);
  const auto p = PredictProbabilities(model, Matrix(3, probe));
  for (size_t i = 0; i < 100; ++i) {
    double s = 0;
    for (size_t l = 0; l < 4; ++l) {
      EXPECT_GE(p[i * 4 + l], 0.0);
      s += p[i * 4 + l];
    }
    EXPECT_NEAR(s, 1.0, 1e-6);
  }
}

TEST(LogRegTest, DeterministicForFixedSeed) {
  std::vector<double> x;
  std::vector<size_t> y;
  Blobs(25, 4, x, y);
  LogRegOptions o;
  o.seed = 17;
  o.batch_size = 8;
  const auto a = TrainLogReg(Matrix(2, x), y, {"a", "b"}, o);
  const auto b = TrainLogReg(Matrix(2, x), y, {"a", "b"}, o);
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(a.bias, b.bias);
  EXPECT_EQ(a.loss_history, b.loss_history);
}

TEST(LogRegTest, ConstantColumnDoesNotBreakStandardization) {
  const auto m = Matrix(2, {1, 5, 2, 5, 8, 5, 9, 5});
  const auto model =
      TrainLogReg(m, std::vector<size_t>{0, 0, 1, 1}, {"a", "b"}, {});
  EXPECT_EQ(model.scale[1], 1.0);
  for (double w : model.weights) EXPECT_TRUE(std::isfinite(w));
}

TEST(LogRegTest, RejectsBadInput) {
  EXPECT_THROW(
      TrainLogReg(Matrix(1, {1, 2}), std::vector<size_t>{0, 0}, {"a", "b"}, {}),
      InvalidArgument);
  EXPECT_THROW(
      TrainLogReg(Matrix(1, {1, 2}), std::vector<size_t>{0}, {"a", "b"}, {}),
      InvalidArgument);
  const auto model =
      TrainLogReg(Matrix(1, {1, 2}), std::vector<size_t>{0, 1}, {"a", "b"}, {});
  EXPECT_THROW(PredictProbabilities(model, Matrix(2, {1, 2})), InvalidArgument);
}

}  // namespace
}  // namespace synthaudit::attack
