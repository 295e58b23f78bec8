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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "synthaudit/errors.h"
#include "synthaudit/rng.h"

namespace synthaudit::embedding {
namespace {

using ::testing::HasSubstr;

// Seeded draws (numpy default_rng(2024)); W values from scipy.stats.shapiro.
constexpr double kNormalDim0[] = {
    1.0288568739519013,    -0.9731795154745656,   0.8613509179404263,
    0.7508434731539183,    -1.1077170351272676,   0.8115201169815576,
    -1.2910916333479945,   -1.4805813250203528,   -0.6684703049155165,
    0.4181385697197018,    0.05681919548353432,   1.6576840551979304,
    -0.4026124264424147,   -0.43950590401335643,  -2.0981967905109227,
    0.7782729899588319,    -1.1266151030496365,   -0.26179037875573763,
    1.2654519785916296,    -0.053675571091266104, -0.6100179289879054,
    -0.6716047883569987,   -0.8006419813196771,   0.13974968489353012,
    1.9735553403293085,    0.6630316327280554,    -0.6101975720154739,
    0.7906767161489346,    0.14500945046766703,   -0.4783561223374009,
    0.36087808534664895,   0.4318338284071015,    0.4230625681693494,
    -0.058919583651991944, -2.5014067590171156,   -0.5194129145674927,
    -0.02227481933113591,  -1.601700699707578,    -0.12761874184623326,
    -0.19800979344399408,  0.4050683838900256,    -0.8147067236288767,
    -0.7984248684613153,   0.8938070413179886,    0.11425397649853589,
    -0.147432308720016,    0.2516400225857998,    1.8842597000918537,
    -0.22605077018427153,  -0.5727287964783889};
constexpr double kNormalDim1[] = {
    1.6419200406711503,   -1.3928000963768683,   0.509186798845688,
    0.6397595539314624,   1.4844055856837017,    -1.3764228399745688,
    -0.7756786842437912,  -0.5340928297145819,   -0.25228975964635664,
    -0.43125454836060817, 0.42456925614196805,   -0.6636760694670103,
    -0.9579261729918135,  -0.3876358717280692,   0.6343009414440183,
    1.8481672953210666,   0.3941991740101531,    0.01746449083513856,
    0.7099782281560677,   0.6029173174380699,    -0.7653887202041866,
    -0.4511113866062102,  0.886902071116937,     -0.8274018550207518,
    0.09906791154843822,  1.0556415438104036,    -0.059613974391862584,
    0.1896104030769387,   1.2283676805724408,    0.885130796232711,
    -0.7289883307524213,  -1.3274366057127434,   2.248808075105902,
    -0.8452112239256144,  -0.049529303003866015, 2.320353380766215,
    0.06897907838830987,  -0.466622617797556,    0.19591943562431058,
    0.18594293087633743,  0.025225214035725262,  0.34557343099545634,
    0.11335636333069822,  0.5118538884830525,    -2.8588525107765945,
    -2.3872431436868378,  1.0349501503519076,    1.5279587817401392,
    -0.15617951992955995, 0.6103954244204383};
constexpr double kNormalDim2[] = {
    1.1467195295966137,   0.06719635507109722,  1.8102855742952833,
    -0.7313225212292476,  0.048912403069534136, -0.43637073584081926,
    0.9030630777436289,   0.16378857220098098,  -0.22186154087661292,
    0.27226068000682285,  0.224943388070294,    1.1991871656162354,
    1.21119446936847,     -1.3886836827516753,  -1.1652663772886236,
    -0.11479794585014706, 0.761728470454166,    1.335270728748762,
    -0.8664008771744728,  -0.21186586854573583, -0.6320088192840502,
    1.1456772338915662,   0.4175846609939748,   -0.45669421292582424,
    0.5382077472406755,   -0.23751636353283292, -0.26081938409702304,
    0.2392704544306721,   -0.5426271806747859,  -0.10641011004975655,
    0.023331107517175056, -0.6949340684151928,  0.4622860020006555,
    0.3916259358397935,   -0.33014465543930227, -2.473538561912027,
    0.467329818105146,    -1.4954484017273064,  0.16448711650250541,
    0.177361658982001,    -1.7828706326846306,  -0.9103295311933346,
    -0.04552926588091465, -0.43513382182385457, -0.7974051542113659,
    -0.3224429777130407,  0.4029263529865078,   -1.6343614038873584,
    0.09168789004717443,  0.7450292228614815};
constexpr double kTwoPointMixture[] = {
    0.1802007766414521,  99.03038070815415,    98.30598564721814,
    99.71887763205726,   99.95428008564856,    100.69669719233998,
    99.1753826837005,    99.79760116481935,    100.89225139385081,
    98.99239887928863,   -0.11085445453768714, -0.3745237132660136,
    98.54443118364658,   -0.13011378300423554, 1.109209381655255,
    2.2308807343951527,  98.54292550450849,    100.91960453009808,
    101.10278762632115,  101.20632906401428,   99.55492874377144,
    0.30615403437249106, 99.38037550190282,    100.55219191649334,
    101.19025454702579,  -0.2561376215468438,  0.2131037640973363,
    0.8512238627800438,  100.70936506326589,   -0.6696993634118393,
    101.36233456079289,  0.47673591426551837,  0.14659820565348042,
    100.0328109038147,   100.69149277970087,   1.0225228683144465,
    -1.2740390810533593, -0.8733726004430489,  98.27058717679904,
    0.43982293714385207, 100.38231586515894,   99.64824983457514,
    98.90122454239673,   101.3076013000721,    1.598390016309521,
    101.57732976351564,  0.04875537048597025,  0.1394254971639876,
    100.1371673010853,   99.86397612960978};

EmbeddingTable TableFrom(const std::string& text) {
  std::istringstream in(text);
  return ReadEmbeddingTable(in);
}

corpus::TokenizedPost Words(std::vector<std::string> words) {
  corpus::TokenizedPost t;
  t.post_id = "p";
  t.word_tokens = std::move(words);
  return t;
}

PointSet Points(size_t dim, std::vector<double> flat) {
  return PointSet(dim, std::move(flat));
}

TEST(EmbeddingTableTest, LoadsTokensAndInfersDimension) {
  EmbeddingTable table = TableFrom("a 1 0 0.5\nb 0 1 -2e-1\n");
  EXPECT_EQ(table.size(), 2u);
  EXPECT_EQ(table.dimension(), 3u);
  ASSERT_NE(table.Lookup("b"), nullptr);
  EXPECT_DOUBLE_EQ(table.Lookup("b")[2], -0.2);
  EXPECT_EQ(table.Lookup("zzz"), nullptr);
}

TEST(EmbeddingTableTest, DimensionMismatchNamesLine) {
  try {
    TableFrom("a 1 2 3\nb 1 2\n");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_THAT(e.what(), HasSubstr("line 2"));
  }
}

TEST(EmbeddingTableTest, RepeatedTokenIsNamed) {
  try {
    TableFrom("tok 1 2\nother 3 4\ntok 5 6\n");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_THAT(e.what(), HasSubstr("'tok'"));
  }
}

TEST(EmbeddingTableTest, NonNumericComponent) {
  EXPECT_THROW(TableFrom("a 1 x\n"), DataError);
}

TEST(EmbedPostTest, MeanOfInVocabularyVectors) {
  EmbeddingTable table = TableFrom("a 1 0\nb 0 1\n");
  PostEmbedding e = EmbedPost(Words({"a", "b"}), table);
  EXPECT_DOUBLE_EQ(e.vector[0], 0.5);
  EXPECT_DOUBLE_EQ(e.vector[1], 0.5);
  EXPECT_DOUBLE_EQ(e.oov_fraction, 0.0);

  PostEmbedding partial = EmbedPost(Words({"a", "zz", "a", "b"}), table);
  EXPECT_NEAR(partial.vector[0], 2.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(partial.oov_fraction, 0.25);
}

TEST(EmbedPostTest, AllOutOfVocabulary) {
  EmbeddingTable table = TableFrom("a 1 0\n");
  PostEmbedding e = EmbedPost(Words({"x", "y"}), table);
  EXPECT_EQ(e.vector, (std::vector<double>{0.0, 0.0}));
  EXPECT_DOUBLE_EQ(e.oov_fraction, 1.0);
}

TEST(EmbedPostTest, EmptyPost) {
  EmbeddingTable table = TableFrom("a 1 0\n");
  PostEmbedding e = EmbedPost(Words({}), table);
  EXPECT_EQ(e.vector, (std::vector<double>{0.0, 0.0}));
  EXPECT_DOUBLE_EQ(e.oov_fraction, 0.0);
}

TEST(EmbedPostTest, TokenOrderDoesNotMatter) {
  EmbeddingTable table =
      TableFrom("a 0.1 0.7 0.3\nb 1e-3 2.5 0.9\nc 3.3 0.01 7.7\n");
  std::vector<std::string> words = {"a", "b", "c", "a", "q", "c", "b", "b"};
  const PostEmbedding base = EmbedPost(Words(words), table);
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    rng.Shuffle(words);
    EXPECT_EQ(EmbedPost(Words(words), table).vector, base.vector);
  }
}

TEST(CovarianceTest, HandComputedVariances) {
  CovarianceSummary s = SummarizeCovariance(Points(2, {0, 0, 2, 0}));
  EXPECT_DOUBLE_EQ(s.variances[0], 2.0);
  EXPECT_DOUBLE_EQ(s.variances[1], 0.0);
  EXPECT_DOUBLE_EQ(s.trace, 2.0);
  EXPECT_DOUBLE_EQ(SummarizeCovariance(Points(1, {1, 2, 3})).trace, 1.0);
  EXPECT_DOUBLE_EQ(SummarizeCovariance(Points(2, {4, 5, 4, 5, 4, 5})).trace,
                   0.0);
}

TEST(CovarianceTest, NeedsTwoPoints) {
  EXPECT_THROW(SummarizeCovariance(Points(2, {1, 1})), InvalidArgument);
}

// Orthogonal matrix from Gram-Schmidt on seeded Gaussian columns.
std::vector<double> RandomRotation(size_t dim, Rng& rng) {
  std::vector<double> q(dim * dim);
  for (double& v : q) v = rng.Normal();
  for (size_t c = 0; c < dim; ++c) {
    for (size_t p = 0; p < c; ++p) {
      double dot = 0;
      for (size_t r = 0; r < dim; ++r) dot += q[r * dim + c] * q[r * dim + p];
      for (size_t r = 0; r < dim; ++r) q[r * dim + c] -= dot * q[r * dim + p];
    }
    double norm = 0;
    for (size_t r = 0; r < dim; ++r) norm += q[r * dim + c] * q[r * dim + c];
    norm = std::sqrt(norm);
    for (size_t r = 0; r < dim; ++r) q[r * dim + c] /= norm;
  }
  return q;
}

TEST(CovarianceTest, TraceInvariantUnderRotation) {
  Rng rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    const size_t dim = 2 + trial % 5;
    const size_t n = 30;
    PointSet points(dim, std::vector<double>(n * dim));
    for (size_t i = 0; i < n; ++i) {
      for (size_t d = 0; d < dim; ++d) {
        points.row(i)[d] = rng.Normal() * static_cast<double>(d + 1) + 3.0;
      }
    }
    const std::vector<double> q = RandomRotation(dim, rng);
    PointSet rotated(dim, std::vector<double>(n * dim, 0.0));
    for (size_t i = 0; i < n; ++i) {
      for (size_t r = 0; r < dim; ++r) {
        for (size_t c = 0; c < dim; ++c) {
          rotated.row(i)[r] += q[r * dim + c] * points.row(i)[c];
        }
      }
    }
    const double a = SummarizeCovariance(points).trace;
    const double b = SummarizeCovariance(rotated).trace;
    EXPECT_NEAR(a, b, 1e-9 * a);
  }
}

TEST(ShapiroWilkTest, MatchesReferenceOnNormalSamples) {
  const double* dims[] = {kNormalDim0, kNormalDim1, kNormalDim2};
  const double expected[] = {0.9904112893155012, 0.9823044915110538,
                             0.9849637165467602};
  PointSet points(3, std::vector<double>(150));
  for (size_t d = 0; d < 3; ++d) {
    std::vector<double> sample(dims[d], dims[d] + 50);
    auto w = ShapiroWilkW(sample);
    ASSERT_TRUE(w.has_value());
    EXPECT_NEAR(*w, expected[d], 1e-6);
    EXPECT_GE(*w, 0.9);
    for (size_t i = 0; i < 50; ++i) points.row(i)[d] = dims[d][i];
  }
  NormalityReport report = CheckNormality(points);
  ASSERT_EQ(report.w.size(), 3u);
  for (size_t d = 0; d < 3; ++d) EXPECT_NEAR(*report.w[d], expected[d], 1e-6);
  EXPECT_FALSE(report.subsampled);
}

TEST(ShapiroWilkTest, TwoPointMixtureIsNotNormal) {
  std::vector<double> sample(std::begin(kTwoPointMixture),
                             std::end(kTwoPointMixture));
  auto w = ShapiroWilkW(sample);
  ASSERT_TRUE(w.has_value());
  EXPECT_NEAR(*w, 0.638811558571561, 1e-6);
  EXPECT_LT(*w, 0.9);
}

TEST(ShapiroWilkTest, SmallSamples) {
  EXPECT_NEAR(*ShapiroWilkW({1.0, 2.0, 4.0}), 0.9642857142857142, 1e-9);
  EXPECT_NEAR(*ShapiroWilkW({1, 2, 3, 10}), 0.8068856643251408, 1e-6);
  EXPECT_NEAR(*ShapiroWilkW({0.1, 0.5, 0.3, 2.0, 1.1}), 0.8981577899129861,
              1e-6);
  EXPECT_THROW(ShapiroWilkW({1.0, 2.0}), InvalidArgument);
}

TEST(ShapiroWilkTest, ConstantColumnIsDegenerate) {
  EXPECT_FALSE(ShapiroWilkW({3.0, 3.0, 3.0, 3.0}).has_value());
  PointSet points(2, {1, 5, 2, 5, 3, 5, 4, 5});
  NormalityReport report = CheckNormality(points);
  EXPECT_TRUE(report.w[0].has_value());
  EXPECT_FALSE(report.w[1].has_value());
  EXPECT_EQ(report.degenerate_dims, (std::vector<size_t>{1}));
}

TEST(ShapiroWilkTest, SubsamplesAboveMaxN) {
  Rng rng(1);
  PointSet points(1, std::vector<double>(400));
  for (double& v : points.values) v = rng.Normal();
  NormalityReport a = CheckNormality(points, 100, 17);
  NormalityReport b = CheckNormality(points, 100, 17);
  EXPECT_TRUE(a.subsampled);
  EXPECT_EQ(a.sample_size, 100u);
  EXPECT_EQ(*a.w[0], *b.w[0]);
  EXPECT_GT(*a.w[0], 0.0);
  EXPECT_LE(*a.w[0], 1.0);
}

TEST(KMeansTest, UnitSquareCornersWithFourClusters) {
  PointSet points(2, {0, 0, 1, 0, 0, 1, 1, 1});
  Clustering c = KMeans(points, 4, 3);
  EXPECT_DOUBLE_EQ(c.inertia, 0.0);
  std::vector<size_t> sorted = c.assignments;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<size_t>{0, 1, 2, 3}));
}

// Exhaustive search over all assignments of n points to 2 labels.
double BestTwoPartitionInertia(const std::vector<double>& xs,
                               std::vector<double>* centres) {
  double best = std::numeric_limits<double>::infinity();
  const size_t n = xs.size();
  for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
    double sum[2] = {0, 0};
    double count[2] = {0, 0};
    for (size_t i = 0; i < n; ++i) {
      const int side = (mask >> i) & 1;
      sum[side] += xs[i];
      count[side] += 1;
    }
    const double m0 = sum[0] / count[0], m1 = sum[1] / count[1];
    double cost = 0;
    for (size_t i = 0; i < n; ++i) {
      const double m = ((mask >> i) & 1) ? m1 : m0;
      cost += (xs[i] - m) * (xs[i] - m);
    }
    if (cost < best) {
      best = cost;
      *centres = {std::min(m0, m1), std::max(m0, m1)};
    }
  }
  return best;
}

TEST(KMeansTest, OneDimensionalMatchesBruteForce) {
  const std::vector<double> xs = {0.0, 0.1, 10.0, 10.1};
  std::vector<double> oracle_centres;
  const double oracle = BestTwoPartitionInertia(xs, &oracle_centres);
  EXPECT_NEAR(oracle, 0.01, 1e-12);
  for (uint64_t seed = 0; seed < 10; ++seed) {
    Clustering c = KMeans(PointSet(1, xs), 2, seed);
    std::vector<double> centres = c.centroids.values;
    std::sort(centres.begin(), centres.end());
    EXPECT_NEAR(centres[0], oracle_centres[0], 1e-12);
    EXPECT_NEAR(centres[1], oracle_centres[1], 1e-12);
    EXPECT_NEAR(c.inertia, oracle, 1e-12);
  }
}

TEST(KMeansTest, SingleClusterIsTheMean) {
  PointSet points(2, {1, 2, 3, 4, 5, 9});
  Clustering c = KMeans(points, 1, 0);
  EXPECT_DOUBLE_EQ(c.centroids.row(0)[0], 3.0);
  EXPECT_DOUBLE_EQ(c.centroids.row(0)[1], 5.0);
}

TEST(KMeansTest, InvalidK) {
  PointSet points(1, {1, 2});
  EXPECT_THROW(KMeans(points, 0, 0), InvalidArgument);
  EXPECT_THROW(KMeans(points, 3, 0), InvalidArgument);
}

TEST(KMeansTest, InertiaNeverIncreasesAndIsDeterministic) {
  Rng rng(2025);
  PointSet points(3, std::vector<double>(600 * 3));
  for (size_t i = 0; i < 600; ++i) {
    const double shift = static_cast<double>(i % 5) * 2.0;
    for (double& v : points.row(i)) v = rng.Normal() + shift;
  }
  Clustering a = KMeans(points, 8, 42);
  for (size_t t = 1; t < a.inertia_trace.size(); ++t) {
    EXPECT_LE(a.inertia_trace[t], a.inertia_trace[t - 1] * (1 + 1e-12));
  }
  KMeansOptions threaded;
  threaded.threads = 4;
  Clustering b = KMeans(points, 8, 42, threaded);
  EXPECT_EQ(a.assignments, b.assignments);
  EXPECT_EQ(a.centroids.values, b.centroids.values);
  EXPECT_EQ(a.inertia, b.inertia);
  for (size_t i = 0; i < points.size(); ++i) EXPECT_LT(a.assignments[i], 8u);
}

TEST(KMeansTest, DuplicatePointsTriggerEmptyClusterRepair) {
  PointSet points(1, {5, 5, 5, 5, 5, 5});
  Clustering c = KMeans(points, 3, 1);
  EXPECT_DOUBLE_EQ(c.inertia, 0.0);
}

TEST(PcaTest, CollinearPointsHaveZeroSecondComponent) {
  PointSet points(2, {0, 0, 1, 2, 2, 4, 3, 6, -1, -2});
  Projection p = PcaProject(points);
  EXPECT_FALSE(p.degenerate);
  for (size_t i = 0; i < points.size(); ++i) {
    EXPECT_LT(std::abs(p.coordinates.row(i)[1]), 1e-9);
  }
}

TEST(PcaTest, TwoDimensionalInputPreservesDistances) {
  Rng rng(8);
  PointSet points(2, std::vector<double>(40));
  for (size_t i = 0; i < 20; ++i) {
    points.row(i)[0] = rng.Normal() * 3.0;
    points.row(i)[1] = rng.Normal();
  }
  Projection p = PcaProject(points);
  for (size_t i = 0; i < 20; ++i) {
    for (size_t j = i + 1; j < 20; ++j) {
      EXPECT_NEAR(SquaredDistance(points.row(i), points.row(j)),
                  SquaredDistance(p.coordinates.row(i), p.coordinates.row(j)),
                  1e-9);
    }
  }
}

TEST(PcaTest, EigenvaluesMatchDenseOracle) {
  Rng rng(12);
  const size_t n = 25;
  PointSet points(3, std::vector<double>(n * 3));
  for (size_t i = 0; i < n; ++i) {
    const double a = rng.Normal(), b = rng.Normal(), c = rng.Normal();
    points.row(i)[0] = 2 * a + 0.3 * b;
    points.row(i)[1] = -a + b + 0.1 * c;
    points.row(i)[2] = 0.5 * c;
  }
  Eigen::MatrixXd m(n, 3);
  for (size_t i = 0; i < n; ++i) {
    for (size_t d = 0; d < 3; ++d) m(i, d) = points.row(i)[d];
  }
  Eigen::MatrixXd centered = m.rowwise() - m.colwise().mean();
  Eigen::MatrixXd cov = centered.transpose() * centered / double(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  const auto& ev = solver.eigenvalues();  // ascending

  Projection p = PcaProject(points);
  EXPECT_NEAR(p.eigenvalues[0], ev(2), 1e-9);
  EXPECT_NEAR(p.eigenvalues[1], ev(1), 1e-9);
  // Variance of the projected coordinates equals the eigenvalues.
  for (size_t c = 0; c < 2; ++c) {
    double var = 0;
    for (size_t i = 0; i < n; ++i) {
      var += p.coordinates.row(i)[c] * p.coordinates.row(i)[c];
    }
    EXPECT_NEAR(var / double(n - 1), p.eigenvalues[c], 1e-9);
    const double* comp = &p.components[c * 3];
    size_t largest = 0;
    for (size_t d = 1; d < 3; ++d) {
      if (std::abs(comp[d]) > std::abs(comp[largest])) largest = d;
    }
    EXPECT_GT(comp[largest], 0.0);
  }
  EXPECT_EQ(PcaProject(points).coordinates.values, p.coordinates.values);
}

TEST(PcaTest, IdenticalPointsAreDegenerate) {
  Projection p = PcaProject(PointSet(3, {1, 2, 3, 1, 2, 3, 1, 2, 3}));
  EXPECT_TRUE(p.degenerate);
  for (double v : p.coordinates.values) EXPECT_EQ(v, 0.0);
}

TEST(PcaTest, CsvLayout) {
  Projection p = PcaProject(PointSet(2, {0, 0, 2, 0}));
  std::ostringstream out;
  std::vector<size_t> clusters = {0, 1};
  WriteProjectionCsv(out, {"a", "b"}, p, &clusters);
  EXPECT_EQ(out.str(), "post_id,x,y,cluster\na,-1,0,0\nb,1,0,1\n");
}

}  // namespace
}  // namespace synthaudit::embedding
