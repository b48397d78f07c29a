#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "depsel/depmeasure.hpp"
#include "depsel/error.hpp"
#include "oracles.hpp"

using namespace depsel;

namespace {

Matrix gaussian(Eigen::Index n, Eigen::Index d, std::uint64_t seed, double shift = 0.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(shift, 1.0);
  Matrix m(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = normal(rng);
  return m;
}

Matrix column(std::initializer_list<double> v) {
  Matrix m(static_cast<Eigen::Index>(v.size()), 1);
  Eigen::Index i = 0;
  for (double x : v) m(i++, 0) = x;
  return m;
}

RdcConfig rdc_config(std::uint64_t seed) {
  RdcConfig c;
  c.seed = seed;
  return c;
}

}  // namespace

TEST(Copula, HandRanks) {
  const Matrix u = copula_transform(column({3, 1, 2}));
  EXPECT_DOUBLE_EQ(u(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(u(1, 0), 1.0 / 3);
  EXPECT_DOUBLE_EQ(u(2, 0), 2.0 / 3);
}

TEST(Copula, TiesAverage) {
  const Matrix u = copula_transform(column({5, 5}));
  EXPECT_DOUBLE_EQ(u(0, 0), 0.75);
  EXPECT_DOUBLE_EQ(u(1, 0), 0.75);
}

TEST(Copula, IncreasingColumn) {
  const Matrix u = copula_transform(column({-2, 0.5, 7, 100}));
  for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(u(i, 0), (i + 1) / 4.0);
}

TEST(Copula, MonotoneTransformBitIdentical) {
  const Matrix x = gaussian(300, 3, 1);
  const Matrix y = x.array().cube().matrix() * 5.0 + Matrix::Constant(300, 3, 2.0);
  EXPECT_EQ(copula_transform(x), copula_transform(y));
  EXPECT_EQ(rdc(x, x, rdc_config(4)), rdc(y, x, rdc_config(4)));
}

TEST(Copula, RowPermutationEquivariant) {
  const Matrix x = gaussian(50, 2, 8);
  const Matrix u = copula_transform(x);
  const Matrix r = copula_transform(x.colwise().reverse());
  EXPECT_EQ(r, u.colwise().reverse());
}

TEST(Projection, VanishingScaleGivesZero) {
  RdcConfig c;
  c.s = 1e-300;
  const Matrix p = random_projection(copula_transform(gaussian(20, 2, 1)), c);
  EXPECT_LE(p.cwiseAbs().maxCoeff(), 1e-290);
}

TEST(Projection, Deterministic) {
  const Matrix u = copula_transform(gaussian(40, 3, 2));
  EXPECT_EQ(random_projection(u, rdc_config(9)), random_projection(u, rdc_config(9)));
  EXPECT_NE(random_projection(u, rdc_config(9)), random_projection(u, rdc_config(10)));
}

TEST(Projection, InjectedWeights) {
  ProjectionWeights w{Matrix::Constant(1, 1, 1.0), Vector::Zero(1)};
  const Matrix p = random_projection(column({0.5}), w);
  EXPECT_DOUBLE_EQ(p(0, 0), std::sin(0.5));
  EXPECT_NEAR(p(0, 0), 0.4794, 1e-4);
}

TEST(Projection, ColumnsIndependentOfK) {
  RdcConfig small = rdc_config(3), large = rdc_config(3);
  small.k = 5;
  large.k = 20;
  const auto a = draw_projection_weights(4, small);
  const auto b = draw_projection_weights(4, large);
  EXPECT_EQ(a.w, b.w.leftCols(5));
  EXPECT_EQ(a.b, b.b.head(5));
}

TEST(Projection, WeightScaleIsStandardDeviation) {
  RdcConfig c = rdc_config(1);
  c.k = 4000;
  c.s = 0.5;
  const auto w = draw_projection_weights(1, c);
  const double mean = w.w.mean();
  const double sd = std::sqrt((w.w.array() - mean).square().sum() / (c.k - 1));
  EXPECT_NEAR(sd, 0.5, 0.03);
}

TEST(Cca, SelfCorrelation) {
  const Matrix a = gaussian(200, 5, 3);
  EXPECT_NEAR(largest_canonical_correlation(a, a, 1e-8), 1.0, 1e-6);
}

TEST(Cca, ConstantSide) {
  const Matrix a = gaussian(200, 3, 3);
  EXPECT_NEAR(largest_canonical_correlation(a, Matrix::Constant(200, 3, 4.0), 1e-8), 0.0, 1e-6);
}

TEST(Cca, ReducesToPearson) {
  const Matrix x = gaussian(100, 1, 5);
  const Matrix noisy = x + 0.7 * gaussian(100, 1, 6);
  EXPECT_NEAR(largest_canonical_correlation(x, 2.0 * x + Matrix::Constant(100, 1, 1.0), 1e-12), 1.0, 1e-9);
  EXPECT_NEAR(largest_canonical_correlation(x, noisy, 1e-12),
              std::abs(oracle::pearson(x.col(0), noisy.col(0))), 1e-8);
}

TEST(Cca, InvariantToLinearRecombination) {
  const Matrix a = gaussian(300, 3, 7);
  Matrix b = gaussian(300, 3, 8);
  b.col(0) += a.col(1);
  Matrix mix(3, 3);
  mix << 2, 1, 0, 0, 1, -1, 1, 0, 3;
  EXPECT_NEAR(largest_canonical_correlation(a, b, 1e-10), largest_canonical_correlation(a * mix, b, 1e-10), 1e-6);
}

TEST(Cca, TooFewRows) { EXPECT_THROW(largest_canonical_correlation(Matrix::Ones(1, 2), Matrix::Ones(1, 2), 1e-8), InputError); }

TEST(Rdc, MismatchedRows) { EXPECT_THROW(rdc(gaussian(10, 1, 1), gaussian(11, 1, 1), rdc_config(0)), InputError); }

TEST(Rdc, InUnitInterval) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const double r = rdc(gaussian(100, 2, s), gaussian(100, 1, s + 50), rdc_config(s));
    EXPECT_GE(r, 0.0);
    EXPECT_LE(r, 1.0);
  }
}

TEST(Rdc, SymmetricInMedian) {
  std::vector<double> xy, yx;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Matrix x = gaussian(300, 1, s);
    const Matrix y = x.array().sin().matrix() + 0.5 * gaussian(300, 1, s + 100);
    xy.push_back(rdc(x, y, rdc_config(s)));
    yx.push_back(rdc(y, x, rdc_config(s)));
  }
  EXPECT_LE(std::abs(median_in_place(xy) - median_in_place(yx)), 0.05);
}

TEST(Rdc, DetectsQuadratic) {
  std::vector<double> vals;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Matrix x = gaussian(300, 1, s);
    vals.push_back(rdc(x, x.array().square().matrix(), rdc_config(s)));
  }
  EXPECT_GE(median_in_place(vals), 0.5);
}

TEST(MedianHeuristic, HandMedian) { EXPECT_DOUBLE_EQ(median_heuristic_sigma(column({0, 1, 3})), 4.0); }

TEST(MedianHeuristic, TieWithZero) { EXPECT_DOUBLE_EQ(median_heuristic_sigma(column({2, 2, 5})), 9.0); }

TEST(MedianHeuristic, AllEqualIsError) { EXPECT_THROW(median_heuristic_sigma(column({1, 1, 1})), InputError); }

TEST(MedianHeuristic, EvenCountAveragesMiddle) {
  // four points: six distances {1,4,9,1,4,1} -> sorted 1,1,1,4,4,9 -> (1+4)/2
  EXPECT_DOUBLE_EQ(median_heuristic_sigma(column({0, 1, 2, 3})), 2.5);
}

TEST(Mmd, IdenticalSamplesExactlyZero) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Matrix x = gaussian(30, 4, s);
    EXPECT_EQ(mmd(x, x, MmdConfig::median()), 0.0);
  }
}

TEST(Mmd, HandCase) {
  const double v = mmd(column({0}), column({1}), MmdConfig::fixed(1.0));
  EXPECT_NEAR(v, std::sqrt(2.0 - 2.0 * std::exp(-1.0)), 1e-12);
  EXPECT_NEAR(v, 1.12439, 1e-5);
}

TEST(Mmd, MatchesTripleSumOracle) {
  const Matrix x = gaussian(17, 3, 1), y = gaussian(23, 3, 2, 0.5);
  EXPECT_NEAR(mmd_squared(x, y, MmdConfig::fixed(2.5)), oracle::mmd2(x, y, 2.5), 1e-12);
}

TEST(Mmd, SymmetricAndNonNegative) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Matrix x = gaussian(20, 2, s), y = gaussian(25, 2, s + 9, 0.3);
    EXPECT_NEAR(mmd(x, y, MmdConfig::median()), mmd(y, x, MmdConfig::median()), 1e-12);
    EXPECT_GE(mmd(x, y, MmdConfig::median()), 0.0);
  }
}

TEST(Mmd, DegenerateMedianDemandsFixedSigma) {
  const Matrix x = Matrix::Ones(3, 2);
  try {
    mmd(x, x, MmdConfig::median());
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("ixed"), std::string::npos) << e.what();
  }
  EXPECT_EQ(mmd(x, x, MmdConfig::fixed(1.0)), 0.0);
}

TEST(Mmd, ShapeMismatch) { EXPECT_THROW(mmd(gaussian(4, 2, 1), gaussian(4, 3, 1), MmdConfig::fixed(1)), InputError); }

TEST(Config, Validation) {
  RdcConfig r;
  r.k = 0;
  EXPECT_THROW(r.validate(), ConfigError);
  r = RdcConfig{};
  r.s = -1;
  EXPECT_THROW(r.validate(), ConfigError);
  EXPECT_THROW(MmdConfig::fixed(0.0).validate(), ConfigError);
  EXPECT_NO_THROW(MmdConfig::median().validate());
}
