#include <gtest/gtest.h>

#include "gsfa/datagen.hpp"

using namespace gsfa;

TEST(Regression, LayoutAndLabels) {
  RegressionSpec s;
  s.values = 5;
  s.per_value = 3;
  s.dims = 4;
  const auto d = gen_regression(s);
  EXPECT_EQ(d.x.rows(), 4);
  EXPECT_EQ(d.x.cols(), 15);
  for (Index n = 0; n < 15; ++n) EXPECT_DOUBLE_EQ(d.labels[n], -3.0 + 0.1 * static_cast<double>(n / 3));
  EXPECT_EQ(d.map.rows(), 4);
  EXPECT_EQ(d.map.cols(), 3);
  EXPECT_EQ(d.metadata["generator"], "regression");
  EXPECT_EQ(d.metadata["offset"].size(), 4u);
}

TEST(Regression, PhiRescalesLabelGrid) {
  RegressionSpec s;
  s.values = 21;
  s.label_min = 0.0;
  s.label_step = 0.5;
  const Vector lo = regression_phi(s, 0.0), hi = regression_phi(s, 10.0), mid = regression_phi(s, 5.0);
  EXPECT_EQ(lo, (Vector(3) << -1, 1, -1).finished());
  EXPECT_EQ(hi, (Vector(3) << 1, 1, 1).finished());
  EXPECT_EQ(mid, Vector::Zero(3));
  s.latent = LatentMap::linear;
  EXPECT_EQ(regression_phi(s, 10.0).size(), 1);
}

TEST(Regression, NoiselessSamplesFollowTheMap) {
  RegressionSpec s;
  s.values = 6;
  s.per_value = 2;
  s.dims = 5;
  s.noise = 0.0;
  s.nonlinearity = Nonlinearity::tanh;
  const auto d = gen_regression(s);
  for (Index n = 0; n < 12; ++n) {
    const Vector want = (d.map * regression_phi(s, d.labels[n]) + d.offset).array().tanh().matrix();
    EXPECT_LT((d.x.col(n) - want).cwiseAbs().maxCoeff(), 1e-15);
  }
  EXPECT_EQ(d.x.col(0), d.x.col(1));
}

TEST(Regression, DeterministicStreams) {
  RegressionSpec s;
  s.values = 10;
  s.dims = 6;
  const auto a = gen_regression(s), b = gen_regression(s);
  EXPECT_EQ(a.x, b.x);
  s.noise = 0.5;
  const auto c = gen_regression(s);
  EXPECT_EQ(a.map, c.map);  // the map stream does not depend on the noise level
  EXPECT_EQ(a.offset, c.offset);
  s.seed = 2;
  EXPECT_NE(gen_regression(s).map, a.map);
}

TEST(Regression, SpecErrors) {
  RegressionSpec s;
  s.dims = 2;
  try {
    gen_regression(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::parameter);
  }
  s.dims = 5;
  s.values = 1;
  EXPECT_THROW(gen_regression(s), Error);
  s.values = 4;
  s.noise = -1.0;
  EXPECT_THROW(gen_regression(s), Error);
}

TEST(Classification, LayoutAndDeterminism) {
  ClassificationSpec s;
  s.classes = 4;
  s.per_class = 3;
  s.dims = 2;
  s.noise = 0.0;
  const auto d = gen_classification(s);
  EXPECT_EQ(d.x.cols(), 12);
  for (Index n = 0; n < 12; ++n) {
    EXPECT_EQ(d.class_ids[static_cast<std::size_t>(n)], n / 3);
    EXPECT_EQ(d.x.col(n), d.centroids.col(n / 3));
  }
  EXPECT_EQ(gen_classification(s).x, d.x);
  s.classes = 6;
  EXPECT_THROW(gen_classification(s), Error);
  s.classes = 4;
  s.per_class = 1;
  EXPECT_THROW(gen_classification(s), Error);
}

TEST(OneHot, Identity) { EXPECT_EQ(one_hot_features(4), Matrix::Identity(4, 4)); }
