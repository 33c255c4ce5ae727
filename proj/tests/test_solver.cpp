#include <gtest/gtest.h>

#include "gsfa/builders.hpp"
#include "gsfa/free_response.hpp"
#include "gsfa/solver.hpp"
#include "oracles.hpp"

using namespace gsfa;

namespace {

double rel_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1e-300, b.cwiseAbs().maxCoeff());
}

Matrix one_hot(Index n) { return Matrix::Identity(n, n); }

}  // namespace

TEST(DerivativeCovariance, PathsAgreeWithOracle) {
  CounterRng rng(12);
  std::vector<TrainingGraph> graphs{build_clustered_graph({4, 6, 5}),
                                    build_serial_graph(Vector::LinSpaced(24, 0, 23), 6).graph,
                                    build_linear_graph(15, LinearVariant::endpoint_halved_vertex_weights)};
  for (const auto& g : graphs) {
    const Matrix x = oracle::random_matrix(rng, 5, g.size());
    const Matrix want = oracle::derivative_covariance(x, g.to_dense());
    EXPECT_LT(rel_diff(derivative_covariance(x, g, DerivativePath::pairwise), want), 1e-12);
    EXPECT_LT(rel_diff(derivative_covariance(x, g, DerivativePath::consistent_form), want), 1e-9);
    if (g.structure()) EXPECT_LT(rel_diff(derivative_covariance(x, g, DerivativePath::structured), want), 1e-9);
  }
}

TEST(DerivativeCovariance, ConsistentFormOnRandomGraphs) {
  CounterRng rng(13);
  for (int t = 0; t < 5; ++t) {
    const auto g = oracle::random_consistent_graph(rng, 16);
    const Matrix x = oracle::random_matrix(rng, 4, 16);
    EXPECT_LT(rel_diff(derivative_covariance(x, g, DerivativePath::consistent_form),
                       oracle::derivative_covariance(x, g.to_dense())),
              1e-9);
  }
}

TEST(DerivativeCovariance, PathPreconditions) {
  Matrix m(3, 3);
  m << 0, 1, 0, 1, 0, 1, 0, 1, 0;
  const TrainingGraph chain(Vector::Ones(3), m);
  const Matrix x = Matrix::Random(2, 3);
  try {
    derivative_covariance(x, chain, DerivativePath::consistent_form);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::contract);
  }
  EXPECT_THROW(derivative_covariance(x, chain, DerivativePath::structured), Error);
  EXPECT_THROW(derivative_covariance(Matrix::Random(2, 4), chain, DerivativePath::pairwise), Error);

  std::vector<std::string> warnings;
  ScopedWarningSink sink([&](const std::string& w) { warnings.push_back(w); });
  EXPECT_EQ(choose_derivative_path(chain), DerivativePath::pairwise);
  EXPECT_EQ(warnings.size(), 1u);
  EXPECT_EQ(choose_derivative_path(build_clustered_graph({2, 2})), DerivativePath::structured);
  EXPECT_EQ(choose_derivative_path(build_linear_graph(5, LinearVariant::self_loop_extended)),
            DerivativePath::consistent_form);
}

TEST(SampleCovariance, WeightedMoments) {
  CounterRng rng(3);
  const Matrix x = oracle::random_matrix(rng, 3, 10);
  Vector v(10);
  for (Index i = 0; i < 10; ++i) v[i] = 0.5 + rng.uniform();
  const Matrix c = sample_covariance(x, v);
  for (Index a = 0; a < 3; ++a)
    for (Index b = 0; b < 3; ++b)
      EXPECT_NEAR(c(a, b), oracle::weighted_cov(x.row(a).transpose(), x.row(b).transpose(), v), 1e-13);
}

TEST(TrainGsfa, FeaturesSatisfyConstraints) {
  CounterRng rng(20);
  const auto g = build_serial_graph(Vector::LinSpaced(40, 0, 39), 8).graph;
  const Matrix x = oracle::random_matrix(rng, 6, 40);
  const auto model = train_gsfa(x, g, 4);
  const Matrix y = extract_features(model, x);
  const Vector v = g.vertex_weights();
  for (Index a = 0; a < 4; ++a) {
    EXPECT_NEAR(oracle::weighted_mean(y.row(a).transpose(), v), 0.0, 1e-10);
    for (Index b = 0; b < 4; ++b)
      EXPECT_NEAR(oracle::weighted_cov(y.row(a).transpose(), y.row(b).transpose(), v), a == b ? 1.0 : 0.0, 1e-8);
    EXPECT_NEAR(oracle::delta(g.to_dense(), y.row(a).transpose()), model.deltas[a], 1e-8);
  }
  for (Index a = 1; a < 4; ++a) EXPECT_LE(model.deltas[a - 1], model.deltas[a]);
  EXPECT_EQ(model.trained_on, fingerprint(g));
}

TEST(TrainGsfa, SlowestFeatureBeatsRandomProbes) {
  CounterRng rng(41);
  const auto g = build_linear_graph(50, LinearVariant::endpoint_halved_vertex_weights);
  Matrix x = oracle::random_matrix(rng, 5, 50);
  for (Index n = 0; n < 50; ++n) x(0, n) += 0.1 * static_cast<double>(n);
  const auto model = train_gsfa(x, g, 1);
  const Matrix centered = x.colwise() - weighted_mean(x, g.vertex_weights());
  for (int t = 0; t < 1000; ++t) {
    Vector w(5);
    for (Index i = 0; i < 5; ++i) w[i] = rng.normal();
    const Vector y = normalize_feature(centered.transpose() * w, g.vertex_weights());
    EXPECT_GE(oracle::delta(g.to_dense(), y), model.deltas[0] - 1e-9);
  }
}

TEST(TrainGsfa, OneHotDataReproducesFreeResponses) {
  for (const auto& g : {build_clustered_graph({3, 4, 3}), build_serial_graph(Vector::LinSpaced(12, 0, 11), 4).graph,
                        build_linear_graph(10, LinearVariant::self_loop_extended)}) {
    const Index n = g.size();
    const auto s = optimal_free_responses(g);
    const auto model = train_gsfa(one_hot(n), g, n - 1);
    const Matrix y = extract_features(model, one_hot(n));
    EXPECT_LT((model.deltas - s.feasible_deltas()).cwiseAbs().maxCoeff(), 1e-8);
    // compare only responses with a non-degenerate Δ
    const Vector d = s.feasible_deltas();
    for (Index j = 0; j < n - 1; ++j) {
      const bool isolated = (j == 0 || d[j] - d[j - 1] > 1e-6) && (j == n - 2 || d[j + 1] - d[j] > 1e-6);
      if (isolated) EXPECT_LT(oracle::signed_distance(y.row(j).transpose(), s.feasible_responses(n - 1).col(j)), 1e-6);
    }
  }
}

TEST(TrainGsfa, PathsGiveSameModel) {
  CounterRng rng(9);
  const auto g = build_clustered_graph({5, 5, 6});
  const Matrix x = oracle::random_matrix(rng, 4, 16);
  GsfaOptions a, b, c;
  a.path = DerivativePath::pairwise;
  b.path = DerivativePath::consistent_form;
  c.path = DerivativePath::structured;
  const auto ma = train_gsfa(x, g, 3, a), mb = train_gsfa(x, g, 3, b), mc = train_gsfa(x, g, 3, c);
  EXPECT_LT((ma.deltas - mb.deltas).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT((ma.deltas - mc.deltas).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT(rel_diff(extract_features(mb, x), extract_features(ma, x)), 1e-7);
}

TEST(TrainGsfa, AffineInvariance) {
  CounterRng rng(10);
  const auto g = build_serial_graph(Vector::LinSpaced(30, 0, 29), 5).graph;
  const Matrix x = oracle::random_matrix(rng, 3, 30);
  GsfaOptions opts;
  opts.sign_reference = 0;
  const Matrix y1 = extract_features(train_gsfa(x, g, 2, opts), x);
  Matrix a(3, 3);
  a << 2, 1, 0, 0, 3, 1, 1, 0, 5;
  const Matrix x2 = (a * x).colwise() + Vector::Constant(3, 7.0);
  const Matrix y2 = extract_features(train_gsfa(x2, g, 2, opts), x2);
  EXPECT_LT((y1 - y2).cwiseAbs().maxCoeff(), 1e-7);
  for (Index j = 0; j < 2; ++j) EXPECT_LT(y1(j, 0), 0.0);
}

TEST(TrainGsfa, RankAndInputErrors) {
  const auto g = build_clustered_graph({3, 3});
  Matrix x = Matrix::Zero(3, 6);
  x.row(0) = Vector::LinSpaced(6, 0, 5).transpose();
  x.row(1) = 2.0 * x.row(0);
  try {
    train_gsfa(x, g, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::singular);
    EXPECT_NE(std::string(e.what()).find("rank 1"), std::string::npos);
  }
  EXPECT_NO_THROW(train_gsfa(x, g, 1));
  x(0, 0) = std::nan("");
  EXPECT_THROW(train_gsfa(x, g, 1), Error);
  const auto m = train_gsfa(Matrix::Random(2, 6), g, 1);
  EXPECT_THROW(extract_features(m, Matrix::Random(3, 6)), Error);
}
