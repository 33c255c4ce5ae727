#include <gtest/gtest.h>

#include <limits>

#include "gsfa/builders.hpp"
#include "gsfa/free_response.hpp"
#include "gsfa/graph.hpp"
#include "gsfa/markov.hpp"
#include "oracles.hpp"

using namespace gsfa;

namespace {

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (double x : r) m(i, j++) = x;
    ++i;
  }
  return m;
}

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

TrainingGraph chain3() { return TrainingGraph(Vector::Ones(3), mat({{0, 1, 0}, {1, 0, 1}, {0, 1, 0}})); }

// serial N=4, K=2: all four cross pairs between {0,1} and {2,3}
TrainingGraph serial4() {
  return TrainingGraph(Vector::Ones(4), mat({{0, 0, 1, 1}, {0, 0, 1, 1}, {1, 1, 0, 0}, {1, 1, 0, 0}}));
}

}  // namespace

TEST(Symmetrize, AveragesWithTranspose) {
  EXPECT_TRUE(symmetrize(mat({{0, 2}, {0, 0}})).isApprox(mat({{0, 1}, {1, 0}})));
  EXPECT_TRUE(symmetrize(mat({{1, 3}, {1, 1}})).isApprox(mat({{1, 2}, {2, 1}})));
  const Matrix s = mat({{1, 4, 2}, {4, 0, 5}, {2, 5, 3}});
  EXPECT_EQ(symmetrize(s), s);
  EXPECT_EQ(symmetrize(symmetrize(mat({{0, 2}, {7, 1}}))), symmetrize(mat({{0, 2}, {7, 1}})));
}

TEST(Symmetrize, RejectsNonSquare) {
  try {
    symmetrize(Matrix::Zero(2, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::dimension);
  }
}

TEST(TrainingGraph, CachesSumsAndValidates) {
  const auto g = serial4();
  EXPECT_EQ(g.q_sum(), 4.0);
  EXPECT_EQ(g.r_sum(), 8.0);
  EXPECT_THROW(TrainingGraph(vec({1, 0}), mat({{0, 1}, {1, 0}})), Error);
  EXPECT_THROW(TrainingGraph(vec({1, 1}), mat({{0, 1}, {0, 0}})), Error);
  try {
    TrainingGraph(vec({1, 1}), Matrix::Zero(2, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::degenerate);
  }
}

TEST(Consistency, HandEvaluatedCases) {
  const auto rep = check_consistency(serial4(), 1e-12);
  EXPECT_TRUE(rep.consistent);
  EXPECT_EQ(rep.max_abs_residual, 0.0);
  EXPECT_FALSE(check_consistency(chain3()).consistent);
  EXPECT_TRUE(check_consistency(chain3(), std::numeric_limits<double>::infinity()).consistent);
}

TEST(Consistency, InvariantUnderEdgeScaling) {
  CounterRng rng(5);
  const auto g = oracle::random_consistent_graph(rng, 12);
  EXPECT_TRUE(check_consistency(g).consistent);
  const auto s = g.scaled(7.5);
  EXPECT_TRUE(check_consistency(s).consistent);
  EXPECT_NEAR((check_consistency(s).residual - check_consistency(g).residual).cwiseAbs().maxCoeff(), 0.0, 1e-12);
}

TEST(WeightedDelta, HandEvaluatedCases) {
  EXPECT_DOUBLE_EQ(weighted_delta(chain3(), vec({-1, 0, 1})), 1.0);
  EXPECT_EQ(weighted_delta(serial4(), Vector::Constant(4, 3.0)), 0.0);
  const auto clustered = build_clustered_graph({2, 2});
  EXPECT_EQ(weighted_delta(clustered, vec({1, 1, -1, -1})), 0.0);
  EXPECT_THROW(weighted_delta(chain3(), Vector::Ones(4)), Error);
}

TEST(WeightedDelta, MatchesDoubleLoopOracleAndIsQuadratic) {
  CounterRng rng(11);
  for (int t = 0; t < 10; ++t) {
    const auto g = oracle::random_consistent_graph(rng, 9);
    Vector y(9);
    for (Index i = 0; i < 9; ++i) y[i] = rng.normal();
    EXPECT_NEAR(weighted_delta(g, y), oracle::delta(g.to_dense(), y), 1e-12);
    EXPECT_NEAR(weighted_delta(g, 3.0 * y), 9.0 * weighted_delta(g, y), 1e-10);
    EXPECT_GE(weighted_delta(g, y), 0.0);
  }
}

TEST(WeightedDeltaFast, AgreesWithDirectSum) {
  const auto g = serial4();
  const Vector y = vec({-1, -1, 1, 1});
  EXPECT_DOUBLE_EQ(weighted_delta_fast(g, y), 4.0);
  EXPECT_DOUBLE_EQ(weighted_delta(g, y), 4.0);

  const auto s = optimal_free_responses(g);
  const Vector y1 = s.feasible_responses(1).col(0);
  EXPECT_NEAR(weighted_delta_fast(g, y1), weighted_delta(g, y1), 1e-10);
}

TEST(WeightedDeltaFast, AgreesOnBuilderGraphsForRandomFeatures) {
  CounterRng rng(3);
  std::vector<TrainingGraph> graphs{build_linear_graph(12, LinearVariant::self_loop_extended),
                                    build_linear_graph(12, LinearVariant::endpoint_halved_vertex_weights),
                                    build_clustered_graph({3, 4, 5}),
                                    build_serial_graph(Vector::LinSpaced(12, 0, 11), 4).graph};
  for (const auto& g : graphs)
    for (int t = 0; t < 20; ++t) {
      Vector y(g.size());
      for (Index i = 0; i < y.size(); ++i) y[i] = rng.normal();
      y = normalize_feature(y, g.vertex_weights());
      const double d = weighted_delta(g, y);
      EXPECT_NEAR(weighted_delta_fast(g, y), d, 1e-9 * std::max(1.0, std::abs(d)));
    }
}

TEST(WeightedDeltaFast, NamesViolatedConstraint) {
  try {
    weighted_delta_fast(serial4(), vec({1, 1, 1, 1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::contract);
    EXPECT_NE(std::string(e.what()).find("zero mean"), std::string::npos);
  }
  try {
    weighted_delta_fast(serial4(), vec({-2, -2, 2, 2}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("unit variance"), std::string::npos);
  }
  EXPECT_THROW(weighted_delta_fast(chain3(), vec({-1.224744871391589, 0, 1.224744871391589})), Error);
}

TEST(NormalizeFeature, Cases) {
  EXPECT_TRUE(normalize_feature(vec({0, 2}), vec({1, 1})).isApprox(vec({-1, 1})));
  const Vector y = vec({-1, 1});
  EXPECT_NEAR((normalize_feature(y, vec({1, 1})) - y).cwiseAbs().maxCoeff(), 0.0, 1e-12);
  try {
    normalize_feature(vec({5, 5}), vec({1, 1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::degenerate);
  }
  const Vector v = vec({1, 2, 3});
  const Vector z = normalize_feature(vec({4, -1, 2}), v);
  EXPECT_NEAR(oracle::weighted_mean(z, v), 0.0, 1e-14);
  EXPECT_NEAR(oracle::weighted_cov(z, z, v), 1.0, 1e-14);
}

TEST(RemoveSelfLoops, Cases) {
  const TrainingGraph g(vec({1, 1}), mat({{1, 0.5}, {0.5, 1}}));
  const auto h = remove_self_loops(g);
  EXPECT_EQ(g.r_sum(), 3.0);
  EXPECT_EQ(h.r_sum(), 1.0);
  EXPECT_EQ(h.q_sum(), g.q_sum());
  EXPECT_TRUE(h.to_dense().isApprox(mat({{0, 0.5}, {0.5, 0}})));
  const auto s = serial4();
  EXPECT_EQ(remove_self_loops(s).to_dense(), s.to_dense());

  const auto lin = build_linear_graph(8, LinearVariant::self_loop_extended);
  const auto sparse_removed = remove_self_loops(lin);
  EXPECT_EQ(sparse_removed.diagonal().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(sparse_removed.r_sum(), lin.r_sum() - 2.0);
}

TEST(RemoveSelfLoops, KeepsFreeResponses) {
  // v ∝ Γ1 before and after when the diagonal is proportional to v
  CounterRng rng(21);
  for (int t = 0; t < 5; ++t) {
    auto base = oracle::random_consistent_graph(rng, 8);
    const Vector v = base.vertex_weights();
    Matrix gamma = base.to_dense() + 0.3 * Matrix(v.asDiagonal());
    const TrainingGraph g(v, gamma);
    const auto a = oracle::generalized_spectrum(g.to_dense(), v);
    const auto h = remove_self_loops(g);
    const auto b = oracle::generalized_spectrum(h.to_dense(), v);
    for (Index j = 1; j < 8; ++j)
      EXPECT_LT(oracle::signed_distance(a.responses.col(j), b.responses.col(j)), 1e-8);
  }
}

TEST(Markov, TransitionMatrix) {
  const auto p = markov_transition_matrix(build_clustered_graph({2, 2}));
  EXPECT_TRUE(p.isApprox(mat({{0, 1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}})));
  const auto q = markov_transition_matrix(build_serial_graph(Vector::LinSpaced(12, 0, 11), 3).graph);
  EXPECT_LT((q.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
  try {
    markov_transition_matrix(TrainingGraph(vec({1, 1}), mat({{1, -1}, {-1, 2}})));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::unsupported);
  }
}

TEST(Markov, SequenceVisitsStationaryDistribution) {
  const auto g = build_linear_graph(5, LinearVariant::endpoint_halved_vertex_weights);
  const auto seq = sample_markov_sequence(g, 40000, 9);
  std::vector<double> freq(5, 0.0);
  for (Index s : seq) freq[static_cast<std::size_t>(s)] += 1.0 / 40000.0;
  for (Index n = 0; n < 5; ++n) EXPECT_NEAR(freq[static_cast<std::size_t>(n)], g.vertex_weights()[n] / g.q_sum(), 0.02);
  for (std::size_t t = 1; t < seq.size(); ++t) EXPECT_EQ(std::abs(seq[t] - seq[t - 1]), 1);
  EXPECT_EQ(sample_markov_sequence(g, 50, 4), sample_markov_sequence(g, 50, 4));
}

TEST(Fingerprint, DistinguishesGraphs) {
  const auto a = fingerprint(serial4());
  EXPECT_EQ(a, fingerprint(serial4()));
  EXPECT_FALSE(a == fingerprint(serial4().scaled(2.0)));
}
