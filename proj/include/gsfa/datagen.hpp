#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "gsfa/graph.hpp"
#include "gsfa/random.hpp"

namespace gsfa {

// Seed expansion: every generator splits its seed into named sub-streams
// with CounterRng::derive(seed, tag) and draws from them in the documented
// order, so regeneration only needs (spec, seed).

enum class LatentMap { linear, polynomial };
enum class Nonlinearity { none, tanh };

struct RegressionSpec {
  Index values = 60;        // distinct label values
  Index per_value = 10;     // samples per value
  double label_min = -3.0;
  double label_step = 0.1;  // labels label_min + k·step, k = 0…values−1
  Index dims = 20;          // I
  LatentMap latent = LatentMap::polynomial;
  Index latent_dims = 3;    // polynomial degree; 1 for linear
  Nonlinearity nonlinearity = Nonlinearity::none;
  double noise = 0.05;
  std::uint64_t seed = 1;

  Index samples() const { return values * per_value; }
  Index phi_dims() const { return latent == LatentMap::linear ? 1 : latent_dims; }
};

struct RegressionData {
  Matrix x;        // I×N
  Vector labels;   // N, value-major: sample n has value index n / per_value
  Matrix map;      // I×p, the "A" of x = h(A·φ(t) + b) + ε
  Vector offset;   // b
  nlohmann::ordered_json metadata;
};

/// φ(ℓ) with t = ℓ rescaled to [−1, 1] over the label grid: (t) or (t, t², …, tᵖ).
inline Vector regression_phi(const RegressionSpec& s, double label) {
  const double span = s.label_step * static_cast<double>(s.values - 1);
  const double t = span > 0.0 ? 2.0 * (label - s.label_min) / span - 1.0 : 0.0;
  Vector phi(s.phi_dims());
  double p = 1.0;
  for (Index k = 0; k < phi.size(); ++k) phi[k] = (p *= t);
  return phi;
}

inline nlohmann::ordered_json spec_json(const RegressionSpec& s) {
  return {{"generator", "regression"},
          {"values", s.values},
          {"per_value", s.per_value},
          {"label_min", s.label_min},
          {"label_step", s.label_step},
          {"dims", s.dims},
          {"latent", s.latent == LatentMap::linear ? "linear" : "polynomial"},
          {"latent_dims", s.phi_dims()},
          {"nonlinearity", s.nonlinearity == Nonlinearity::tanh ? "tanh" : "none"},
          {"noise", s.noise},
          {"seed", s.seed}};
}

/// Draw order: map A row-major from stream "map" (N(0,1)/√p), offset b from
/// "offset" (0.5·N(0,1)), then noise sample by sample, coordinate by
/// coordinate from "noise" (noise·N(0,1)).
inline RegressionData gen_regression(const RegressionSpec& s) {
  require(s.values >= 2 && s.per_value >= 1, ErrorKind::parameter, "need ≥ 2 label values and ≥ 1 sample per value");
  require(s.latent_dims >= 1, ErrorKind::parameter, "latent dimension must be ≥ 1");
  require(s.dims >= s.phi_dims(), ErrorKind::parameter,
          "degenerate spec: I = " + std::to_string(s.dims) + " is smaller than the latent dimension " +
              std::to_string(s.phi_dims()));
  require(s.noise >= 0.0 && s.label_step > 0.0, ErrorKind::parameter, "noise must be ≥ 0 and label step > 0");
  const Index p = s.phi_dims();
  RegressionData d;
  CounterRng map_rng(CounterRng::derive(s.seed, "map"));
  d.map.resize(s.dims, p);
  for (Index i = 0; i < s.dims; ++i)
    for (Index k = 0; k < p; ++k) d.map(i, k) = map_rng.normal() / std::sqrt(static_cast<double>(p));
  CounterRng off_rng(CounterRng::derive(s.seed, "offset"));
  d.offset.resize(s.dims);
  for (Index i = 0; i < s.dims; ++i) d.offset[i] = 0.5 * off_rng.normal();

  CounterRng noise_rng(CounterRng::derive(s.seed, "noise"));
  const Index n = s.samples();
  d.x.resize(s.dims, n);
  d.labels.resize(n);
  for (Index c = 0; c < n; ++c) {
    const double label = s.label_min + s.label_step * static_cast<double>(c / s.per_value);
    d.labels[c] = label;
    Vector x = d.map * regression_phi(s, label) + d.offset;
    if (s.nonlinearity == Nonlinearity::tanh) x = x.array().tanh().matrix();
    for (Index i = 0; i < s.dims; ++i) x[i] += s.noise * noise_rng.normal();
    d.x.col(c) = x;
  }

  d.metadata = spec_json(s);
  d.metadata["map_row_major"] = std::vector<double>(d.map.size());
  for (Index i = 0; i < s.dims; ++i)
    for (Index k = 0; k < p; ++k) d.metadata["map_row_major"][static_cast<std::size_t>(i * p + k)] = d.map(i, k);
  d.metadata["offset"] = std::vector<double>(d.offset.data(), d.offset.data() + d.offset.size());
  return d;
}

struct ClassificationSpec {
  Index classes = 8;   // C, a power of two
  Index per_class = 8;
  Index dims = 10;
  double spread = 5.0; // centroid coordinates ~ spread·N(0,1)
  double noise = 1.0;  // within-class deviation
  std::uint64_t seed = 1;

  Index samples() const { return classes * per_class; }
};

struct ClassificationData {
  Matrix x;                     // I×N, class-major
  std::vector<Index> class_ids; // sample n belongs to class n / per_class
  Matrix centroids;             // I×C
  nlohmann::ordered_json metadata;
};

inline nlohmann::ordered_json spec_json(const ClassificationSpec& s) {
  return {{"generator", "classification"}, {"classes", s.classes}, {"per_class", s.per_class},
          {"dims", s.dims},                {"spread", s.spread},   {"noise", s.noise},
          {"seed", s.seed}};
}

/// Draw order: centroids class by class from stream "centroids", then noise
/// sample by sample from "noise".
inline ClassificationData gen_classification(const ClassificationSpec& s) {
  require(s.classes >= 2 && (s.classes & (s.classes - 1)) == 0, ErrorKind::parameter,
          "class count must be a power of two ≥ 2");
  require(s.per_class >= 2, ErrorKind::parameter, "need at least 2 samples per class");
  require(s.dims >= 1 && s.noise >= 0.0, ErrorKind::parameter, "invalid dimensionality or noise");
  ClassificationData d;
  CounterRng crng(CounterRng::derive(s.seed, "centroids"));
  d.centroids.resize(s.dims, s.classes);
  for (Index c = 0; c < s.classes; ++c)
    for (Index i = 0; i < s.dims; ++i) d.centroids(i, c) = s.spread * crng.normal();
  CounterRng nrng(CounterRng::derive(s.seed, "noise"));
  d.x.resize(s.dims, s.samples());
  for (Index n = 0; n < s.samples(); ++n) {
    const Index c = n / s.per_class;
    d.class_ids.push_back(c);
    for (Index i = 0; i < s.dims; ++i) d.x(i, n) = d.centroids(i, c) + s.noise * nrng.normal();
  }
  d.metadata = spec_json(s);
  return d;
}

/// Indicator features: column n is e_n (I = N).
inline Matrix one_hot_features(Index n) { return Matrix::Identity(n, n); }

}  // namespace gsfa
