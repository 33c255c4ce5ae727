#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gsfa/graph.hpp"

namespace gsfa {

enum class ExpansionKind { identity, zero_eight_expo, quadratic, polynomial };

struct ExpansionSpec {
  ExpansionKind kind = ExpansionKind::identity;
  int degree = 1;  // polynomial only

  static ExpansionSpec identity() { return {}; }
  static ExpansionSpec zero_eight_expo() { return {ExpansionKind::zero_eight_expo, 1}; }
  static ExpansionSpec quadratic() { return {ExpansionKind::quadratic, 2}; }
  static ExpansionSpec polynomial(int degree) { return {ExpansionKind::polynomial, degree}; }

  bool operator==(const ExpansionSpec&) const = default;
};

inline constexpr int kMaxPolynomialDegree = 6;

inline std::string to_string(const ExpansionSpec& s) {
  switch (s.kind) {
    case ExpansionKind::identity: return "identity";
    case ExpansionKind::zero_eight_expo: return "0.8expo";
    case ExpansionKind::quadratic: return "quadratic";
    case ExpansionKind::polynomial: return "poly" + std::to_string(s.degree);
  }
  return "?";
}

inline ExpansionSpec parse_expansion(const std::string& name) {
  if (name == "identity" || name == "linear") return ExpansionSpec::identity();
  if (name == "0.8expo" || name == "zero_eight_expo") return ExpansionSpec::zero_eight_expo();
  if (name == "quadratic") return ExpansionSpec::quadratic();
  if (name.rfind("poly", 0) == 0) {
    std::size_t pos = 0;
    const std::string digits = name.substr(4);
    int d = 0;
    try {
      d = std::stoi(digits, &pos);
    } catch (const std::exception&) {
      fail(ErrorKind::parameter, "bad polynomial expansion '" + name + "'");
    }
    require(pos == digits.size(), ErrorKind::parameter, "bad polynomial expansion '" + name + "'");
    return ExpansionSpec::polynomial(d);
  }
  fail(ErrorKind::parameter, "unknown expansion '" + name + "'");
}

namespace detail {
inline void validate(const ExpansionSpec& s) {
  if (s.kind == ExpansionKind::polynomial) {
    require(s.degree >= 1, ErrorKind::parameter, "polynomial degree must be ≥ 1");
    require(s.degree <= kMaxPolynomialDegree, ErrorKind::parameter,
            "polynomial degree " + std::to_string(s.degree) + " exceeds the maximum of 6");
  }
}

inline int degree_of(const ExpansionSpec& s) {
  switch (s.kind) {
    case ExpansionKind::quadratic: return 2;
    case ExpansionKind::polynomial: return s.degree;
    default: return 1;
  }
}

/// Non-decreasing index tuples of each degree 1…d, lexicographic within degree.
inline std::vector<std::vector<Index>> monomials(Index dims, int degree) {
  std::vector<std::vector<Index>> out;
  std::vector<Index> cur;
  auto rec = [&](auto&& self, int k, Index start) -> void {
    if (static_cast<int>(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (Index i = start; i < dims; ++i) {
      cur.push_back(i);
      self(self, k, i);
      cur.pop_back();
    }
  };
  for (int k = 1; k <= degree; ++k) rec(rec, k, 0);
  return out;
}

inline Index binomial(Index n, Index k) {
  long double r = 1;
  for (Index i = 1; i <= k; ++i) r = r * static_cast<long double>(n - k + i) / static_cast<long double>(i);
  return static_cast<Index>(r + 0.5L);
}
}  // namespace detail

/// Output dimensionality of an expansion applied to `dims` inputs.
inline Index expanded_dim(const ExpansionSpec& s, Index dims) {
  detail::validate(s);
  switch (s.kind) {
    case ExpansionKind::identity: return dims;
    case ExpansionKind::zero_eight_expo: return 2 * dims;
    default: return detail::binomial(dims + detail::degree_of(s), detail::degree_of(s)) - 1;
  }
}

/// Applies the expansion column by column. Polynomial outputs list the input
/// itself first, then higher-degree monomials in lexicographic index order.
inline Matrix expand(const Matrix& x, const ExpansionSpec& s) {
  detail::validate(s);
  require(x.allFinite(), ErrorKind::contract, "expansion input contains non-finite values");
  switch (s.kind) {
    case ExpansionKind::identity: return x;
    case ExpansionKind::zero_eight_expo: {
      Matrix out(2 * x.rows(), x.cols());
      out.topRows(x.rows()) = x;
      out.bottomRows(x.rows()) = x.array().abs().pow(0.8).matrix();
      return out;
    }
    default: {
      const auto terms = detail::monomials(x.rows(), detail::degree_of(s));
      Matrix out(static_cast<Index>(terms.size()), x.cols());
      for (std::size_t t = 0; t < terms.size(); ++t) {
        Eigen::RowVectorXd row = x.row(terms[t][0]);
        for (std::size_t f = 1; f < terms[t].size(); ++f) row = row.cwiseProduct(x.row(terms[t][f]));
        out.row(static_cast<Index>(t)) = row;
      }
      return out;
    }
  }
}

}  // namespace gsfa
