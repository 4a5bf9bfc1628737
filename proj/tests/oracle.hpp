#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "minsimplex/geometry.hpp"
#include "minsimplex/pointset.hpp"

// Independent re-implementations used to cross-check the library: volumes are
// products of extended-precision Jacobi SVD singular values (the library uses
// a double-precision pivoted QR), and subsets are enumerated with an odometer
// instead of DFS. The rank clamp is part of the value contract, so the same
// relative threshold is applied here, against the SVD determinant.

namespace oracle {

using minsimplex::Vector;
using LongMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

inline double det_vol(const std::vector<Vector>& vecs) {
  const int m = static_cast<int>(vecs.size());
  if (m == 0) return 1.0;
  const int d = static_cast<int>(vecs.front().size());
  if (m > d) return 0.0;
  LongMatrix a(d, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < d; ++i) a(i, j) = static_cast<long double>(vecs[static_cast<size_t>(j)][i]);
  long double sqnorms = 1.0L;
  for (int j = 0; j < m; ++j) sqnorms *= a.col(j).squaredNorm();
  Eigen::JacobiSVD<LongMatrix> svd(a);
  long double vol = 1.0L;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) vol *= svd.singularValues()[i];
  if (vol * vol <= static_cast<long double>(minsimplex::kVolClampRel) * sqnorms) return 0.0;
  return static_cast<double>(vol);
}

inline double simplex_vol(const std::vector<Vector>& pts) {
  const int k = static_cast<int>(pts.size()) - 1;
  std::vector<Vector> edges;
  edges.reserve(static_cast<size_t>(k));
  for (int i = 1; i <= k; ++i) edges.push_back(pts[static_cast<size_t>(i)] - pts[0]);
  double v = det_vol(edges);
  for (int i = 2; i <= k; ++i) v /= i;
  return v;
}

inline bool next_combination(std::vector<int>& c, int n) {
  const int m = static_cast<int>(c.size());
  for (int i = m - 1; i >= 0; --i) {
    if (c[static_cast<size_t>(i)] < n - m + i) {
      ++c[static_cast<size_t>(i)];
      for (int j = i + 1; j < m; ++j) c[static_cast<size_t>(j)] = c[static_cast<size_t>(j - 1)] + 1;
      return true;
    }
  }
  return false;
}

struct MinResult {
  std::vector<int> indices;
  double value = std::numeric_limits<double>::infinity();
};

// Minimum det_vol over all m-subsets; odometer order is lexicographic, so
// keeping the first strict improvement realizes the lex tie-break.
inline MinResult min_subset(const std::vector<Vector>& vecs, int m) {
  const int n = static_cast<int>(vecs.size());
  std::vector<int> c(static_cast<size_t>(m));
  std::iota(c.begin(), c.end(), 0);
  MinResult best;
  do {
    std::vector<Vector> sub;
    sub.reserve(c.size());
    for (int i : c) sub.push_back(vecs[static_cast<size_t>(i)]);
    double v = det_vol(sub);
    if (v < best.value) best = {c, v};
  } while (next_combination(c, n));
  return best;
}

// Minimum simplex volume over all (k+1)-subsets of cube points: edge
// differences against the subset's smallest index, determinant divided by
// k!. Same anchor convention and clamp rule as the library's brute force,
// so the two sides agree on which subsets count as degenerate.
inline MinResult min_simplex(const std::vector<Vector>& pts, int k) {
  const int n = static_cast<int>(pts.size());
  double fact = 1.0;
  for (int i = 2; i <= k; ++i) fact *= i;
  std::vector<int> c(static_cast<size_t>(k) + 1);
  std::iota(c.begin(), c.end(), 0);
  MinResult best;
  do {
    std::vector<Vector> edges;
    edges.reserve(c.size() - 1);
    for (size_t j = 1; j < c.size(); ++j)
      edges.push_back(pts[static_cast<size_t>(c[j])] - pts[static_cast<size_t>(c[0])]);
    double v = det_vol(edges) / fact;
    if (v < best.value) best = {c, v};
  } while (next_combination(c, n));
  return best;
}

}  // namespace oracle
