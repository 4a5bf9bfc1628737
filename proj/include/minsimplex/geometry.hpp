#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "minsimplex/errors.hpp"
#include "minsimplex/pointset.hpp"
#include "minsimplex/rng.hpp"

// k-dimensional volumes via Gram determinants.
//
// For vectors v_1..v_k in R^d, Vol_k(v_1..v_k) is the k-volume of the
// parallelepiped they span, equal to sqrt(det G) where G is the Gram matrix
// G_ij = <v_i, v_j>. Equivalently, with A = (v_1 ... v_k) and any QR
// factorization A = QR, Vol_k = |prod_i R_ii|. The QR route is what this
// module computes: it avoids forming G, whose determinant cancels badly for
// near-degenerate collections.

namespace minsimplex {

// Squared-volume clamp threshold, relative to the product of squared norms.
// Volumes below this are reported as exactly 0 (declared rank tolerance).
inline constexpr double kVolClampRel = 1e-12;

// A basis whose smallest singular value is below this times the largest is
// rejected as rank-deficient.
inline constexpr double kBasisRankTol = 1e-10;

// k-dimensional content together with its dimension k.
struct Volume {
  double value = 0.0;
  int k = 0;
};

namespace detail {

inline void check_vectors(const std::vector<Vector>& vectors, const char* op) {
  if (vectors.empty())
    throw std::invalid_argument(std::string(op) + ": empty input");
  const auto d = vectors.front().size();
  for (const Vector& v : vectors) {
    if (v.size() != d)
      throw std::invalid_argument(std::string(op) + ": dimension mismatch among inputs");
    if (!v.allFinite())
      throw std::invalid_argument(std::string(op) + ": non-finite coordinates");
  }
}

inline Eigen::MatrixXd to_matrix(const std::vector<Vector>& vectors) {
  Eigen::MatrixXd a(vectors.front().size(), static_cast<Eigen::Index>(vectors.size()));
  for (Eigen::Index j = 0; j < a.cols(); ++j) a.col(j) = vectors[static_cast<size_t>(j)];
  return a;
}

// |prod R_ii| of a column-pivoted QR of A; no clamping.
inline double vol_raw(const Eigen::MatrixXd& a) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::Index k = a.cols();
  double vol = 1.0;
  for (Eigen::Index i = 0; i < k; ++i) vol *= std::abs(qr.matrixR()(i, i));
  return vol;
}

}  // namespace detail

// Gram matrix (<v_i, v_j>)_{i,j}. All vectors must share one ambient
// dimension d with 1 <= k <= d.
inline Eigen::MatrixXd gram_matrix(const std::vector<Vector>& vectors) {
  detail::check_vectors(vectors, "gram_matrix");
  const Eigen::Index k = static_cast<Eigen::Index>(vectors.size());
  if (k > vectors.front().size())
    throw std::invalid_argument("gram_matrix: more vectors than ambient dimension");
  Eigen::MatrixXd g(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = i; j < k; ++j) {
      g(i, j) = vectors[static_cast<size_t>(i)].dot(vectors[static_cast<size_t>(j)]);
      g(j, i) = g(i, j);
    }
  return g;
}

// Vol_k of the collection. Squared volumes below kVolClampRel times the
// product of squared norms clamp to exactly 0, so a return of 0 certifies
// linear dependence within the rank tolerance.
inline Volume vol_k(const std::vector<Vector>& vectors) {
  detail::check_vectors(vectors, "vol_k");
  const int k = static_cast<int>(vectors.size());
  if (k > vectors.front().size())
    throw std::invalid_argument("vol_k: more vectors than ambient dimension");
  double vol = detail::vol_raw(detail::to_matrix(vectors));
  double scale = 1.0;
  for (const Vector& v : vectors) scale *= v.squaredNorm();
  if (vol * vol <= kVolClampRel * scale) vol = 0.0;
  return {vol, k};
}

// Volume of the simplex on k+1 points in R^d (k <= d):
//   (1/k!) * Vol_{k+1}((x_1,1), ..., (x_{k+1},1)).
// Edge-difference form: translation invariant for every k <= d. The
// homogeneous form (append 1, divide by k!) coincides with it only for
// k = d; below full dimension it picks up the distance from the origin to
// the affine hull and is not a volume of the simplex itself.
inline Volume simplex_volume(const std::vector<Vector>& points) {
  if (points.size() < 2)
    throw std::invalid_argument("simplex_volume: need at least 2 points");
  detail::check_vectors(points, "simplex_volume");
  const int k = static_cast<int>(points.size()) - 1;
  const auto d = points.front().size();
  if (k > d) throw std::invalid_argument("simplex_volume: k exceeds ambient dimension");
  std::vector<Vector> edges;
  edges.reserve(static_cast<size_t>(k));
  for (int i = 1; i <= k; ++i) edges.push_back(points[static_cast<size_t>(i)] - points[0]);
  double fact = 1.0;
  for (int i = 2; i <= k; ++i) fact *= i;
  return {vol_k(edges).value / fact, k};
}

namespace detail {

// Orthogonal projector onto the complement of span(basis). Built once,
// applied many times. Rejects a rank-deficient basis (smallest singular
// value below kBasisRankTol times the largest).
class ComplementProjector {
 public:
  explicit ComplementProjector(const std::vector<Vector>& basis) {
    check_vectors(basis, "project_complement");
    Eigen::MatrixXd b = to_matrix(basis);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    if (b.cols() > b.rows() || sv(sv.size() - 1) < kBasisRankTol * sv(0))
      throw DegenerateInputError("project_complement: degenerate basis");
    u_ = svd.matrixU();
  }

  // x minus its orthogonal projection onto the span; one reorthogonalization
  // pass keeps residual inner products near machine precision.
  Vector apply(const Vector& x) const {
    Vector r = x - u_ * (u_.transpose() * x);
    r -= u_ * (u_.transpose() * r);
    return r;
  }

 private:
  Eigen::MatrixXd u_;
};

}  // namespace detail

// Projection of x on the orthogonal complement of span(basis).
inline Vector project_complement(const std::vector<Vector>& basis, const Vector& x) {
  detail::ComplementProjector proj(basis);
  if (x.size() != basis.front().size())
    throw std::invalid_argument("project_complement: x dimension mismatch");
  return proj.apply(x);
}

// Haar-distributed orthogonal matrix: QR of an iid standard normal square
// matrix, columns sign-corrected by the diagonal of R. Deterministic in seed.
inline Eigen::MatrixXd random_rotation(int dim, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("random_rotation: dim must be >= 1");
  CounterRng rng(derive_seed(seed, 0x726f74ULL));
  Eigen::MatrixXd g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  for (int j = 0; j < dim; ++j)
    if (qr.matrixQR()(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

namespace detail {

// Unclamped linear-independence test via sequential orthonormalization:
// true iff every residual norm is strictly positive.
// "Nonzero determinant" at rounding-noise resolution: duplicates and exact
// dependencies leave Gram-Schmidt residuals at the eps scale, while any
// genuine separation (even 1e-9) sits orders of magnitude above this floor.
// Deliberately far below the vol_k rank clamp, which answers a different
// question (what counts as zero volume, not what counts as dependent data).
inline constexpr double kGpNoiseRel = 1e-12;

inline bool strictly_independent(const std::vector<Vector>& vectors) {
  const Eigen::Index d = vectors.front().size();
  const Eigen::Index m = static_cast<Eigen::Index>(vectors.size());
  if (m > d) return false;
  Eigen::MatrixXd q(d, m);
  Eigen::Index level = 0;
  double vol = 1.0;
  double norms = 1.0;
  for (const Vector& v : vectors) {
    Vector r = v;
    if (level > 0) {
      auto qb = q.leftCols(level);
      r -= qb * (qb.transpose() * r);
      r -= qb * (qb.transpose() * r);
    }
    double nr = r.norm();
    if (nr == 0.0) return false;
    vol *= nr;
    norms *= v.norm();
    q.col(level++) = r / nr;
  }
  return vol > kGpNoiseRel * norms;
}

}  // namespace detail

// General-position check. Cube/raw points are tested through their
// homogeneous lifts (x,1) in R^{d+1}; sphere points are tested directly.
// Every subset of at most (lifted) dimension many points must be strictly
// linearly independent. Exhaustive for n <= 16, else 10*n random subsets.
inline bool in_general_position(const PointSet& ps, std::uint64_t seed) {
  validate_point_set(ps);
  const int n = ps.size();
  if (n < 2) return true;
  const bool lift = ps.space_tag != SpaceTag::UnitSphere;
  std::vector<Vector> w;
  w.reserve(n);
  for (const Vector& p : ps.points) {
    if (lift) {
      Vector q(ps.dim + 1);
      q.head(ps.dim) = p;
      q[ps.dim] = 1.0;
      w.push_back(std::move(q));
    } else {
      w.push_back(p);
    }
  }
  const int maxm = std::min(n, lift ? ps.dim + 1 : ps.dim);
  auto subset_ok = [&](const std::vector<int>& idx) {
    std::vector<Vector> sub;
    sub.reserve(idx.size());
    for (int i : idx) sub.push_back(w[static_cast<size_t>(i)]);
    return detail::strictly_independent(sub);
  };
  if (n <= 16) {
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
      int c = std::popcount(mask);
      if (c < 2 || c > maxm) continue;
      std::vector<int> idx;
      idx.reserve(c);
      for (int i = 0; i < n; ++i)
        if (mask & (1u << i)) idx.push_back(i);
      if (!subset_ok(idx)) return false;
    }
    return true;
  }
  CounterRng rng(derive_seed(seed, 0x677063ULL));
  std::vector<int> all(static_cast<size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  for (int trial = 0; trial < 10 * n; ++trial) {
    int m = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(maxm - 1)));
    // Partial Fisher-Yates for m distinct indices.
    for (int i = 0; i < m; ++i) {
      int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
      std::swap(all[static_cast<size_t>(i)], all[static_cast<size_t>(j)]);
    }
    std::vector<int> idx(all.begin(), all.begin() + m);
    if (!subset_ok(idx)) return false;
  }
  return true;
}

// Seeded coordinate-wise perturbation of at most `magnitude`, retried with
// derived seeds until the output passes the general-position check (at most
// 100 attempts). Cube points stay inside [0,1]^d; sphere points are
// renormalized back onto the sphere after the shift.
inline PointSet perturb(const PointSet& ps, std::uint64_t seed, double magnitude) {
  if (!(magnitude > 0.0)) throw std::invalid_argument("perturb: magnitude must be > 0");
  validate_point_set(ps);
  for (int attempt = 0; attempt < 100; ++attempt) {
    CounterRng rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    PointSet out = ps;
    bool ok = true;
    for (Vector& p : out.points) {
      for (int j = 0; j < out.dim; ++j) {
        double lo = p[j] - magnitude, hi = p[j] + magnitude;
        if (ps.space_tag == SpaceTag::UnitCube) {
          lo = std::max(lo, 0.0);
          hi = std::min(hi, 1.0);
        }
        p[j] = rng.uniform(lo, hi);
      }
      if (ps.space_tag == SpaceTag::UnitSphere) {
        double nr = p.norm();
        if (nr < 1e-12) {
          ok = false;
          break;
        }
        p /= nr;
      }
    }
    if (ok && in_general_position(out, derive_seed(seed, 1000 + static_cast<std::uint64_t>(attempt))))
      return out;
  }
  throw DegenerateInputError("perturb: retry budget exhausted without reaching general position");
}

}  // namespace minsimplex
