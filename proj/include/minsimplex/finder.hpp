#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "minsimplex/errors.hpp"
#include "minsimplex/geometry.hpp"
#include "minsimplex/lifting.hpp"
#include "minsimplex/pointset.hpp"

// Minimum-determinant tuple search.
//
// Brute force enumerates index combinations in lexicographic order while
// maintaining an orthonormal basis of the chosen prefix; the running product
// of residual norms equals the prefix volume. The recursive strategy picks a
// small (l+1)-tuple, projects the remaining points onto the orthogonal
// complement of its span, renormalizes them back to unit length, and recurses
// for the other k-l points. Renormalization only lengthens vectors, so
//   Vol_{k+1}(union) = Vol_{l+1}(stage 1) * Vol_{k-l}(projected stage 2)
//                   <= Vol_{l+1}(stage 1) * Vol_{k-l}(renormalized stage 2),
// which is the certified product bound checked at runtime on every result.

namespace minsimplex {

// Default cap on enumerated tuples for one brute-force call.
inline constexpr std::int64_t kDefaultBudget = 50'000'000;

// A projected vector of norm below this aborts the recursion as degenerate.
inline constexpr double kProjCollapseTol = 1e-10;

// Relative slack allowed when asserting the product certificate.
inline constexpr double kCertSlack = 1e-9;

struct StageRecord {
  int split_l = 0;
  std::vector<int> sub_indices;  // original point indices of this stage
  double value = 0.0;            // stage volume in its own (projected) space
};

struct SimplexSelection {
  std::vector<int> indices;  // sorted, distinct
  double value = 0.0;        // achieved determinant / simplex volume
  double certified_bound = 0.0;  // upper bound implied by the stages
  std::vector<StageRecord> certificate;

  double certificate_product() const {
    if (certificate.empty()) return value;
    double p = 1.0;
    for (const StageRecord& s : certificate) p *= s.value;
    return p;
  }
};

// Split choices per recursion level along the stage-2 spine. An exhausted
// fixed list (or a stage-1 sub-search) falls back to exhaustive splits.
class SplitSchedule {
 public:
  static SplitSchedule Exhaustive() { return SplitSchedule(true, {}); }
  static SplitSchedule Fixed(std::vector<int> splits) {
    return SplitSchedule(false, std::move(splits));
  }

  bool exhaustive() const { return exhaustive_ || splits_.empty(); }
  int head(int k) const {
    int l = splits_.front();
    if (l < 0 || l >= k)
      throw std::invalid_argument("schedule split " + std::to_string(l) +
                                  " out of range for k=" + std::to_string(k));
    return l;
  }
  SplitSchedule tail() const {
    if (exhaustive()) return Exhaustive();
    return Fixed(std::vector<int>(splits_.begin() + 1, splits_.end()));
  }
  const std::vector<int>& splits() const { return splits_; }

 private:
  SplitSchedule(bool ex, std::vector<int> s) : exhaustive_(ex), splits_(std::move(s)) {}
  bool exhaustive_;
  std::vector<int> splits_;
};

namespace detail {

// C(n, m) saturated at `cap`.
inline std::int64_t binomial_capped(int n, int m, std::int64_t cap) {
  if (m < 0 || m > n) return 0;
  m = std::min(m, n - m);
  __int128 r = 1;
  for (int i = 1; i <= m; ++i) {
    r = r * (n - m + i) / i;  // partial products are exact integers
    if (r > cap) return cap + 1;
  }
  return static_cast<std::int64_t>(r);
}

struct MinSubsetResult {
  std::vector<int> indices;
  double value = 0.0;
};

// Exact minimizer of the volume over all m-subsets, ties broken toward the
// lexicographically smallest index tuple. Complete subsets get the same
// rank clamp as vol_k, so a dependent tuple reports exactly 0. The first
// zero ends the search: nothing not yet visited can beat it, and everything
// not yet visited is lexicographically larger. A prefix of volume exactly
// zero short-circuits the same way via its smallest completion.
//
// The optional aggressive mode also skips prefixes whose volume exceeds the
// incumbent by the factor dim^{m/2}. Large prefixes can still complete to
// tiny volumes, so this is a heuristic; it is never used by the oracles.
class SubsetMinimizer {
 public:
  SubsetMinimizer(const std::vector<Vector>& vecs, int m, bool aggressive)
      : vecs_(vecs),
        n_(static_cast<int>(vecs.size())),
        m_(m),
        aggressive_(aggressive),
        prune_factor_(std::pow(static_cast<double>(vecs.front().size()), 0.5 * m)),
        q_(vecs.front().size(), m),
        sqnorm_(vecs.size()),
        chosen_(static_cast<size_t>(m)),
        volume_(static_cast<size_t>(m) + 1),
        normprod_(static_cast<size_t>(m) + 1) {
    for (size_t i = 0; i < vecs.size(); ++i) sqnorm_[i] = vecs[i].squaredNorm();
  }

  MinSubsetResult run() {
    volume_[0] = 1.0;
    normprod_[0] = 1.0;
    descend(0, 0);
    return {best_indices_, best_value_};
  }

 private:
  void descend(int level, int start) {
    if (level == m_) {
      double vol = volume_[static_cast<size_t>(m_)];
      if (vol * vol <= kVolClampRel * normprod_[static_cast<size_t>(m_)]) vol = 0.0;
      if (vol < best_value_) {
        best_value_ = vol;
        best_indices_ = chosen_;
        if (vol == 0.0) stop_ = true;
      }
      return;
    }
    for (int i = start; i <= n_ - (m_ - level) && !stop_; ++i) {
      Vector r = vecs_[static_cast<size_t>(i)];
      if (level > 0) {
        auto qb = q_.leftCols(level);
        r -= qb * (qb.transpose() * r);
        r -= qb * (qb.transpose() * r);
      }
      double nr = r.norm();
      double vol = volume_[static_cast<size_t>(level)] * nr;
      chosen_[static_cast<size_t>(level)] = i;
      if (vol == 0.0) {
        for (int j = level + 1; j < m_; ++j) chosen_[static_cast<size_t>(j)] = i + j - level;
        if (0.0 < best_value_) {
          best_value_ = 0.0;
          best_indices_ = chosen_;
        }
        stop_ = true;
        return;
      }
      if (aggressive_ && vol > best_value_ * prune_factor_) continue;
      q_.col(level) = r / nr;
      volume_[static_cast<size_t>(level) + 1] = vol;
      normprod_[static_cast<size_t>(level) + 1] =
          normprod_[static_cast<size_t>(level)] * sqnorm_[static_cast<size_t>(i)];
      descend(level + 1, i + 1);
    }
  }

  const std::vector<Vector>& vecs_;
  int n_, m_;
  bool aggressive_;
  double prune_factor_;
  Eigen::MatrixXd q_;
  std::vector<double> sqnorm_;
  std::vector<int> chosen_;
  std::vector<double> volume_;
  std::vector<double> normprod_;
  std::vector<int> best_indices_;
  double best_value_ = std::numeric_limits<double>::infinity();
  bool stop_ = false;
};

inline MinSubsetResult min_subset_volume(const std::vector<Vector>& vecs, int m,
                                         std::int64_t budget, bool aggressive = false) {
  const int n = static_cast<int>(vecs.size());
  if (m < 1) throw std::invalid_argument("subset size must be >= 1");
  if (m > n) throw std::invalid_argument("subset size exceeds point count");
  if (binomial_capped(n, m, budget) > budget)
    throw BudgetExceededError("C(" + std::to_string(n) + "," + std::to_string(m) +
                              ") exceeds the enumeration budget; use the recursive strategy");
  return SubsetMinimizer(vecs, m, aggressive).run();
}

}  // namespace detail

// Exact mode visits every combination; aggressive mode additionally drops
// large prefixes and may miss the true minimum.
enum class PruneMode { Exact, Aggressive };

// Exact minimum-determinant m-subset of a unit-sphere point set.
inline SimplexSelection brute_force_min_determinant(const PointSet& y_set, int m,
                                                    std::int64_t budget = kDefaultBudget,
                                                    PruneMode prune = PruneMode::Exact) {
  if (y_set.space_tag != SpaceTag::UnitSphere)
    throw std::invalid_argument("brute_force_min_determinant: input must be a unit-sphere set");
  validate_point_set(y_set);
  if (m > y_set.dim)
    throw std::invalid_argument("brute_force_min_determinant: m exceeds ambient dimension");
  auto res = detail::min_subset_volume(y_set.points, m, budget, prune == PruneMode::Aggressive);
  SimplexSelection sel;
  sel.indices = std::move(res.indices);
  sel.value = res.value;
  sel.certified_bound = res.value;
  return sel;
}

// Exact minimum-volume k-simplex (k+1 points) of a unit-cube point set.
// Subsets are grouped by their smallest index, the anchor; the k edge
// differences against the anchor feed the same enumerator as the sphere
// case. Ascending anchors keep the global tie-break lexicographic.
inline SimplexSelection brute_force_min_simplex(const PointSet& x_set, int k,
                                                std::int64_t budget = kDefaultBudget,
                                                PruneMode prune = PruneMode::Exact) {
  if (x_set.space_tag != SpaceTag::UnitCube)
    throw std::invalid_argument("brute_force_min_simplex: input must be a unit-cube set");
  validate_point_set(x_set);
  if (k < 1 || k > x_set.dim)
    throw std::invalid_argument("brute_force_min_simplex: need 1 <= k <= d");
  const int n = x_set.size();
  if (n < k + 1)
    throw std::invalid_argument("brute_force_min_simplex: need at least k+1 points");
  if (detail::binomial_capped(n, k + 1, budget) > budget)
    throw BudgetExceededError("C(" + std::to_string(n) + "," + std::to_string(k + 1) +
                              ") exceeds the enumeration budget; use the recursive strategy");
  SimplexSelection sel;
  sel.value = std::numeric_limits<double>::infinity();
  for (int a = 0; a + k < n; ++a) {
    std::vector<Vector> edges;
    edges.reserve(static_cast<size_t>(n - 1 - a));
    for (int i = a + 1; i < n; ++i)
      edges.push_back(x_set.points[static_cast<size_t>(i)] - x_set.points[static_cast<size_t>(a)]);
    auto res = detail::SubsetMinimizer(edges, k, prune == PruneMode::Aggressive).run();
    if (res.value < sel.value) {
      sel.value = res.value;
      sel.indices.assign(1, a);
      for (int j : res.indices) sel.indices.push_back(a + 1 + j);
      if (sel.value == 0.0) break;
    }
  }
  double fact = 1.0;
  for (int i = 2; i <= k; ++i) fact *= i;
  sel.value /= fact;
  sel.certified_bound = sel.value;
  return sel;
}

namespace detail {

inline std::uint64_t hash_point_set(const PointSet& ps) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ static_cast<std::uint64_t>(ps.dim);
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 0x100000001b3ULL;
    h = splitmix64(h);
  };
  mix(static_cast<std::uint64_t>(ps.size()));
  for (const Vector& p : ps.points)
    for (int j = 0; j < p.size(); ++j) {
      std::uint64_t bits;
      double d = p[j];
      static_assert(sizeof(bits) == sizeof(d));
      __builtin_memcpy(&bits, &d, sizeof(bits));
      mix(bits);
    }
  return h;
}

inline std::uint64_t hash_schedule(const SplitSchedule& sched) {
  if (sched.exhaustive()) return 0x65786800ULL;
  std::uint64_t h = 0x66697800ULL;
  for (int l : sched.splits()) h = splitmix64(h ^ static_cast<std::uint64_t>(l + 1));
  return h;
}

struct FinderContext {
  std::int64_t budget;
  // memo key -> selection; keys combine set hash, kind, size, schedule hash
  std::unordered_map<std::uint64_t, SimplexSelection> memo;
};

inline SimplexSelection find_impl(FinderContext& ctx, const PointSet& y_set, int k,
                                  const SplitSchedule& sched);

// Small (l+1)-tuple: exact enumeration when it fits the budget, otherwise
// the recursive strategy at k = l, continuing with the schedule tail.
inline SimplexSelection min_tuple(FinderContext& ctx, const PointSet& y_set, int m,
                                  std::uint64_t set_hash, const SplitSchedule& tail) {
  const bool brute = binomial_capped(y_set.size(), m, ctx.budget) <= ctx.budget;
  std::uint64_t key = splitmix64(set_hash ^ (brute ? 0xb000ULL : 0xc000ULL) ^
                                 (static_cast<std::uint64_t>(m) << 32) ^ hash_schedule(tail));
  auto it = ctx.memo.find(key);
  if (it != ctx.memo.end()) return it->second;
  SimplexSelection sel;
  if (brute) {
    auto res = min_subset_volume(y_set.points, m, ctx.budget);
    sel.indices = std::move(res.indices);
    sel.value = res.value;
    sel.certified_bound = res.value;
  } else {
    sel = find_impl(ctx, y_set, m - 1, tail);
  }
  ctx.memo.emplace(key, sel);
  return sel;
}

inline SimplexSelection find_impl(FinderContext& ctx, const PointSet& y_set, int k,
                                  const SplitSchedule& sched) {
  const int n = y_set.size();
  if (k == 0) {
    // Every candidate is a unit vector up to rounding, so the norms cannot
    // discriminate and an argmin over them would follow projector noise.
    // The coordinatewise-lexicographic minimum depends only on the point
    // values, which keeps the choice stable under input permutation.
    SimplexSelection sel;
    int best = 0;
    for (int i = 1; i < n; ++i) {
      const Vector& a = y_set.points[static_cast<size_t>(i)];
      const Vector& b = y_set.points[static_cast<size_t>(best)];
      if (std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(),
                                       b.data() + b.size()))
        best = i;
    }
    sel.indices = {best};
    sel.value = y_set.points[static_cast<size_t>(best)].norm();
    sel.certified_bound = sel.value;
    return sel;
  }

  const std::uint64_t set_hash = hash_point_set(y_set);
  std::vector<int> split_choices;
  if (sched.exhaustive()) {
    split_choices.resize(static_cast<size_t>(k));
    for (int l = 0; l < k; ++l) split_choices[static_cast<size_t>(l)] = l;
  } else {
    split_choices = {sched.head(k)};
  }

  std::optional<SimplexSelection> best;
  double best_product = std::numeric_limits<double>::infinity();
  for (int l : split_choices) {
    SimplexSelection stage1 = min_tuple(ctx, y_set, l + 1, set_hash, sched.tail());
    if (stage1.value == 0.0)
      throw DegenerateInputError(
          "recursive_find: stage-1 tuple is numerically dependent; perturb and retry");

    std::vector<Vector> basis;
    basis.reserve(stage1.indices.size());
    for (int i : stage1.indices) basis.push_back(y_set.points[static_cast<size_t>(i)]);
    ComplementProjector proj(basis);

    PointSet projected;
    projected.space_tag = SpaceTag::UnitSphere;
    projected.dim = y_set.dim;
    std::vector<int> rest_map;
    rest_map.reserve(static_cast<size_t>(n) - stage1.indices.size());
    for (int i = 0; i < n; ++i) {
      if (std::binary_search(stage1.indices.begin(), stage1.indices.end(), i)) continue;
      Vector p = proj.apply(y_set.points[static_cast<size_t>(i)]);
      double np = p.norm();
      if (np < kProjCollapseTol)
        throw DegenerateInputError(
            "recursive_find: projection collapsed (general-position failure); perturb and retry");
      projected.points.push_back(p / np);
      rest_map.push_back(i);
    }

    SimplexSelection stage2 = find_impl(ctx, projected, k - l - 1, sched.tail());
    if (stage2.value == 0.0)
      throw DegenerateInputError(
          "recursive_find: projected stage-2 tuple is numerically dependent; perturb and retry");

    std::vector<int> stage2_orig;
    stage2_orig.reserve(stage2.indices.size());
    for (int i : stage2.indices) stage2_orig.push_back(rest_map[static_cast<size_t>(i)]);

    std::vector<int> all = stage1.indices;
    all.insert(all.end(), stage2_orig.begin(), stage2_orig.end());
    std::sort(all.begin(), all.end());

    std::vector<Vector> chosen;
    chosen.reserve(all.size());
    for (int i : all) chosen.push_back(y_set.points[static_cast<size_t>(i)]);
    double value = vol_k(chosen).value;
    double product = stage1.value * stage2.value;
    if (value > product * (1.0 + kCertSlack) + 1e-300)
      throw std::logic_error("recursive_find: product certificate violated");

    SimplexSelection cand;
    cand.indices = std::move(all);
    cand.value = value;
    cand.certified_bound = product;
    cand.certificate = {{l, stage1.indices, stage1.value}, {l, stage2_orig, stage2.value}};

    if (!best || product < best_product ||
        (product == best_product && cand.indices < best->indices)) {
      best_product = product;
      best = std::move(cand);
    }
  }
  return *best;
}

}  // namespace detail

// Recursive small-determinant search for k+1 unit vectors of Y. The stage-1
// tuple is enumerated exactly whenever C(n, l+1) fits `base_budget`; in
// exhaustive mode every split l in [0, k) is tried at each level and the
// smallest certified product is kept.
inline SimplexSelection recursive_find(const PointSet& y_set, int k,
                                       const SplitSchedule& schedule,
                                       std::int64_t base_budget = kDefaultBudget) {
  if (y_set.space_tag != SpaceTag::UnitSphere)
    throw std::invalid_argument("recursive_find: input must be a unit-sphere set");
  validate_point_set(y_set);
  if (k < 0 || k > y_set.dim - 1)
    throw std::invalid_argument("recursive_find: need 0 <= k <= sphere dimension");
  if (y_set.size() <= k)
    throw std::invalid_argument("recursive_find: need more than k points");
  detail::FinderContext ctx{base_budget, {}};
  return detail::find_impl(ctx, y_set, k, schedule);
}

// Cube-side driver: lift, search on the sphere, report the true simplex
// volume of the selected original points next to the sphere-side
// certificate. certified_bound is calibrated back to the cube by the norm
// factors of the selected points divided by k!; the affine-hull anchor
// factor it ignores is >= 1, so the bound stays an upper bound.
inline SimplexSelection find_small_simplex(const PointSet& x_set, int k,
                                           const SplitSchedule& schedule,
                                           std::int64_t base_budget = kDefaultBudget) {
  if (x_set.space_tag != SpaceTag::UnitCube)
    throw std::invalid_argument("find_small_simplex: input must be a unit-cube set");
  validate_point_set(x_set);
  if (k < 1 || k > x_set.dim)
    throw std::invalid_argument("find_small_simplex: need 1 <= k <= d");
  if (x_set.size() <= k)
    throw std::invalid_argument("find_small_simplex: need more than k points");
  LiftResult lift = lift_to_sphere(x_set);
  SimplexSelection sphere_sel = recursive_find(lift.sphere_points, k, schedule, base_budget);

  std::vector<Vector> chosen;
  chosen.reserve(sphere_sel.indices.size());
  double factor_product = 1.0;
  for (int i : sphere_sel.indices) {
    chosen.push_back(x_set.points[static_cast<size_t>(i)]);
    factor_product *= lift.norm_factors[static_cast<size_t>(i)];
  }
  double fact = 1.0;
  for (int i = 2; i <= k; ++i) fact *= i;

  SimplexSelection sel;
  sel.indices = sphere_sel.indices;
  sel.value = simplex_volume(chosen).value;
  sel.certified_bound = sphere_sel.certified_bound * factor_product / fact;
  sel.certificate = std::move(sphere_sel.certificate);
  return sel;
}

// Line-oriented record: `k value idx_1 ... idx_{k+1}` followed by one
// `stage l stage_value sub_indices...` line per certificate stage.
inline std::string format_selection(const SimplexSelection& sel, int k) {
  std::ostringstream os;
  os << k << ' ' << format_real17(sel.value);
  for (int i : sel.indices) os << ' ' << i;
  os << '\n';
  for (const StageRecord& s : sel.certificate) {
    os << "stage " << s.split_l << ' ' << format_real17(s.value);
    for (int i : s.sub_indices) os << ' ' << i;
    os << '\n';
  }
  return os.str();
}

}  // namespace minsimplex
