#pragma once

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

// Certified lower bounds for the exponent delta_{k,d}: the largest delta
// such that any n points in the unit d-cube contain k+1 points spanning a
// simplex of volume O(n^{-delta}). Bounds combine three base rules with the
// split recursion delta_{k,d} >= delta_{l,d} + delta_{k-l-1,d-l-1}. All
// arithmetic is exact rational; doubles appear only in the log-bound and
// induction-step reports, which carry explicit margins.

namespace minsimplex {

using Rational = boost::multiprecision::cpp_rational;

// Semantics: delta >= q - c*eps for every eps > 0, where c counts uses of
// the 8/7 - eps planar base bound. Comparison is by q first; equal q prefers
// fewer eps terms.
struct ExponentBound {
  Rational q = 0;
  unsigned eps_coeff = 0;

  friend bool operator==(const ExponentBound& a, const ExponentBound& b) {
    return a.q == b.q && a.eps_coeff == b.eps_coeff;
  }
  friend ExponentBound operator+(const ExponentBound& a, const ExponentBound& b) {
    return {a.q + b.q, a.eps_coeff + b.eps_coeff};
  }
};

inline bool better(const ExponentBound& a, const ExponentBound& b) {
  if (a.q != b.q) return a.q > b.q;
  return a.eps_coeff < b.eps_coeff;
}

inline std::string format_rational(const Rational& q) {
  return numerator(q).str() + "/" + denominator(q).str();
}

inline std::string format_bound(const ExponentBound& b) {
  std::string s = format_rational(b.q);
  if (b.eps_coeff == 1) s += " - eps";
  else if (b.eps_coeff > 1) s += " - " + std::to_string(b.eps_coeff) + "*eps";
  return s;
}

enum class Rule { BasePacking, BaseLefmann, BaseKps, Recursion };

struct Derivation {
  Rule rule = Rule::BasePacking;
  int split_l = -1;  // meaningful only for Rule::Recursion
};

inline std::string rule_name(const Derivation& der) {
  switch (der.rule) {
    case Rule::BasePacking: return "base-packing";
    case Rule::BaseLefmann: return "base-lefmann";
    case Rule::BaseKps: return "base-kps";
    case Rule::Recursion: return "recursion(" + std::to_string(der.split_l) + ")";
  }
  return "?";
}

// Best base rule at (k,d): the packing bound k/d, its odd-k refinement, and
// the planar 8/7 - eps bound at (2,2).
inline ExponentBound base_bound(int k, int d) {
  if (d < 1) throw std::invalid_argument("base_bound: d must be >= 1");
  if (k < 0 || k > d) throw std::invalid_argument("base_bound: need 0 <= k <= d");
  if (k == 0) return {Rational(0), 0};
  ExponentBound best{Rational(k, d), 0};
  if (k % 2 == 1 && d >= 2) {
    ExponentBound lef{Rational(k, d) + Rational(k - 1, 2LL * d * (d - 1)), 0};
    if (better(lef, best)) best = lef;
  }
  if (k == 2 && d == 2) {
    ExponentBound kps{Rational(8, 7), 1};
    if (better(kps, best)) best = kps;
  }
  return best;
}

struct TableEntry {
  ExponentBound bound;
  Derivation derivation;
};

class BoundTable {
 public:
  explicit BoundTable(int max_dim) : D_(max_dim), rows_(static_cast<size_t>(max_dim) + 1) {
    for (int d = 0; d <= max_dim; ++d) rows_[static_cast<size_t>(d)].resize(static_cast<size_t>(d) + 1);
  }

  int max_dim() const { return D_; }
  bool contains(int k, int d) const { return d >= 0 && d <= D_ && k >= 0 && k <= d; }
  const TableEntry& at(int k, int d) const {
    if (!contains(k, d))
      throw std::out_of_range("BoundTable: no entry (" + std::to_string(k) + "," +
                              std::to_string(d) + ")");
    return rows_[static_cast<size_t>(d)][static_cast<size_t>(k)];
  }
  TableEntry& at(int k, int d) {
    return const_cast<TableEntry&>(static_cast<const BoundTable&>(*this).at(k, d));
  }

 private:
  int D_;
  std::vector<std::vector<TableEntry>> rows_;
};

namespace detail {

// All rules applicable at (k,d), in tie-break order: base rules first, then
// splits by increasing l.
inline std::vector<Derivation> candidate_rules(int k, int d) {
  std::vector<Derivation> rules;
  rules.push_back({Rule::BasePacking, -1});
  if (k % 2 == 1 && k >= 1 && d >= 2) rules.push_back({Rule::BaseLefmann, -1});
  if (k == 2 && d == 2) rules.push_back({Rule::BaseKps, -1});
  for (int l = 0; l < k; ++l) rules.push_back({Rule::Recursion, l});
  return rules;
}

}  // namespace detail

// Recomputes the value a derivation claims from its children; the stored
// bound must reproduce exactly.
inline ExponentBound evaluate_derivation(const Derivation& der, int k, int d,
                                         const BoundTable& table) {
  switch (der.rule) {
    case Rule::BasePacking:
      return k == 0 ? ExponentBound{Rational(0), 0} : ExponentBound{Rational(k, d), 0};
    case Rule::BaseLefmann:
      return {Rational(k, d) + Rational(k - 1, 2LL * d * (d - 1)), 0};
    case Rule::BaseKps:
      return {Rational(8, 7), 1};
    case Rule::Recursion: {
      int l = der.split_l;
      return table.at(l, d).bound + table.at(k - l - 1, d - l - 1).bound;
    }
  }
  throw std::logic_error("evaluate_derivation: bad rule");
}

// Fills every cell 0 <= k <= d <= D in increasing k, so each recursion child
// (smaller k) is already final. One pass is the fixed point: no cell depends
// on a cell with equal or larger k.
inline BoundTable dp_table(int D) {
  if (D < 1) throw std::invalid_argument("dp_table: D must be >= 1");
  BoundTable table(D);
  for (int d = 0; d <= D; ++d) table.at(0, d) = {{Rational(0), 0}, {Rule::BasePacking, -1}};
  for (int k = 1; k <= D; ++k) {
    for (int d = k; d <= D; ++d) {
      TableEntry best;
      bool have = false;
      for (const Derivation& der : detail::candidate_rules(k, d)) {
        ExponentBound val = evaluate_derivation(der, k, d, table);
        if (!have || better(val, best.bound)) {
          best = {val, der};
          have = true;
        }
      }
      table.at(k, d) = best;
    }
  }
  return table;
}

struct CandidateEval {
  Derivation derivation;
  ExponentBound bound;
};

// Every applicable rule at (k,d) with its value, best first; ties keep base
// rules ahead of splits and splits in increasing l. The front entry matches
// the table's stored derivation and bound.
inline std::vector<CandidateEval> best_split(int k, int d, const BoundTable& table) {
  if (!table.contains(k, d))
    throw std::out_of_range("best_split: cell outside table");
  std::vector<CandidateEval> evals;
  for (const Derivation& der : detail::candidate_rules(k, d))
    evals.push_back({der, evaluate_derivation(der, k, d, table)});
  std::stable_sort(evals.begin(), evals.end(),
                   [](const CandidateEval& a, const CandidateEval& b) {
                     return better(a.bound, b.bound);
                   });
  return evals;
}

struct LogBoundEntry {
  int d = 0;
  double lhs = 0.0;    // table value q(d,d) rounded to double
  double rhs = 0.0;    // ln d - 6 + 10/sqrt(d)
  double margin = 0.0;
  bool pass = false;
};

struct LogBoundReport {
  std::string note;
  std::vector<LogBoundEntry> entries;
  bool all_pass = true;
};

// Verifies q(d,d) >= ln d - 6 + 10/sqrt(d) over [max(d_min,3), d_max]. The
// right side is evaluated in double precision and the pass condition demands
// a margin above 1e-9, absorbing both rounding and any fixed small eps.
inline LogBoundReport check_log_bound(const BoundTable& table, int d_min, int d_max) {
  if (d_max > table.max_dim())
    throw std::invalid_argument("check_log_bound: d_max exceeds table dimension");
  LogBoundReport report;
  report.note = "log denotes the natural logarithm; claim applies for d >= 3";
  for (int d = std::max(d_min, 3); d <= d_max; ++d) {
    LogBoundEntry e;
    e.d = d;
    e.lhs = static_cast<double>(table.at(d, d).bound.q);
    e.rhs = std::log(static_cast<double>(d)) - 6.0 + 10.0 / std::sqrt(static_cast<double>(d));
    e.margin = e.lhs - e.rhs;
    e.pass = e.margin > 1e-9;
    report.all_pass = report.all_pass && e.pass;
    report.entries.push_back(e);
  }
  return report;
}

struct InductionStepReport {
  long long d = 0;
  long long t = 0;
  // ln(d-t) >= ln d - t/d - t^2/d^2
  double margin_log = 0.0;
  // (d-t)^{-1/2} >= d^{-1/2} + (t/2) d^{-3/2}
  double margin_sqrt = 0.0;
  // 5 t d^{-3/2} - 1/d - t^2/d^2 >= 0
  double margin_gain = 0.0;
  bool pass = false;
};

// The three elementary inequalities behind the d -> d - t descent, checked
// pointwise; t in [sqrt(d), 2 sqrt(d)] is enforced exactly on integers.
inline InductionStepReport induction_step_check(long long d, long long t) {
  if (d <= 100) throw std::invalid_argument("induction_step_check: requires d > 100");
  if (t < 1 || t * t < d || t * t > 4 * d)
    throw std::invalid_argument("induction_step_check: t outside [sqrt(d), 2 sqrt(d)]");
  const double dd = static_cast<double>(d);
  const double tt = static_cast<double>(t);
  InductionStepReport r;
  r.d = d;
  r.t = t;
  r.margin_log = std::log(dd - tt) - (std::log(dd) - tt / dd - tt * tt / (dd * dd));
  r.margin_sqrt =
      1.0 / std::sqrt(dd - tt) - 1.0 / std::sqrt(dd) - 0.5 * tt / (dd * std::sqrt(dd));
  r.margin_gain = 5.0 * tt / (dd * std::sqrt(dd)) - 1.0 / dd - tt * tt / (dd * dd);
  r.pass = r.margin_log > 0.0 && r.margin_sqrt > 0.0 && r.margin_gain > 0.0;
  return r;
}

}  // namespace minsimplex
