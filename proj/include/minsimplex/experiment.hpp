#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <tuple>
#include <vector>

#include "minsimplex/errors.hpp"
#include "minsimplex/finder.hpp"
#include "minsimplex/pointset.hpp"
#include "minsimplex/rng.hpp"

// Experiment sweeps: seeded point-set generation, per-cell method runs with
// degenerate-input retries, a resumable CSV ledger, and log-log slope fits
// of the empirical minimum volume against n.

namespace minsimplex {

enum class Generator { UniformCube, UniformSphere, Grid };

inline std::string to_string(Generator g) {
  switch (g) {
    case Generator::UniformCube: return "uniform-cube";
    case Generator::UniformSphere: return "uniform-sphere";
    case Generator::Grid: return "grid";
  }
  return "?";
}

inline Generator generator_from_string(const std::string& s) {
  if (s == "uniform-cube") return Generator::UniformCube;
  if (s == "uniform-sphere") return Generator::UniformSphere;
  if (s == "grid") return Generator::Grid;
  throw std::invalid_argument("unknown generator: " + s);
}

// Deterministic in (generator, d, n, seed). The grid ignores the seed: it is
// the smallest m with m^d >= n, truncated to n points in row-major order
// (last coordinate fastest), coordinates j/(m-1).
inline PointSet generate(Generator gen, int d, int n, std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("generate: d must be >= 1");
  if (n < 1) throw std::invalid_argument("generate: n must be >= 1");
  std::vector<Vector> pts;
  pts.reserve(static_cast<size_t>(n));
  switch (gen) {
    case Generator::UniformCube: {
      CounterRng rng(derive_seed(seed, 0x63756265ULL));
      for (int i = 0; i < n; ++i) {
        Vector x(d);
        for (int j = 0; j < d; ++j) x[j] = rng.uniform01();
        pts.push_back(std::move(x));
      }
      return make_point_set(std::move(pts), SpaceTag::UnitCube);
    }
    case Generator::UniformSphere: {
      CounterRng rng(derive_seed(seed, 0x73706872ULL));
      for (int i = 0; i < n; ++i) {
        Vector x(d);
        double nn = 0.0;
        do {
          for (int j = 0; j < d; ++j) x[j] = rng.normal();
          nn = x.norm();
        } while (nn < 1e-8);
        pts.push_back(x / nn);
      }
      return make_point_set(std::move(pts), SpaceTag::UnitSphere);
    }
    case Generator::Grid: {
      int m = 1;
      auto reaches = [d, n](int side) {
        std::int64_t p = 1;
        for (int j = 0; j < d; ++j) {
          p *= side;
          if (p >= n) return true;
        }
        return p >= n;
      };
      while (!reaches(m)) ++m;
      for (int i = 0; i < n; ++i) {
        Vector x(d);
        int rem = i;
        for (int j = d - 1; j >= 0; --j) {
          int digit = rem % m;
          rem /= m;
          x[j] = m == 1 ? 0.0 : static_cast<double>(digit) / (m - 1);
        }
        pts.push_back(std::move(x));
      }
      return make_point_set(std::move(pts), SpaceTag::UnitCube);
    }
  }
  throw std::invalid_argument("generate: bad generator");
}

enum class Method { Brute, Recursive, Both };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::Brute: return "brute";
    case Method::Recursive: return "recursive";
    case Method::Both: return "both";
  }
  return "?";
}

inline Method method_from_string(const std::string& s) {
  if (s == "brute") return Method::Brute;
  if (s == "recursive") return Method::Recursive;
  if (s == "both") return Method::Both;
  throw std::invalid_argument("unknown method: " + s);
}

struct ExperimentConfig {
  int d = 2;
  int k = 2;
  std::vector<int> n_values;
  std::vector<std::uint64_t> seeds;
  Generator generator = Generator::UniformCube;
  Method method = Method::Both;
  SplitSchedule schedule = SplitSchedule::Exhaustive();
  std::string output_path;
  std::int64_t budget = kDefaultBudget;
};

// One sweep cell. A failed cell keeps its message in `error` and leaves the
// value fields absent; certificate_product is present only for recursive
// runs, where min_volume <= certificate_product within 1e-9 relative.
struct ExperimentRecord {
  int n = 0;
  int d = 0;
  int k = 0;
  std::string method;
  std::uint64_t seed = 0;
  std::optional<double> min_volume;
  std::optional<double> certificate_product;
  double wall_time_ms = 0.0;
  std::string error;

  friend bool operator==(const ExperimentRecord& a, const ExperimentRecord& b) = default;
};

inline std::string format_double_shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

inline std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

inline double parse_double_field(const std::string& s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument("bad numeric CSV field: " + s);
  return v;
}

template <typename T>
inline T parse_int_field(const std::string& s) {
  T v{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument("bad integer CSV field: " + s);
  return v;
}

}  // namespace detail

inline constexpr const char* kCsvHeader =
    "n,d,k,method,seed,min_volume,certificate_product,wall_time_ms,error";

inline std::string to_csv(const std::vector<ExperimentRecord>& records) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const ExperimentRecord& r : records) {
    out += std::to_string(r.n);
    out += ',';
    out += std::to_string(r.d);
    out += ',';
    out += std::to_string(r.k);
    out += ',';
    out += detail::csv_escape(r.method);
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    if (r.min_volume) out += format_double_shortest(*r.min_volume);
    out += ',';
    if (r.certificate_product) out += format_double_shortest(*r.certificate_product);
    out += ',';
    out += format_double_shortest(r.wall_time_ms);
    out += ',';
    out += detail::csv_escape(r.error);
    out += '\n';
  }
  return out;
}

inline std::vector<ExperimentRecord> parse_csv(const std::string& text) {
  std::vector<ExperimentRecord> records;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line != kCsvHeader)
        throw std::invalid_argument("unexpected CSV header: " + line);
      continue;
    }
    auto f = detail::csv_split(line);
    if (f.size() != 9) throw std::invalid_argument("bad CSV row: " + line);
    ExperimentRecord r;
    r.n = detail::parse_int_field<int>(f[0]);
    r.d = detail::parse_int_field<int>(f[1]);
    r.k = detail::parse_int_field<int>(f[2]);
    r.method = f[3];
    r.seed = detail::parse_int_field<std::uint64_t>(f[4]);
    if (!f[5].empty()) r.min_volume = detail::parse_double_field(f[5]);
    if (!f[6].empty()) r.certificate_product = detail::parse_double_field(f[6]);
    r.wall_time_ms = detail::parse_double_field(f[7]);
    r.error = f[8];
    records.push_back(std::move(r));
  }
  return records;
}

inline void write_csv_atomic(const std::string& path, const std::vector<ExperimentRecord>& records) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
    out << to_csv(records);
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

inline std::vector<ExperimentRecord> load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

namespace detail {

inline void sort_records(std::vector<ExperimentRecord>& records) {
  std::sort(records.begin(), records.end(),
            [](const ExperimentRecord& a, const ExperimentRecord& b) {
              return std::tie(a.n, a.seed, a.method) < std::tie(b.n, b.seed, b.method);
            });
}

// Runs one method on one generated set, retrying through perturbation when
// the finder reports a degenerate configuration.
inline ExperimentRecord run_cell(const ExperimentConfig& cfg, int n, std::uint64_t seed,
                                 Method method) {
  ExperimentRecord rec;
  rec.n = n;
  rec.d = cfg.d;
  rec.k = cfg.k;
  rec.method = to_string(method);
  rec.seed = seed;
  auto t0 = std::chrono::steady_clock::now();
  try {
    PointSet ps = generate(cfg.generator, cfg.d, n, seed);
    const bool sphere = ps.space_tag == SpaceTag::UnitSphere;
    for (int attempt = 0;; ++attempt) {
      try {
        SimplexSelection sel;
        if (method == Method::Brute) {
          sel = sphere ? brute_force_min_determinant(ps, cfg.k + 1, cfg.budget)
                       : brute_force_min_simplex(ps, cfg.k, cfg.budget);
        } else {
          sel = sphere ? recursive_find(ps, cfg.k, cfg.schedule, cfg.budget)
                       : find_small_simplex(ps, cfg.k, cfg.schedule, cfg.budget);
        }
        rec.min_volume = sel.value;
        if (!sel.certificate.empty()) rec.certificate_product = sel.certified_bound;
        break;
      } catch (const DegenerateInputError&) {
        if (attempt >= 3) throw;
        ps = perturb(ps, derive_seed(seed, 101 + static_cast<std::uint64_t>(attempt)), 1e-9);
      }
    }
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  auto t1 = std::chrono::steady_clock::now();
  rec.wall_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return rec;
}

}  // namespace detail

// Sweeps every (n, seed, method) cell, skipping cells already present in the
// output CSV, and rewrites the file atomically sorted by (n, seed, method).
// Per-cell failures become error records; the sweep always completes.
inline std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg) {
  if (cfg.k < 1 || cfg.k > cfg.d)
    throw std::invalid_argument("run_experiment: need 1 <= k <= d");
  if (cfg.n_values.empty() || cfg.n_values.front() < 1 ||
      !std::is_sorted(cfg.n_values.begin(), cfg.n_values.end()))
    throw std::invalid_argument("run_experiment: n_values must be positive ascending");
  if (cfg.seeds.empty()) throw std::invalid_argument("run_experiment: need at least one seed");
  if (cfg.output_path.empty())
    throw std::invalid_argument("run_experiment: output_path required");

  std::vector<ExperimentRecord> records = load_csv(cfg.output_path);
  std::set<std::tuple<int, std::uint64_t, std::string>> done;
  for (const ExperimentRecord& r : records) done.insert({r.n, r.seed, r.method});

  std::vector<Method> methods;
  if (cfg.method == Method::Both) methods = {Method::Brute, Method::Recursive};
  else methods = {cfg.method};

  for (int n : cfg.n_values)
    for (std::uint64_t seed : cfg.seeds)
      for (Method m : methods) {
        if (done.count({n, seed, to_string(m)})) continue;
        records.push_back(detail::run_cell(cfg, n, seed, m));
      }

  detail::sort_records(records);
  write_csv_atomic(cfg.output_path, records);
  return records;
}

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
  int distinct_n = 0;
  int rows_used = 0;
  int rows_excluded = 0;  // error rows, absent values, and zero volumes
};

// OLS of ln(geometric mean of min_volume at each n) against ln n. Zero and
// failed rows cannot enter the log and are excluded but counted.
inline FitResult fit_exponent(const std::vector<ExperimentRecord>& records) {
  std::map<int, std::pair<double, int>> by_n;  // n -> (sum of logs, count)
  FitResult fit;
  for (const ExperimentRecord& r : records) {
    if (!r.error.empty() || !r.min_volume || *r.min_volume <= 0.0) {
      ++fit.rows_excluded;
      continue;
    }
    auto& acc = by_n[r.n];
    acc.first += std::log(*r.min_volume);
    acc.second += 1;
    ++fit.rows_used;
  }
  fit.distinct_n = static_cast<int>(by_n.size());
  if (fit.distinct_n < 3)
    throw std::invalid_argument("fit_exponent: need at least 3 distinct n with positive volumes");

  std::vector<double> xs, ys;
  for (const auto& [n, acc] : by_n) {
    xs.push_back(std::log(static_cast<double>(n)));
    ys.push_back(acc.first / acc.second);
  }
  const size_t m = xs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < m; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = m * sxx - sx * sx;
  fit.slope = (m * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / m;
  double ss = 0.0;
  for (size_t i = 0; i < m; ++i) {
    double resid = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss += resid * resid;
  }
  fit.residual_rms = std::sqrt(ss / m);
  return fit;
}

}  // namespace minsimplex
