#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace minsimplex {

using Vector = Eigen::VectorXd;

enum class SpaceTag { UnitCube, UnitSphere, Raw };

// Unit-sphere membership tolerance on the Euclidean norm.
inline constexpr double kSphereNormTol = 1e-12;

inline std::string to_string(SpaceTag tag) {
  switch (tag) {
    case SpaceTag::UnitCube:
      return "unit-cube";
    case SpaceTag::UnitSphere:
      return "unit-sphere";
    case SpaceTag::Raw:
      return "raw";
  }
  return "raw";
}

inline SpaceTag space_tag_from_string(const std::string& s) {
  if (s == "unit-cube") return SpaceTag::UnitCube;
  if (s == "unit-sphere") return SpaceTag::UnitSphere;
  if (s == "raw") return SpaceTag::Raw;
  throw std::invalid_argument("unknown space tag: " + s);
}

// Ordered list of points sharing one ambient dimension. `dim` is kept
// explicitly so an empty set still knows its ambient space.
struct PointSet {
  std::vector<Vector> points;
  SpaceTag space_tag = SpaceTag::Raw;
  int dim = 0;

  int size() const { return static_cast<int>(points.size()); }
};

// Throws std::invalid_argument on any violated invariant: inconsistent or
// non-positive dimensions, non-finite coordinates, cube points outside
// [0,1]^d, sphere points off the unit sphere beyond kSphereNormTol.
inline void validate_point_set(const PointSet& ps) {
  if (ps.dim <= 0) throw std::invalid_argument("point set dimension must be positive");
  for (int i = 0; i < ps.size(); ++i) {
    const Vector& p = ps.points[i];
    if (p.size() != ps.dim)
      throw std::invalid_argument("point " + std::to_string(i) + " has wrong dimension");
    if (!p.allFinite())
      throw std::invalid_argument("point " + std::to_string(i) + " has non-finite coordinates");
    if (ps.space_tag == SpaceTag::UnitCube) {
      if ((p.array() < 0.0).any() || (p.array() > 1.0).any())
        throw std::invalid_argument("point " + std::to_string(i) + " outside [0,1]^d");
    } else if (ps.space_tag == SpaceTag::UnitSphere) {
      if (std::abs(p.norm() - 1.0) > kSphereNormTol)
        throw std::invalid_argument("point " + std::to_string(i) + " not on the unit sphere");
    }
  }
}

inline PointSet make_point_set(std::vector<Vector> points, SpaceTag tag) {
  PointSet ps;
  ps.points = std::move(points);
  ps.space_tag = tag;
  ps.dim = ps.points.empty() ? 1 : static_cast<int>(ps.points.front().size());
  validate_point_set(ps);
  return ps;
}

// 17 significant digits: enough to round-trip any finite double.
inline std::string format_real17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Text format shared by every tool: header `d n space_tag`, then n rows of
// d space-separated coordinates.
inline void write_point_set(std::ostream& out, const PointSet& ps) {
  out << ps.dim << ' ' << ps.size() << ' ' << to_string(ps.space_tag) << '\n';
  for (const Vector& p : ps.points) {
    for (int j = 0; j < p.size(); ++j) {
      if (j) out << ' ';
      out << format_real17(p[j]);
    }
    out << '\n';
  }
}

inline PointSet read_point_set(std::istream& in) {
  int d = 0, n = 0;
  std::string tag;
  if (!(in >> d >> n >> tag)) throw std::invalid_argument("malformed point-set header");
  if (d <= 0 || n < 0) throw std::invalid_argument("malformed point-set header");
  PointSet ps;
  ps.dim = d;
  ps.space_tag = space_tag_from_string(tag);
  ps.points.reserve(n);
  for (int i = 0; i < n; ++i) {
    Vector p(d);
    for (int j = 0; j < d; ++j) {
      if (!(in >> p[j]))
        throw std::invalid_argument("point-set row " + std::to_string(i) + " truncated");
    }
    ps.points.push_back(std::move(p));
  }
  validate_point_set(ps);
  return ps;
}

inline void save_point_set(const std::string& path, const PointSet& ps) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_point_set(out, ps);
}

inline PointSet load_point_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return read_point_set(in);
}

inline std::string point_set_to_string(const PointSet& ps) {
  std::ostringstream os;
  write_point_set(os, ps);
  return os.str();
}

}  // namespace minsimplex
