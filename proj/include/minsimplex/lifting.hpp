#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "minsimplex/geometry.hpp"
#include "minsimplex/pointset.hpp"

// Cube <-> sphere transport.
//
// Lifting sends x in [0,1]^d to the unit vector (x,1)/sqrt(|x|^2+1) on S^d,
// turning simplex volumes into tuple determinants up to the per-point norm
// factors sqrt(|x|^2+1), each in [1, sqrt(d+1)]. Central projection onto the
// hyperplane {x_{d+1} = 1} inverts the lift for points of a randomly rotated
// sphere set that land back inside the cube window.

namespace minsimplex {

// Central-projection denominator cutoff: rotated points whose last
// coordinate is <= this are dropped rather than mapped to unbounded images.
inline constexpr double kHemisphereCutoff = 1e-6;

struct LiftResult {
  PointSet sphere_points;             // on S^d in R^{d+1}
  std::vector<double> norm_factors;   // sqrt(|x|^2+1), one per input point
};

// Lift a unit-cube point set to unit vectors. For any k+1 indices,
// Vol_{k+1}(lifted) * prod(norm_factors) = Vol_{k+1}((x,1) raw)
//   = k! * simplex_volume(originals) * sqrt(1+h^2),
// h the distance from the origin to the affine hull of the originals.
// Both the factor product and the sqrt(1+h^2) term lie in [1, sqrt(d+1)]
// on the cube, so lifted determinants track simplex volumes within
// constant factors of d alone.
inline LiftResult lift_to_sphere(const PointSet& x_set) {
  if (x_set.space_tag != SpaceTag::UnitCube)
    throw std::invalid_argument("lift_to_sphere: input must be a unit-cube point set");
  validate_point_set(x_set);
  LiftResult res;
  res.sphere_points.space_tag = SpaceTag::UnitSphere;
  res.sphere_points.dim = x_set.dim + 1;
  res.sphere_points.points.reserve(static_cast<size_t>(x_set.size()));
  res.norm_factors.reserve(static_cast<size_t>(x_set.size()));
  for (const Vector& x : x_set.points) {
    double factor = std::sqrt(x.squaredNorm() + 1.0);
    Vector y(x_set.dim + 1);
    y.head(x_set.dim) = x;
    y[x_set.dim] = 1.0;
    y /= factor;
    res.sphere_points.points.push_back(std::move(y));
    res.norm_factors.push_back(factor);
  }
  return res;
}

struct ProjectionResult {
  PointSet cube_points;               // retained images, space_tag unit-cube
  std::vector<int> retained_indices;  // indices into the input sphere set

  // An empty retained set is a valid outcome; callers should re-seed.
  bool empty() const { return retained_indices.empty(); }
};

// Rotate Y by random_rotation(dim, seed), centrally project each rotated
// point y with last coordinate > kHemisphereCutoff to y/y_last, and keep the
// images whose first d coordinates land inside [0,1]^d.
inline ProjectionResult central_project(const PointSet& y_set, std::uint64_t seed) {
  if (y_set.space_tag != SpaceTag::UnitSphere)
    throw std::invalid_argument("central_project: input must be a unit-sphere point set");
  validate_point_set(y_set);
  const int d = y_set.dim - 1;
  if (d < 1) throw std::invalid_argument("central_project: ambient dimension must be >= 2");
  Eigen::MatrixXd q = random_rotation(y_set.dim, seed);
  ProjectionResult res;
  res.cube_points.space_tag = SpaceTag::UnitCube;
  res.cube_points.dim = d;
  for (int i = 0; i < y_set.size(); ++i) {
    Vector rotated = q * y_set.points[static_cast<size_t>(i)];
    double last = rotated[d];
    if (last <= kHemisphereCutoff) continue;
    Vector image = rotated.head(d) / last;
    if ((image.array() < 0.0).any() || (image.array() > 1.0).any()) continue;
    res.cube_points.points.push_back(std::move(image));
    res.retained_indices.push_back(i);
  }
  return res;
}

}  // namespace minsimplex
