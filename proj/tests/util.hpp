#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "minsimplex/experiment.hpp"
#include "minsimplex/pointset.hpp"
#include "minsimplex/rng.hpp"

namespace testutil {

inline double rel_err(double a, double b) {
  double scale = std::max(std::abs(a), std::abs(b));
  if (scale == 0.0) return 0.0;
  return std::abs(a - b) / scale;
}

inline std::vector<minsimplex::Vector> random_vectors(std::uint64_t seed, int n, int d) {
  minsimplex::CounterRng rng(seed);
  std::vector<minsimplex::Vector> vecs;
  vecs.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    minsimplex::Vector v(d);
    for (int j = 0; j < d; ++j) v[j] = rng.normal();
    vecs.push_back(std::move(v));
  }
  return vecs;
}

inline minsimplex::PointSet random_cube(std::uint64_t seed, int n, int d) {
  return minsimplex::generate(minsimplex::Generator::UniformCube, d, n, seed);
}

// ambient_dim coordinates, unit norm: points on the sphere S^{ambient_dim-1}.
inline minsimplex::PointSet random_sphere(std::uint64_t seed, int n, int ambient_dim) {
  return minsimplex::generate(minsimplex::Generator::UniformSphere, ambient_dim, n, seed);
}

inline minsimplex::Vector vec2(double a, double b) {
  minsimplex::Vector v(2);
  v << a, b;
  return v;
}

inline minsimplex::Vector vec3(double a, double b, double c) {
  minsimplex::Vector v(3);
  v << a, b, c;
  return v;
}

}  // namespace testutil
