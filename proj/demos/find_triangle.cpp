// Scatter points in the unit square, then hunt the smallest triangle two
// ways: exhaustively and with the recursive projection strategy. The
// recursive result carries a product certificate bounding its value.

#include <cstdio>

#include "minsimplex/minsimplex.hpp"

namespace ms = minsimplex;

int main() {
  const int n = 24;
  ms::PointSet x = ms::generate(ms::Generator::UniformCube, 2, n, 7);

  ms::SimplexSelection exact = ms::brute_force_min_simplex(x, 2);
  std::printf("exhaustive: volume %.6g at {%d, %d, %d}\n", exact.value,
              exact.indices[0], exact.indices[1], exact.indices[2]);

  ms::SimplexSelection rec =
      ms::find_small_simplex(x, 2, ms::SplitSchedule::Exhaustive());
  std::printf("recursive:  volume %.6g at {%d, %d, %d}, certified <= %.6g\n",
              rec.value, rec.indices[0], rec.indices[1], rec.indices[2],
              rec.certified_bound);
  for (const ms::StageRecord& s : rec.certificate)
    std::printf("  stage split=%d value=%.6g\n", s.split_l, s.value);
  return 0;
}
