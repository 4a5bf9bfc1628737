// Print the exact exponent table for k = d up to dimension 12, with the
// base rule or split that realizes each bound.

#include <cstdio>

#include "minsimplex/minsimplex.hpp"

namespace ms = minsimplex;

int main() {
  ms::BoundTable table = ms::dp_table(12);
  for (int d = 1; d <= 12; ++d) {
    const ms::TableEntry& e = table.at(d, d);
    std::printf("d=%-2d  delta >= %-14s  via %s\n", d,
                ms::format_bound(e.bound).c_str(),
                ms::rule_name(e.derivation).c_str());
  }
  return 0;
}
