#include "tordiss/lattice_search.hpp"

#include "tordiss/error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace tordiss {

namespace {

// First nonzero coordinate positive: one representative of each pair {j, -j}.
bool positive_half(const IntVec& j) {
  for (auto x : j)
    if (x != 0) return x > 0;
  return false;
}

int64_t sup_norm(const IntVec& j) {
  int64_t m = 0;
  for (auto x : j) m = std::max(m, x < 0 ? -x : x);
  return m;
}

}  // namespace

LatticeMinimum lattice_minimize(int d, const std::function<long double(const IntVec&)>& objective,
                                const std::function<long double(int64_t)>& lower_bound,
                                const SearchPolicy& policy) {
  if (d < 1) throw DimensionError("lattice dimension must be >= 1");
  LatticeMinimum best;
  best.value = std::numeric_limits<long double>::infinity();
  int64_t done = 0;  // shells with sup-norm <= done are finished
  int64_t R = 1;
  while (true) {
    long double side = static_cast<long double>(2 * R + 1);
    if (std::pow(side, d) > static_cast<long double>(policy.point_budget))
      throw NumericalFailure("lattice search exceeded its point budget at radius " + std::to_string(R), {},
                             static_cast<double>(best.value));
    IntVec j(static_cast<size_t>(d), -R);
    while (true) {
      if (sup_norm(j) > done && positive_half(j)) {
        long double v = objective(j);
        ++best.points;
        if (v < best.value) {
          best.value = v;
          best.argmin = j;
        }
      }
      int i = d - 1;
      while (i >= 0 && j[static_cast<size_t>(i)] == R) {
        j[static_cast<size_t>(i)] = -R;
        --i;
      }
      if (i < 0) break;
      ++j[static_cast<size_t>(i)];
    }
    done = R;
    best.radius = R;
    long double lb = lower_bound(R);
    if (lb > best.value || (std::isinf(lb) && std::isinf(best.value))) return best;
    R *= 2;
  }
}

}  // namespace tordiss
