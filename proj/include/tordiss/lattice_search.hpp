#pragma once

#include "tordiss/integer.hpp"

#include <cstdint>
#include <functional>

namespace tordiss {

struct LatticeMinimum {
  long double value = 0;   // min over nonzero j of the objective
  IntVec argmin;           // a minimizer (first in enumeration order)
  int64_t radius = 0;      // sup-norm radius searched when the certificate closed
  int64_t points = 0;      // lattice points evaluated
};

struct SearchPolicy {
  int64_t point_budget = 40'000'000;
};

// Minimize an even objective over Z^d \ {0} by shells of growing sup-norm radius 1, 2, 4, ...
// lower_bound(R) must be a lower bound for the objective on all j with |j|_inf > R.
// The search stops once lower_bound(R) exceeds the best value found so far.
LatticeMinimum lattice_minimize(int d, const std::function<long double(const IntVec&)>& objective,
                                const std::function<long double(int64_t)>& lower_bound,
                                const SearchPolicy& policy = {});

}  // namespace tordiss
