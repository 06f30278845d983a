#pragma once

// Small-dimensional parameter search by iterative grid refinement.  Used to
// pick the free Young-inequality parameters in the radius and local-bound
// formulas; any feasible point yields a valid bound, so the search only has
// to be good, not certified.

#include <algorithm>
#include <cmath>
#include <vector>

namespace vfem {

struct ParamGrid {
  int resolution = 8;
  int passes = 5;
};

// Minimizes cost over the box [lo, hi].  cost takes a point as
// std::vector<double> and returns +inf for infeasible points.  Each pass
// scans a full cartesian grid of cell midpoints, then the box shrinks to one
// grid cell around the incumbent (clipped to the original box).
template <class Cost>
std::vector<double> grid_minimize(Cost&& cost, std::vector<double> lo,
                                  std::vector<double> hi,
                                  const ParamGrid& grid = {}) {
  const std::size_t n = lo.size();
  const std::vector<double> orig_lo = lo, orig_hi = hi;
  std::vector<double> best(n);
  for (std::size_t i = 0; i < n; ++i) best[i] = 0.5 * (lo[i] + hi[i]);
  double best_cost = cost(best);
  std::vector<int> idx(n, 0);
  std::vector<double> pt(n);
  for (int pass = 0; pass < grid.passes; ++pass) {
    std::fill(idx.begin(), idx.end(), 0);
    while (true) {
      for (std::size_t i = 0; i < n; ++i)
        pt[i] = lo[i] + (hi[i] - lo[i]) * (idx[i] + 0.5) / grid.resolution;
      double c = cost(pt);
      if (c < best_cost) {
        best_cost = c;
        best = pt;
      }
      std::size_t j = 0;
      while (j < n && ++idx[j] == grid.resolution) idx[j++] = 0;
      if (j == n) break;
    }
    if (!std::isfinite(best_cost)) break;
    for (std::size_t i = 0; i < n; ++i) {
      double cell = (hi[i] - lo[i]) / grid.resolution;
      lo[i] = std::max(orig_lo[i], best[i] - cell);
      hi[i] = std::min(orig_hi[i], best[i] + cell);
    }
  }
  return best;
}

}  // namespace vfem
