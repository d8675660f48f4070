#pragma once

// Exhaustive minimization over the vertices of the transportation polytope.
// Every vertex is a basic feasible solution: choose rows + cols - 1 cells,
// solve the marginal equations on those cells alone, keep the solution if it
// is non-negative. Exponential, so only for tiny instances.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace oracle {

inline bool solve_dense(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double>& x) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (std::abs(a[piv][col]) < 1e-12) return false;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  x.resize(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return true;
}

// Minimum total cost sum f_ij c_ij over balanced plans; cost is row-major.
inline double min_cost_by_vertex_enumeration(const std::vector<double>& supply, const std::vector<double>& demand,
                                             const std::vector<double>& cost) {
  const std::size_t r = supply.size(), c = demand.size();
  const std::size_t cells = r * c;
  const std::size_t basis = r + c - 1;
  double best = std::numeric_limits<double>::infinity();

  std::vector<bool> pick(cells, false);
  std::fill(pick.begin(), pick.begin() + static_cast<long>(basis), true);
  do {
    std::vector<std::size_t> chosen;
    for (std::size_t k = 0; k < cells; ++k) {
      if (pick[k]) chosen.push_back(k);
    }
    // Row constraints plus all column constraints but the last (redundant).
    std::vector<std::vector<double>> a(basis, std::vector<double>(basis, 0.0));
    std::vector<double> b(basis);
    for (std::size_t e = 0; e < basis; ++e) {
      if (e < r) {
        b[e] = supply[e];
        for (std::size_t v = 0; v < basis; ++v) a[e][v] = chosen[v] / c == e ? 1.0 : 0.0;
      } else {
        const std::size_t col = e - r;
        b[e] = demand[col];
        for (std::size_t v = 0; v < basis; ++v) a[e][v] = chosen[v] % c == col ? 1.0 : 0.0;
      }
    }
    std::vector<double> x;
    if (!solve_dense(a, b, x)) continue;
    if (std::any_of(x.begin(), x.end(), [](double v) { return v < -1e-12; })) continue;
    double total = 0.0;
    for (std::size_t v = 0; v < basis; ++v) total += std::max(0.0, x[v]) * cost[chosen[v]];
    best = std::min(best, total);
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return best;
}

}  // namespace oracle
