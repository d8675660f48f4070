#pragma once

// Reference computations for the KS statistic that share no code with the
// library: F is evaluated by direct summation at every point of the merged
// value grid, and the classical statistic comes from sorted plain samples.

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

inline double weighted_cdf_at(const std::vector<double>& values, const std::vector<double>& weights, double x) {
  double total = 0.0, below = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    total += weights[i];
    if (values[i] <= x) below += weights[i];
  }
  return below / total;
}

inline double ks_grid_scan(const std::vector<double>& vp, const std::vector<double>& wp, const std::vector<double>& vq,
                           const std::vector<double>& wq) {
  std::vector<double> grid = vp;
  grid.insert(grid.end(), vq.begin(), vq.end());
  double d = 0.0;
  for (double x : grid) d = std::max(d, std::abs(weighted_cdf_at(vp, wp, x) - weighted_cdf_at(vq, wq, x)));
  return d;
}

// Two-sample statistic on unweighted samples by the textbook merge.
inline double classical_ks(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

}  // namespace oracle
