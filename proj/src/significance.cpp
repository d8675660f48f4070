#include "somchange/significance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "somchange/error.hpp"

namespace somchange {

double WeightedEcdf::operator()(double x) const {
  auto it = std::upper_bound(values.begin(), values.end(), x);
  if (it == values.begin()) return 0.0;
  return cumulative[static_cast<std::size_t>(it - values.begin()) - 1];
}

WeightedEcdf make_ecdf(std::span<const double> values, std::span<const double> weights) {
  if (values.size() != weights.size()) fail(ErrorKind::DimensionMismatch, "values and weights differ in length");
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) fail(ErrorKind::InvalidArgument, "ECDF weights must be finite and non-negative");
    total += w;
  }
  if (!(total > 0.0)) fail(ErrorKind::InvalidArgument, "ECDF needs positive total weight");

  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  WeightedEcdf ecdf;
  double running = 0.0;
  for (std::size_t idx : order) {
    if (weights[idx] == 0.0) continue;
    running += weights[idx];
    if (!ecdf.values.empty() && ecdf.values.back() == values[idx]) {
      ecdf.cumulative.back() = running / total;
    } else {
      ecdf.values.push_back(values[idx]);
      ecdf.cumulative.push_back(running / total);
    }
  }
  ecdf.cumulative.back() = 1.0;
  return ecdf;
}

WeightedEcdf weighted_ecdf(const WeightedPattern& pattern, const Som& som, std::size_t k) {
  if (k >= som.feature_count()) fail(ErrorKind::InvalidArgument, "feature index out of range");
  if (pattern.size() != som.neuron_count()) fail(ErrorKind::DimensionMismatch, "pattern does not belong to this map");
  std::vector<double> values(som.neuron_count());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = som.prototypes(i, k);
  return make_ecdf(values, pattern.weights);
}

double ks_critical_coefficient(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorKind::InvalidArgument, "alpha must lie in (0, 1)");
  return std::sqrt(-0.5 * std::log(alpha / 2.0));
}

double effective_sample_size(std::span<const double> weights) {
  double s = 0.0, s2 = 0.0;
  for (double w : weights) {
    s += w;
    s2 += w * w;
  }
  return s2 > 0.0 ? s * s / s2 : 0.0;
}

double ks_statistic(const WeightedEcdf& a, const WeightedEcdf& b) {
  // Merge walk over both step sequences; F is evaluated just at the jumps.
  double d = 0.0;
  std::size_t i = 0, j = 0;
  double fa = 0.0, fb = 0.0;
  while (i < a.values.size() || j < b.values.size()) {
    double x;
    if (j >= b.values.size() || (i < a.values.size() && a.values[i] <= b.values[j])) {
      x = a.values[i];
    } else {
      x = b.values[j];
    }
    while (i < a.values.size() && a.values[i] == x) fa = a.cumulative[i++];
    while (j < b.values.size() && b.values[j] == x) fb = b.cumulative[j++];
    d = std::max(d, std::abs(fa - fb));
  }
  return std::min(d, 1.0);
}

KsResult ks_test(std::span<const double> values_p, std::span<const double> weights_p,
                 std::span<const double> values_q, std::span<const double> weights_q, double alpha) {
  const double c = ks_critical_coefficient(alpha);
  KsResult r;
  r.statistic = ks_statistic(make_ecdf(values_p, weights_p), make_ecdf(values_q, weights_q));
  r.n_eff_p = effective_sample_size(weights_p);
  r.n_eff_q = effective_sample_size(weights_q);
  r.critical = c * std::sqrt((r.n_eff_p + r.n_eff_q) / (r.n_eff_p * r.n_eff_q));
  r.significant = r.statistic > r.critical;
  return r;
}

KsResult ks_test(const WeightedPattern& p, const WeightedPattern& q, const Som& som, std::size_t k,
                 double alpha) {
  if (k >= som.feature_count()) fail(ErrorKind::InvalidArgument, "feature index out of range");
  if (p.size() != som.neuron_count() || q.size() != som.neuron_count()) {
    fail(ErrorKind::DimensionMismatch, "pattern does not belong to this map");
  }
  std::vector<double> values(som.neuron_count());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = som.prototypes(i, k);
  return ks_test(values, p.weights, values, q.weights, alpha);
}

}  // namespace somchange
