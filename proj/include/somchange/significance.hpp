#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "somchange/association.hpp"
#include "somchange/som.hpp"

namespace somchange {

// Right-continuous step function. values[t] are distinct and ascending;
// cumulative[t] is F(values[t]), the total weight at or below that value.
struct WeightedEcdf {
  std::vector<double> values;
  std::vector<double> cumulative;

  double operator()(double x) const;
};

// Builds the ECDF of arbitrary values with non-negative weights; weights are
// normalized by their sum.
WeightedEcdf make_ecdf(std::span<const double> values, std::span<const double> weights);

WeightedEcdf weighted_ecdf(const WeightedPattern& pattern, const Som& som, std::size_t k);

struct KsResult {
  double statistic = 0.0;
  double n_eff_p = 0.0;
  double n_eff_q = 0.0;
  double critical = 0.0;  // threshold the statistic is compared against
  bool significant = false;
};

// Asymptotic two-sample critical coefficient sqrt(-ln(alpha/2) / 2).
double ks_critical_coefficient(double alpha);

// Kish effective sample size (sum w)^2 / sum w^2.
double effective_sample_size(std::span<const double> weights);

// sup |F_P - F_Q| over the merged step points.
double ks_statistic(const WeightedEcdf& a, const WeightedEcdf& b);

// Two-sample test on explicit weighted samples.
KsResult ks_test(std::span<const double> values_p, std::span<const double> weights_p,
                 std::span<const double> values_q, std::span<const double> weights_q, double alpha);

KsResult ks_test(const WeightedPattern& p, const WeightedPattern& q, const Som& som, std::size_t k,
                 double alpha = 0.05);

}  // namespace somchange
