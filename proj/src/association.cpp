#include "somchange/association.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "somchange/error.hpp"

namespace somchange {

double WeightedPattern::total() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

void WeightedPattern::validate() const {
  if (weights.empty()) fail(ErrorKind::InvalidArgument, "pattern has no weights");
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) fail(ErrorKind::InvalidArgument, "pattern weights must be finite and non-negative");
  }
  if (std::abs(total() - 1.0) > 1e-9) fail(ErrorKind::InvalidArgument, "pattern weights must sum to 1");
}

WeightedPattern make_pattern(std::vector<double> weights, std::string som_id) {
  double sum = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) fail(ErrorKind::InvalidArgument, "pattern weights must be finite and non-negative");
    sum += w;
  }
  if (!(sum > 0.0)) fail(ErrorKind::Numeric, "pattern has zero total weight");
  for (double& w : weights) w /= sum;
  return {std::move(som_id), std::move(weights)};
}

std::vector<double> input_activation(const Som& som, std::span<const double> x) {
  if (x.size() != som.feature_count()) {
    fail(ErrorKind::DimensionMismatch, "input has " + std::to_string(x.size()) +
                                           " features, map has " +
                                           std::to_string(som.feature_count()));
  }
  for (double v : x) {
    if (!std::isfinite(v)) fail(ErrorKind::Numeric, "input vector contains non-finite values");
  }
  const std::size_t n = som.neuron_count();
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(x, som.prototypes.row(i));
  // Shifting by the smallest distance keeps the nearest neuron at exp(0) = 1,
  // so the kernel cannot underflow to all zeros for small bandwidths.
  const double shift = *std::min_element(d2.begin(), d2.end());
  const double inv = 1.0 / (2.0 * som.bandwidth * som.bandwidth);
  std::vector<double> a(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = std::exp(-(d2[i] - shift) * inv);
    sum += a[i];
  }
  if (!(sum > 0.0) || !std::isfinite(sum)) fail(ErrorKind::Numeric, "activation vanished");
  for (double& v : a) v /= sum;
  return a;
}

AssociationMatrix build_association(const Som& in_som, const Som& out_som, const Matrix& inputs,
                                    const Matrix& outputs) {
  if (inputs.rows() == 0) fail(ErrorKind::Data, "association needs at least one paired record");
  if (inputs.rows() != outputs.rows()) fail(ErrorKind::DimensionMismatch, "input and output record counts differ");
  if (inputs.cols() != in_som.feature_count() || outputs.cols() != out_som.feature_count()) {
    fail(ErrorKind::DimensionMismatch, "record dimensionality does not match the maps");
  }

  std::vector<std::size_t> order(inputs.rows());
  std::iota(order.begin(), order.end(), 0);
  auto record_less = [&](std::size_t a, std::size_t b) {
    auto ia = inputs.row(a), ib = inputs.row(b);
    if (!std::equal(ia.begin(), ia.end(), ib.begin())) {
      return std::lexicographical_compare(ia.begin(), ia.end(), ib.begin(), ib.end());
    }
    auto oa = outputs.row(a), ob = outputs.row(b);
    return std::lexicographical_compare(oa.begin(), oa.end(), ob.begin(), ob.end());
  };
  std::stable_sort(order.begin(), order.end(), record_less);

  const std::size_t n_in = in_som.neuron_count();
  const std::size_t n_out = out_som.neuron_count();
  AssociationMatrix assoc{Matrix(n_in, n_out), true};
  for (std::size_t r : order) {
    const auto a_in = input_activation(in_som, inputs.row(r));
    const auto a_out = input_activation(out_som, outputs.row(r));
    for (std::size_t i = 0; i < n_in; ++i) {
      if (a_in[i] == 0.0) continue;
      auto row = assoc.entries.row(i);
      for (std::size_t j = 0; j < n_out; ++j) row[j] += a_in[i] * a_out[j];
    }
  }

  for (std::size_t i = 0; i < n_in; ++i) {
    auto row = assoc.entries.row(i);
    const double mass = std::accumulate(row.begin(), row.end(), 0.0);
    if (mass > 0.0) {
      for (double& v : row) v /= mass;
    } else {
      std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(n_out));
    }
  }
  return assoc;
}

WeightedPattern conditional_pattern(std::span<const double> x, const AssociationMatrix& assoc,
                                    const Som& in_som, const Som& out_som, std::string som_id) {
  if (!assoc.built()) fail(ErrorKind::InvalidArgument, "association has not been built");
  if (assoc.entries.rows() != in_som.neuron_count() || assoc.entries.cols() != out_som.neuron_count()) {
    fail(ErrorKind::DimensionMismatch, "association shape does not match the maps");
  }
  const auto a = input_activation(in_som, x);
  std::vector<double> w(out_som.neuron_count(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    auto row = assoc.entries.row(i);
    for (std::size_t j = 0; j < w.size(); ++j) w[j] += a[i] * row[j];
  }
  return make_pattern(std::move(w), std::move(som_id));
}

}  // namespace somchange
