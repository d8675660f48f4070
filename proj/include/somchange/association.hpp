#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "somchange/matrix.hpp"
#include "somchange/som.hpp"

namespace somchange {

// Distribution of weight over the neurons of one output map.
struct WeightedPattern {
  std::string som_id;
  std::vector<double> weights;

  std::size_t size() const noexcept { return weights.size(); }
  double total() const;

  // Throws unless all weights are finite, non-negative and sum to 1 +- 1e-9.
  void validate() const;

  friend bool operator==(const WeightedPattern&, const WeightedPattern&) = default;
};

// Normalizes non-negative weights to sum 1.
WeightedPattern make_pattern(std::vector<double> weights, std::string som_id = {});

// n_in x n_out co-activation matrix between an input map and an output map.
struct AssociationMatrix {
  Matrix entries;
  bool row_normalized = false;

  bool built() const noexcept { return !entries.empty(); }

  friend bool operator==(const AssociationMatrix&, const AssociationMatrix&) = default;
};

// Gaussian soft assignment of x over the map's prototypes, using the map's
// frozen bandwidth. Sums to 1.
std::vector<double> input_activation(const Som& som, std::span<const double> x);

// Paired records: one row of `inputs` belongs with the same row of `outputs`.
// Accumulation order is canonical (records sorted by value), so the result
// does not depend on record order.
AssociationMatrix build_association(const Som& in_som, const Som& out_som, const Matrix& inputs,
                                    const Matrix& outputs);

WeightedPattern conditional_pattern(std::span<const double> x, const AssociationMatrix& assoc,
                                    const Som& in_som, const Som& out_som,
                                    std::string som_id = {});

}  // namespace somchange
