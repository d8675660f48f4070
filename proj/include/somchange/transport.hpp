#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "somchange/association.hpp"
#include "somchange/matrix.hpp"
#include "somchange/som.hpp"

namespace somchange {

// Pairwise Euclidean distances between the prototypes of one map, in feature
// space (not layout space).
struct GroundDistanceMatrix {
  Matrix d;
  double max_d = 0.0;

  std::size_t size() const noexcept { return d.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return d(i, j); }
};

GroundDistanceMatrix ground_distances(const Som& som);
GroundDistanceMatrix ground_distances(const Matrix& prototypes);

struct Flow {
  std::size_t from = 0;  // neuron of the reference pattern P
  std::size_t to = 0;    // neuron of the changed pattern Q
  double mass = 0.0;

  friend bool operator==(const Flow&, const Flow&) = default;
};

struct FlowSolution {
  std::vector<Flow> flows;  // strictly positive entries only, ordered by (from, to)
  double total_cost = 0.0;
  double total_flow = 0.0;

  friend bool operator==(const FlowSolution&, const FlowSolution&) = default;
};

// Exact minimum-cost transportation plan between non-negative supplies and
// demands. Totals may differ; the plan then moves min(sum supply, sum demand),
// as in the partial-matching EMD. Zero entries are dropped from the solver
// instance and never appear in the plan.
FlowSolution solve_transport(std::span<const double> supply, std::span<const double> demand,
                             const Matrix& cost);

struct EmdResult {
  double emd = 0.0;
  FlowSolution flow;
};

// Total work divided by total flow. Both patterns must live on the map that
// produced `d`.
EmdResult solve_emd(const WeightedPattern& p, const WeightedPattern& q, const GroundDistanceMatrix& d);

struct ScaledEmd {
  double value = 0.0;     // emd / max_d, clamped to [0, 1]
  bool degenerate = false;  // max_d == 0; value is then 0
};

ScaledEmd scaled_emd(double emd, const GroundDistanceMatrix& d);

inline constexpr double kZeroWorkThreshold = 1e-12;

// Signed change of feature k along the optimal flow, weighted by the work each
// flow carries. Zero when the flow carries (almost) no work.
double pemd(const FlowSolution& flow, const GroundDistanceMatrix& d, const Som& som, std::size_t k);

struct PemdVector {
  std::vector<double> values;
};

PemdVector pemd_all(const FlowSolution& flow, const GroundDistanceMatrix& d, const Som& som);

}  // namespace somchange
