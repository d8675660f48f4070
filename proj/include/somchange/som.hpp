#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "somchange/matrix.hpp"

namespace somchange {

struct FeatureSpec {
  std::string name;
  std::size_t index = 0;
  double z_mean = 0.0;  // raw units
  double z_std = 1.0;   // raw units, > 0

  double to_z(double raw) const { return (raw - z_mean) / z_std; }
  double to_raw(double z) const { return z * z_std + z_mean; }

  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

// Throws unless names are unique, indices are 0..m-1 in order and every std is
// positive and finite.
void validate_features(std::span<const FeatureSpec> features);

// Features named f0..f{m-1} with identity standardization.
std::vector<FeatureSpec> default_features(std::size_t m);

enum class Topology : std::uint8_t { Hexagonal = 0, Rectangular = 1 };

struct LayoutPoint {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const LayoutPoint&, const LayoutPoint&) = default;
};

// Neuron i sits at column i % width, row i / width. Hexagonal grids shift odd
// rows by half a cell and space rows by sqrt(3)/2, so all six neighbours of an
// interior neuron are at layout distance 1.
class SomGrid {
 public:
  SomGrid() = default;
  SomGrid(Topology topology, std::size_t width, std::size_t height);

  Topology topology() const noexcept { return topology_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return positions_.size(); }
  const std::vector<LayoutPoint>& positions() const noexcept { return positions_; }
  const LayoutPoint& position(std::size_t i) const { return positions_.at(i); }

  double layout_distance(std::size_t a, std::size_t b) const;
  bool adjacent(std::size_t a, std::size_t b) const;
  std::vector<std::size_t> neighbors(std::size_t i) const;

  friend bool operator==(const SomGrid&, const SomGrid&) = default;

 private:
  Topology topology_ = Topology::Hexagonal;
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<LayoutPoint> positions_;
};

inline constexpr double kAdjacencyTolerance = 1e-6;

// A trained map. Prototypes are stored in Z-score units, one row per neuron.
// `bandwidth` is the soft-assignment kernel width used by the association
// module: the mean distance from training rows to their nearest prototype,
// frozen at training time.
struct Som {
  SomGrid grid;
  Matrix prototypes;
  std::vector<FeatureSpec> features;
  double bandwidth = 1.0;

  std::size_t neuron_count() const noexcept { return prototypes.rows(); }
  std::size_t feature_count() const noexcept { return prototypes.cols(); }

  // Throws on any violated structural invariant.
  void validate() const;

  friend bool operator==(const Som&, const Som&) = default;
};

enum class InitMethod : std::uint8_t { RandomSample = 0, PcaPlane = 1 };

struct TrainConfig {
  std::uint32_t epochs = 50;
  double initial_radius = 3.0;
  double final_radius = 0.5;
  std::uint64_t seed = 1;
  InitMethod init = InitMethod::RandomSample;

  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

// Per-epoch quantization error, recorded while training.
struct TrainReport {
  std::vector<double> qe_per_epoch;
};

// Batch SOM with a Gaussian neighbourhood over layout distance. The radius
// decays linearly from initial_radius to final_radius across the epochs.
Som train_som(const Matrix& data, const SomGrid& grid, const TrainConfig& cfg,
              std::vector<FeatureSpec> features = {}, TrainReport* report = nullptr);

std::size_t bmu(const Som& som, std::span<const double> x);

// Best and second-best matching units (ties broken by lowest index).
std::pair<std::size_t, std::size_t> two_best(const Som& som, std::span<const double> x);

double quantization_error(const Som& som, const Matrix& data);
double topographic_error(const Som& som, const Matrix& data);

}  // namespace somchange
