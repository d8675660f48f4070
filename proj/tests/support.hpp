#pragma once

#include <random>
#include <vector>

#include "somchange/association.hpp"
#include "somchange/som.hpp"

namespace testsupport {

// 3x3 map over RGB space: the eight cube corners plus a light-green cell
// halfway between green and white along the R and B axes.
enum RgbNeuron : std::size_t { kBlack, kRed, kGreen, kBlue, kMint, kYellow, kCyan, kMagenta, kWhite };

inline somchange::Som rgb_toy_map() {
  using somchange::FeatureSpec;
  somchange::Som som;
  som.grid = somchange::SomGrid(somchange::Topology::Rectangular, 3, 3);
  const double protos[9][3] = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0.5, 1, 0.5},
                               {1, 1, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 1}};
  som.prototypes = somchange::Matrix(9, 3);
  for (std::size_t i = 0; i < 9; ++i) {
    for (std::size_t k = 0; k < 3; ++k) som.prototypes(i, k) = protos[i][k];
  }
  som.features = {FeatureSpec{"R", 0, 0.0, 1.0}, FeatureSpec{"G", 1, 0.0, 1.0}, FeatureSpec{"B", 2, 0.0, 1.0}};
  som.bandwidth = 0.5;
  return som;
}

inline somchange::WeightedPattern point_mass(std::size_t n, std::size_t at) {
  std::vector<double> w(n, 0.0);
  w[at] = 1.0;
  return {"", w};
}

inline somchange::WeightedPattern masses(std::size_t n, std::vector<std::pair<std::size_t, double>> entries) {
  std::vector<double> w(n, 0.0);
  for (auto [i, v] : entries) w[i] = v;
  return {"", w};
}

// Random map with `n` neurons on a 1-row rectangular grid.
inline somchange::Som random_map(std::mt19937_64& rng, std::size_t n, std::size_t m, double spread = 2.0) {
  std::normal_distribution<double> g(0.0, spread);
  somchange::Som som;
  som.grid = somchange::SomGrid(somchange::Topology::Rectangular, n, 1);
  som.prototypes = somchange::Matrix(n, m);
  for (double& v : som.prototypes.values()) v = g(rng);
  som.features = somchange::default_features(m);
  som.bandwidth = 1.0;
  return som;
}

// Random pattern; with `sparse`, some neurons get exactly zero weight.
inline somchange::WeightedPattern random_pattern(std::mt19937_64& rng, std::size_t n, bool sparse = false) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(n);
  double sum = 0.0;
  for (auto& v : w) {
    v = (sparse && u(rng) < 0.3) ? 0.0 : u(rng);
    sum += v;
  }
  if (sum == 0.0) {
    w[0] = 1.0;
    sum = 1.0;
  }
  for (auto& v : w) v /= sum;
  return {"", w};
}

inline somchange::Matrix random_rows(std::mt19937_64& rng, std::size_t rows, std::size_t m, double spread = 1.0) {
  std::normal_distribution<double> g(0.0, spread);
  somchange::Matrix x(rows, m);
  for (double& v : x.values()) v = g(rng);
  return x;
}

}  // namespace testsupport
