#include "somchange/som.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "somchange/error.hpp"

namespace somchange {

namespace {

const double kRowSpacing = std::sqrt(3.0) / 2.0;

void check_data(const Matrix& data) {
  if (data.rows() == 0 || data.cols() == 0) fail(ErrorKind::Data, "training data is empty");
  for (double v : data.values()) {
    if (!std::isfinite(v)) fail(ErrorKind::Data, "training data contains non-finite values");
  }
}

void check_query(const Som& som, std::span<const double> x) {
  if (x.size() != som.feature_count()) {
    fail(ErrorKind::DimensionMismatch, "query has " + std::to_string(x.size()) +
                                           " features, map has " +
                                           std::to_string(som.feature_count()));
  }
}

Matrix init_random_sample(const Matrix& data, std::size_t n, std::mt19937_64& rng) {
  Matrix protos(n, data.cols());
  std::vector<std::size_t> order(data.rows());
  std::iota(order.begin(), order.end(), 0);
  if (data.rows() >= n) {
    // Partial Fisher-Yates: the first n entries become a sample without replacement.
    for (std::size_t i = 0; i < n; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
      std::swap(order[i], order[pick(rng)]);
    }
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, data.rows() - 1);
    order.resize(n);
    for (auto& o : order) o = pick(rng);
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto src = data.row(order[i]);
    std::copy(src.begin(), src.end(), protos.row(i).begin());
  }
  return protos;
}

// Prototypes spread over the plane of the two leading principal components,
// spanning +-1 standard deviation along each.
Matrix init_pca_plane(const Matrix& data, const SomGrid& grid) {
  const auto rows = static_cast<Eigen::Index>(data.rows());
  const auto m = static_cast<Eigen::Index>(data.cols());
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> x(
      data.values().data(), rows, m);
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mean;
  const Eigen::MatrixXd cov =
      (centered.transpose() * centered) / std::max<double>(1.0, static_cast<double>(rows - 1));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  // Eigenvalues come out ascending.
  Eigen::VectorXd axis1 = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd axis2 = Eigen::VectorXd::Zero(m);
  axis1 = eig.eigenvectors().col(m - 1) * std::sqrt(std::max(0.0, eig.eigenvalues()(m - 1)));
  if (m >= 2) {
    axis2 = eig.eigenvectors().col(m - 2) * std::sqrt(std::max(0.0, eig.eigenvalues()(m - 2)));
  }

  Matrix protos(grid.size(), data.cols());
  const double wspan = grid.width() > 1 ? static_cast<double>(grid.width() - 1) : 1.0;
  const double hspan = grid.height() > 1 ? static_cast<double>(grid.height() - 1) : 1.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double a = grid.width() > 1 ? 2.0 * static_cast<double>(i % grid.width()) / wspan - 1.0 : 0.0;
    const double b = grid.height() > 1 ? 2.0 * static_cast<double>(i / grid.width()) / hspan - 1.0 : 0.0;
    for (Eigen::Index k = 0; k < m; ++k) {
      protos(i, static_cast<std::size_t>(k)) = mean(k) + a * axis1(k) + b * axis2(k);
    }
  }
  return protos;
}

}  // namespace

SomGrid::SomGrid(Topology topology, std::size_t width, std::size_t height)
    : topology_(topology), width_(width), height_(height) {
  if (width == 0 || height == 0) fail(ErrorKind::InvalidArgument, "grid must have positive width and height");
  positions_.reserve(width * height);
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      if (topology == Topology::Hexagonal) {
        positions_.push_back({static_cast<double>(c) + (r % 2 == 1 ? 0.5 : 0.0),
                              static_cast<double>(r) * kRowSpacing});
      } else {
        positions_.push_back({static_cast<double>(c), static_cast<double>(r)});
      }
    }
  }
}

double SomGrid::layout_distance(std::size_t a, std::size_t b) const {
  const auto& p = positions_.at(a);
  const auto& q = positions_.at(b);
  return std::hypot(p.x - q.x, p.y - q.y);
}

bool SomGrid::adjacent(std::size_t a, std::size_t b) const {
  return a != b && layout_distance(a, b) <= 1.0 + kAdjacencyTolerance;
}

std::vector<std::size_t> SomGrid::neighbors(std::size_t i) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < size(); ++j) {
    if (adjacent(i, j)) out.push_back(j);
  }
  return out;
}

void validate_features(std::span<const FeatureSpec> features) {
  std::set<std::string> names;
  for (std::size_t k = 0; k < features.size(); ++k) {
    const auto& f = features[k];
    if (f.index != k) fail(ErrorKind::Data, "feature indices must be contiguous from 0");
    if (!names.insert(f.name).second) fail(ErrorKind::Data, "duplicate feature name '" + f.name + "'");
    if (!(f.z_std > 0.0) || !std::isfinite(f.z_std) || !std::isfinite(f.z_mean)) {
      fail(ErrorKind::Data, "feature '" + f.name + "' has invalid standardization parameters");
    }
  }
}

std::vector<FeatureSpec> default_features(std::size_t m) {
  std::vector<FeatureSpec> out;
  out.reserve(m);
  for (std::size_t k = 0; k < m; ++k) out.push_back({"f" + std::to_string(k), k, 0.0, 1.0});
  return out;
}

void Som::validate() const {
  if (grid.size() == 0) fail(ErrorKind::InvalidArgument, "map has no neurons");
  if (prototypes.rows() != grid.size()) fail(ErrorKind::Data, "prototype count does not match grid size");
  if (prototypes.cols() == 0) fail(ErrorKind::Data, "prototypes have no features");
  if (features.size() != prototypes.cols()) fail(ErrorKind::Data, "feature specs do not match prototype dimensionality");
  validate_features(features);
  for (double v : prototypes.values()) {
    if (!std::isfinite(v)) fail(ErrorKind::Numeric, "prototype contains non-finite value");
  }
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) fail(ErrorKind::Numeric, "kernel bandwidth must be positive");
}

void TrainConfig::validate() const {
  if (epochs < 1) fail(ErrorKind::InvalidArgument, "epochs must be at least 1");
  if (!(final_radius >= 0.5)) fail(ErrorKind::InvalidArgument, "final radius must be at least 0.5");
  if (!(initial_radius >= final_radius)) fail(ErrorKind::InvalidArgument, "initial radius must not be below final radius");
}

Som train_som(const Matrix& data, const SomGrid& grid, const TrainConfig& cfg,
              std::vector<FeatureSpec> features, TrainReport* report) {
  check_data(data);
  if (grid.size() == 0) fail(ErrorKind::InvalidArgument, "grid has zero area");
  cfg.validate();
  if (features.empty()) features = default_features(data.cols());
  if (features.size() != data.cols()) fail(ErrorKind::DimensionMismatch, "feature specs do not match data columns");
  validate_features(features);

  const std::size_t n = grid.size();
  const std::size_t m = data.cols();

  Som som;
  som.grid = grid;
  som.features = std::move(features);
  std::mt19937_64 rng(cfg.seed);
  som.prototypes = cfg.init == InitMethod::PcaPlane ? init_pca_plane(data, grid)
                                                    : init_random_sample(data, n, rng);

  // Squared layout distances do not change across epochs.
  std::vector<double> grid_d2(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double g = grid.layout_distance(i, j);
      grid_d2[i * n + j] = g * g;
    }
  }

  std::vector<double> cluster_sum(n * m);
  std::vector<double> cluster_count(n);
  std::vector<double> kernel(n * n);
  if (report) report->qe_per_epoch.clear();

  for (std::uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double t = cfg.epochs == 1 ? 1.0 : static_cast<double>(epoch) / (cfg.epochs - 1);
    const double sigma = cfg.initial_radius + (cfg.final_radius - cfg.initial_radius) * t;
    const double inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);

    std::fill(cluster_sum.begin(), cluster_sum.end(), 0.0);
    std::fill(cluster_count.begin(), cluster_count.end(), 0.0);
    for (std::size_t r = 0; r < data.rows(); ++r) {
      auto x = data.row(r);
      const std::size_t b = bmu(som, x);
      cluster_count[b] += 1.0;
      for (std::size_t k = 0; k < m; ++k) cluster_sum[b * m + k] += x[k];
    }

    for (std::size_t i = 0; i < n * n; ++i) kernel[i] = std::exp(-grid_d2[i] * inv_two_sigma2);

    for (std::size_t i = 0; i < n; ++i) {
      double den = 0.0;
      std::vector<double> num(m, 0.0);
      for (std::size_t b = 0; b < n; ++b) {
        if (cluster_count[b] == 0.0) continue;
        const double h = kernel[i * n + b];
        den += h * cluster_count[b];
        for (std::size_t k = 0; k < m; ++k) num[k] += h * cluster_sum[b * m + k];
      }
      if (den > std::numeric_limits<double>::min()) {
        for (std::size_t k = 0; k < m; ++k) som.prototypes(i, k) = num[k] / den;
      }
    }
    if (report) report->qe_per_epoch.push_back(quantization_error(som, data));
  }

  som.bandwidth = std::max(quantization_error(som, data), 1e-9);
  return som;
}

std::size_t bmu(const Som& som, std::span<const double> x) {
  check_query(som, x);
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < som.neuron_count(); ++i) {
    const double d = squared_distance(x, som.prototypes.row(i));
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

std::pair<std::size_t, std::size_t> two_best(const Som& som, std::span<const double> x) {
  check_query(som, x);
  if (som.neuron_count() < 2) fail(ErrorKind::InvalidArgument, "map needs at least two neurons");
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::size_t first = 0, second = 0;
  double d1 = inf, d2 = inf;
  for (std::size_t i = 0; i < som.neuron_count(); ++i) {
    const double d = squared_distance(x, som.prototypes.row(i));
    if (d < d1) {
      second = first;
      d2 = d1;
      first = i;
      d1 = d;
    } else if (d < d2) {
      second = i;
      d2 = d;
    }
  }
  return {first, second};
}

double quantization_error(const Som& som, const Matrix& data) {
  if (data.rows() == 0) fail(ErrorKind::Data, "quantization error of empty data");
  double sum = 0.0;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    auto x = data.row(r);
    sum += euclidean_distance(x, som.prototypes.row(bmu(som, x)));
  }
  return sum / static_cast<double>(data.rows());
}

double topographic_error(const Som& som, const Matrix& data) {
  if (data.rows() == 0) fail(ErrorKind::Data, "topographic error of empty data");
  std::size_t errors = 0;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    const auto [a, b] = two_best(som, data.row(r));
    if (!som.grid.adjacent(a, b)) ++errors;
  }
  return static_cast<double>(errors) / static_cast<double>(data.rows());
}

}  // namespace somchange
