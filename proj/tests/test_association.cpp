#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "somchange/association.hpp"
#include "somchange/error.hpp"
#include "support.hpp"

using namespace somchange;
using namespace testsupport;

namespace {

std::vector<double> direct_activation(const Som& som, std::span<const double> x) {
  std::vector<double> a(som.neuron_count());
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d2 = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) d2 += std::pow(x[k] - som.prototypes(i, k), 2);
    a[i] = std::exp(-d2 / (2.0 * som.bandwidth * som.bandwidth));
    sum += a[i];
  }
  for (double& v : a) v /= sum;
  return a;
}

Matrix brute_association(const Som& in, const Som& out, const Matrix& x, const Matrix& y) {
  Matrix m(in.neuron_count(), out.neuron_count());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto ai = direct_activation(in, x.row(r));
    const auto ao = direct_activation(out, y.row(r));
    for (std::size_t i = 0; i < ai.size(); ++i) {
      for (std::size_t j = 0; j < ao.size(); ++j) m(i, j) += ai[i] * ao[j];
    }
  }
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j);
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = s > 0.0 ? m(i, j) / s : 1.0 / static_cast<double>(m.cols());
  }
  return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.values().size(); ++k) d = std::max(d, std::abs(a.values()[k] - b.values()[k]));
  return d;
}

}  // namespace

TEST_CASE("input activation") {
  std::mt19937_64 rng(61);

  SUBCASE("tiny bandwidth concentrates on the nearest prototype") {
    auto som = random_map(rng, 7, 3);
    som.bandwidth = 1e-3;
    const auto x = som.prototypes.row(4);
    const auto a = input_activation(som, x);
    CHECK(a[4] > 0.99);
  }
  SUBCASE("equidistant prototypes share weight equally") {
    Matrix protos(4, 2);
    protos(0, 0) = 1.0;
    protos(1, 0) = -1.0;
    protos(2, 1) = 1.0;
    protos(3, 1) = -1.0;
    Som som;
    som.grid = SomGrid(Topology::Rectangular, 4, 1);
    som.prototypes = protos;
    som.features = default_features(2);
    som.bandwidth = 0.7;
    const std::vector<double> origin{0.0, 0.0};
    for (double v : input_activation(som, origin)) CHECK(v == doctest::Approx(0.25).epsilon(1e-12));
  }
  SUBCASE("sums to one and matches the direct formula") {
    for (int t = 0; t < 50; ++t) {
      auto som = random_map(rng, 12, 3);
      som.bandwidth = 0.5 + static_cast<double>(t) / 25.0;
      const auto x = random_rows(rng, 1, 3, 2.0);
      const auto a = input_activation(som, x.row(0));
      CHECK(std::abs(std::accumulate(a.begin(), a.end(), 0.0) - 1.0) <= 1e-12);
      const auto b = direct_activation(som, x.row(0));
      for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-12);
    }
  }
  SUBCASE("far-away inputs do not underflow") {
    auto som = random_map(rng, 5, 2);
    som.bandwidth = 0.01;
    const std::vector<double> far{1e3, -1e3};
    const auto a = input_activation(som, far);
    CHECK(std::abs(std::accumulate(a.begin(), a.end(), 0.0) - 1.0) <= 1e-12);
  }
  SUBCASE("wrong dimension") {
    const auto som = random_map(rng, 5, 2);
    const std::vector<double> x{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(input_activation(som, x), Error);
  }
}

TEST_CASE("association matrix") {
  std::mt19937_64 rng(67);
  auto in = random_map(rng, 6, 2);
  auto out = random_map(rng, 5, 3);

  SUBCASE("a single sharp record picks one cell") {
    in.bandwidth = 1e-3;
    out.bandwidth = 1e-3;
    Matrix x, y;
    x.append_row(in.prototypes.row(2));
    y.append_row(out.prototypes.row(3));
    const auto a = build_association(in, out, x, y);
    CHECK(a.row_normalized);
    CHECK(a.entries(2, 3) > 0.99);
  }
  SUBCASE("rows are normalized; untouched rows are uniform") {
    in.bandwidth = 1e-3;
    Matrix x, y;
    x.append_row(in.prototypes.row(0));
    y.append_row(out.prototypes.row(0));
    const auto a = build_association(in, out, x, y);
    for (std::size_t i = 0; i < 6; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < 5; ++j) s += a.entries(i, j);
      CHECK(std::abs(s - 1.0) <= 1e-12);
    }
  }
  SUBCASE("matches a brute-force double loop") {
    const auto x = random_rows(rng, 20, 2, 2.0);
    const auto y = random_rows(rng, 20, 3, 2.0);
    const auto a = build_association(in, out, x, y);
    CHECK(max_abs_diff(a.entries, brute_association(in, out, x, y)) <= 1e-12);
  }
  SUBCASE("duplicating every record leaves the matrix unchanged") {
    const auto x = random_rows(rng, 15, 2, 2.0);
    const auto y = random_rows(rng, 15, 3, 2.0);
    Matrix x2 = x, y2 = y;
    for (std::size_t r = 0; r < x.rows(); ++r) {
      x2.append_row(x.row(r));
      y2.append_row(y.row(r));
    }
    CHECK(max_abs_diff(build_association(in, out, x, y).entries, build_association(in, out, x2, y2).entries) <=
          1e-12);
  }
  SUBCASE("record order does not matter, bit for bit") {
    const auto x = random_rows(rng, 30, 2, 2.0);
    const auto y = random_rows(rng, 30, 3, 2.0);
    std::vector<std::size_t> perm(30);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix xp, yp;
    for (auto r : perm) {
      xp.append_row(x.row(r));
      yp.append_row(y.row(r));
    }
    CHECK(build_association(in, out, x, y) == build_association(in, out, xp, yp));
  }
  SUBCASE("error paths") {
    CHECK_THROWS_AS(build_association(in, out, Matrix{}, Matrix{}), Error);
    const auto x = random_rows(rng, 3, 2);
    const auto y = random_rows(rng, 4, 3);
    CHECK_THROWS_AS(build_association(in, out, x, y), Error);
    const auto y_wide = random_rows(rng, 3, 4);
    CHECK_THROWS_AS(build_association(in, out, x, y_wide), Error);
  }
}

TEST_CASE("conditional pattern") {
  std::mt19937_64 rng(71);
  auto in = random_map(rng, 6, 2);
  const auto out = random_map(rng, 5, 3);
  const auto x = random_rows(rng, 25, 2, 2.0);
  const auto y = random_rows(rng, 25, 3, 2.0);
  const auto assoc = build_association(in, out, x, y);

  SUBCASE("a sharp input reproduces its association row") {
    auto sharp = in;
    sharp.bandwidth = 1e-4;
    const auto p = conditional_pattern(sharp.prototypes.row(1), assoc, sharp, out, "out");
    CHECK(p.som_id == "out");
    for (std::size_t j = 0; j < 5; ++j) CHECK(std::abs(p.weights[j] - assoc.entries(1, j)) <= 1e-9);
  }
  SUBCASE("a uniform association gives a uniform pattern") {
    AssociationMatrix flat{Matrix(6, 5), true};
    for (double& v : flat.entries.values()) v = 0.2;
    const auto p = conditional_pattern(x.row(0), flat, in, out);
    for (double w : p.weights) CHECK(w == doctest::Approx(0.2).epsilon(1e-12));
  }
  SUBCASE("a column that is zero everywhere gets no weight") {
    auto masked = assoc;
    for (std::size_t i = 0; i < 6; ++i) masked.entries(i, 2) = 0.0;
    const auto p = conditional_pattern(x.row(3), masked, in, out);
    CHECK(p.weights[2] == 0.0);
    CHECK_NOTHROW(p.validate());
  }
  SUBCASE("matches a brute-force product") {
    for (std::size_t r = 0; r < x.rows(); ++r) {
      const auto a = direct_activation(in, x.row(r));
      std::vector<double> w(5, 0.0);
      for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = 0; j < 5; ++j) w[j] += a[i] * assoc.entries(i, j);
      }
      const double s = std::accumulate(w.begin(), w.end(), 0.0);
      const auto p = conditional_pattern(x.row(r), assoc, in, out);
      for (std::size_t j = 0; j < 5; ++j) CHECK(std::abs(p.weights[j] - w[j] / s) <= 1e-12);
    }
  }
  SUBCASE("error paths") {
    CHECK_THROWS_AS(conditional_pattern(x.row(0), AssociationMatrix{}, in, out), Error);
    CHECK_THROWS_AS(conditional_pattern(x.row(0), assoc, out, in), Error);
    const std::vector<double> wrong{1.0};
    CHECK_THROWS_AS(conditional_pattern(wrong, assoc, in, out), Error);
  }
}

TEST_CASE("weighted pattern validation") {
  CHECK_NOTHROW(make_pattern({1.0, 3.0}).validate());
  CHECK(make_pattern({1.0, 3.0}).weights[1] == doctest::Approx(0.75));
  CHECK_THROWS_AS(make_pattern({0.0, 0.0}), Error);
  CHECK_THROWS_AS(make_pattern({1.0, -1.0}), Error);
  CHECK_THROWS_AS((WeightedPattern{"", {0.5, 0.6}}.validate()), Error);
  CHECK_THROWS_AS((WeightedPattern{"", {}}.validate()), Error);
}
