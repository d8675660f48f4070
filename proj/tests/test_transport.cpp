#include <chrono>
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles/transport_oracle.hpp"
#include "somchange/error.hpp"
#include "somchange/transport.hpp"
#include "support.hpp"

using namespace somchange;
using namespace testsupport;

namespace {

void check_feasible(const FlowSolution& sol, const std::vector<double>& supply, const std::vector<double>& demand,
                    double tol) {
  std::vector<double> out(supply.size(), 0.0), in(demand.size(), 0.0);
  double total = 0.0;
  for (const auto& f : sol.flows) {
    CHECK(f.mass > 0.0);
    out[f.from] += f.mass;
    in[f.to] += f.mass;
    total += f.mass;
  }
  for (std::size_t i = 0; i < supply.size(); ++i) CHECK(out[i] <= supply[i] + tol);
  for (std::size_t j = 0; j < demand.size(); ++j) CHECK(in[j] <= demand[j] + tol);
  double s = 0.0, t = 0.0;
  for (double v : supply) s += v;
  for (double v : demand) t += v;
  CHECK(std::abs(total - std::min(s, t)) <= tol);
  CHECK(std::abs(sol.total_flow - total) <= tol);
  for (std::size_t k = 1; k < sol.flows.size(); ++k) {
    const auto& a = sol.flows[k - 1];
    const auto& b = sol.flows[k];
    CHECK((a.from < b.from || (a.from == b.from && a.to < b.to)));
  }
}

double recompute_pemd(const FlowSolution& sol, const GroundDistanceMatrix& d, const Som& som, std::size_t k) {
  double num = 0.0, den = 0.0;
  for (const auto& f : sol.flows) {
    const double w = f.mass * d(f.from, f.to);
    num += w * (som.prototypes(f.to, k) - som.prototypes(f.from, k));
    den += w;
  }
  return den < 1e-12 ? 0.0 : num / den;
}

}  // namespace

TEST_CASE("ground distances") {
  SUBCASE("identical prototypes give an all-zero matrix") {
    Matrix protos(4, 2);
    for (std::size_t i = 0; i < 4; ++i) {
      protos(i, 0) = 1.5;
      protos(i, 1) = -2.0;
    }
    const auto d = ground_distances(protos);
    for (double v : d.d.values()) CHECK(v == 0.0);
    CHECK(d.max_d == 0.0);
  }
  SUBCASE("three-four-five") {
    Matrix protos(2, 2);
    protos(1, 0) = 3.0;
    protos(1, 1) = 4.0;
    const auto d = ground_distances(protos);
    CHECK(d(0, 1) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(d(1, 0) == d(0, 1));
    CHECK(d.max_d == doctest::Approx(5.0));
  }
  SUBCASE("symmetric with zero diagonal") {
    std::mt19937_64 rng(2);
    const auto som = random_map(rng, 15, 4);
    const auto d = ground_distances(som);
    for (std::size_t i = 0; i < 15; ++i) {
      CHECK(d(i, i) == 0.0);
      for (std::size_t j = 0; j < 15; ++j) {
        CHECK(d(i, j) == d(j, i));
        CHECK(d(i, j) <= d.max_d);
      }
    }
  }
}

TEST_CASE("emd on small worked cases") {
  const auto som = rgb_toy_map();
  const auto d = ground_distances(som);

  SUBCASE("identical patterns") {
    const auto p = masses(9, {{kRed, 0.25}, {kBlue, 0.5}, {kWhite, 0.25}});
    const auto r = solve_emd(p, p, d);
    CHECK(r.emd == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.flow.total_cost <= 1e-12);
  }
  SUBCASE("two neurons two apart") {
    Matrix protos(2, 1);
    protos(1, 0) = 2.0;
    const auto d2 = ground_distances(protos);
    const auto r = solve_emd(point_mass(2, 0), point_mass(2, 1), d2);
    CHECK(r.emd == doctest::Approx(2.0).epsilon(1e-12));
    REQUIRE(r.flow.flows.size() == 1);
    CHECK(r.flow.flows[0] == Flow{0, 1, 1.0});
  }
  SUBCASE("pattern on the wrong map is rejected") {
    CHECK_THROWS_AS(solve_emd(point_mass(4, 0), point_mass(9, 1), d), Error);
  }
  SUBCASE("pattern that does not sum to one is rejected") {
    CHECK_THROWS_AS(solve_emd(masses(9, {{0, 0.5}}), point_mass(9, 1), d), Error);
  }
}

TEST_CASE("transport matches vertex enumeration on small instances") {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<std::size_t> size(1, 3);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = size(rng);
    const auto som = random_map(rng, n, 2);
    const auto d = ground_distances(som);
    const auto p = random_pattern(rng, n, t % 2 == 0);
    const auto q = random_pattern(rng, n, t % 3 == 0);
    const auto r = solve_emd(p, q, d);
    const double expected = oracle::min_cost_by_vertex_enumeration(p.weights, q.weights, d.d.values());
    CHECK(std::abs(r.flow.total_cost - expected) <= 1e-7);
    check_feasible(r.flow, p.weights, q.weights, 1e-9);
  }
}

TEST_CASE("transport matches vertex enumeration on rectangular instances") {
  std::mt19937_64 rng(43);
  std::uniform_int_distribution<std::size_t> size(1, 4);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int t = 0; t < 200; ++t) {
    const std::size_t r = size(rng), c = size(rng);
    auto supply = random_pattern(rng, r).weights;
    auto demand = random_pattern(rng, c).weights;
    Matrix cost(r, c);
    for (double& v : cost.values()) v = u(rng);
    const auto sol = solve_transport(supply, demand, cost);
    const double expected = oracle::min_cost_by_vertex_enumeration(supply, demand, cost.values());
    CHECK(std::abs(sol.total_cost - expected) <= 1e-7);
    check_feasible(sol, supply, demand, 1e-9);
  }
}

TEST_CASE("unequal totals move the smaller mass") {
  Matrix cost(2, 2);
  cost(0, 0) = 1.0;
  cost(0, 1) = 5.0;
  cost(1, 0) = 4.0;
  cost(1, 1) = 2.0;
  const std::vector<double> supply{0.6, 0.4};
  const std::vector<double> demand{0.3, 0.2};
  const auto sol = solve_transport(supply, demand, cost);
  check_feasible(sol, supply, demand, 1e-12);
  CHECK(sol.total_flow == doctest::Approx(0.5));
  CHECK(sol.total_cost == doctest::Approx(0.3 * 1.0 + 0.2 * 2.0));
}

TEST_CASE("transport rejects malformed instances") {
  Matrix cost(2, 2);
  const std::vector<double> ok{0.5, 0.5};
  const std::vector<double> neg{1.5, -0.5};
  const std::vector<double> three{0.2, 0.3, 0.5};
  CHECK_THROWS_AS(solve_transport(neg, ok, cost), Error);
  CHECK_THROWS_AS(solve_transport(three, ok, cost), Error);
  const std::vector<double> zeros{0.0, 0.0};
  const auto empty = solve_transport(zeros, ok, cost);
  CHECK(empty.flows.empty());
  CHECK(empty.total_flow == 0.0);
  Matrix bad(2, 2);
  bad(0, 1) = std::nan("");
  CHECK_THROWS_AS(solve_transport(ok, ok, bad), Error);
}

TEST_CASE("emd behaves as a metric on a fixed map") {
  std::mt19937_64 rng(47);
  for (int t = 0; t < 100; ++t) {
    const auto som = random_map(rng, 8, 3);
    const auto d = ground_distances(som);
    const auto p = random_pattern(rng, 8, true);
    const auto q = random_pattern(rng, 8, true);
    const auto s = random_pattern(rng, 8, true);
    const double pq = solve_emd(p, q, d).emd;
    const double qp = solve_emd(q, p, d).emd;
    const double qs = solve_emd(q, s, d).emd;
    const double ps = solve_emd(p, s, d).emd;
    CHECK(pq >= 0.0);
    CHECK(std::abs(pq - qp) <= 1e-9);
    CHECK(ps <= pq + qs + 1e-7);
    CHECK(solve_emd(p, p, d).emd <= 1e-12);
  }
}

TEST_CASE("emd on a full-size map stays fast") {
  std::mt19937_64 rng(53);
  const auto som = random_map(rng, 120, 5);
  const auto d = ground_distances(som);
  const auto start = std::chrono::steady_clock::now();
  for (int t = 0; t < 5; ++t) {
    const auto p = random_pattern(rng, 120);
    const auto q = random_pattern(rng, 120);
    const auto r = solve_emd(p, q, d);
    check_feasible(r.flow, p.weights, q.weights, 1e-9);
    CHECK(r.emd <= d.max_d + 1e-12);
    // Any feasible plan is an upper bound; the product coupling is one.
    double independent = 0.0;
    for (std::size_t i = 0; i < 120; ++i) {
      for (std::size_t j = 0; j < 120; ++j) independent += p.weights[i] * q.weights[j] * d(i, j);
    }
    CHECK(r.emd <= independent + 1e-9);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(secs < 10.0);
}

TEST_CASE("scaled emd") {
  const auto som = rgb_toy_map();
  const auto d = ground_distances(som);
  const auto r = solve_emd(point_mass(9, kBlack), point_mass(9, kWhite), d);
  const auto s = scaled_emd(r.emd, d);
  CHECK(s.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(s.degenerate);

  Matrix same(3, 2);
  const auto flat = ground_distances(same);
  const auto z = scaled_emd(0.0, flat);
  CHECK(z.value == 0.0);
  CHECK(z.degenerate);
}

TEST_CASE("pemd on hand-built flows") {
  const auto som = rgb_toy_map();
  const auto d = ground_distances(som);

  SUBCASE("half green to red, half green to blue") {
    FlowSolution f;
    f.flows = {{kGreen, kRed, 0.5}, {kGreen, kBlue, 0.5}};
    f.total_flow = 1.0;
    const auto v = pemd_all(f, d, som).values;
    REQUIRE(v.size() == 3);
    CHECK(v[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(v[1] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(v[2] == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("equal opposite flows cancel") {
    FlowSolution f;
    f.flows = {{kRed, kGreen, 0.5}, {kGreen, kRed, 0.5}};
    f.total_flow = 1.0;
    for (double v : pemd_all(f, d, som).values) CHECK(std::abs(v) <= 1e-12);
  }
  SUBCASE("flow without work") {
    FlowSolution f;
    f.flows = {{kRed, kRed, 1.0}};
    f.total_flow = 1.0;
    for (double v : pemd_all(f, d, som).values) CHECK(v == 0.0);
  }
  SUBCASE("feature index out of range") {
    FlowSolution f;
    CHECK_THROWS_AS(pemd(f, d, som, 3), Error);
  }
}

TEST_CASE("pemd agrees with an independent recomputation and stays in range") {
  std::mt19937_64 rng(59);
  for (int t = 0; t < 100; ++t) {
    const auto som = random_map(rng, 10, 3);
    const auto d = ground_distances(som);
    const auto r = solve_emd(random_pattern(rng, 10, true), random_pattern(rng, 10, true), d);
    const auto v = pemd_all(r.flow, d, som).values;
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(std::abs(v[k] - recompute_pemd(r.flow, d, som, k)) <= 1e-9);
      double lo = som.prototypes(0, k), hi = lo;
      for (std::size_t i = 0; i < 10; ++i) {
        lo = std::min(lo, som.prototypes(i, k));
        hi = std::max(hi, som.prototypes(i, k));
      }
      CHECK(std::abs(v[k]) <= hi - lo + 1e-9);
    }
  }
}
