#include <cmath>
#include <random>

#include "doctest.h"
#include "somchange/change.hpp"
#include "somchange/error.hpp"
#include "support.hpp"

using namespace somchange;
using namespace testsupport;

namespace {

ChangeSummary summarize(const WeightedPattern& p, const WeightedPattern& q, const Som& som,
                        const ChangeOptions& opt = {}) {
  return summarize_change(p, q, som, default_regions(p, 0.8), default_regions(q, 0.8), opt);
}

}  // namespace

TEST_CASE("percentile regions") {
  SUBCASE("uniform pattern keeps every neuron") {
    const auto r = default_regions(make_pattern(std::vector<double>(6, 1.0)), 0.8);
    CHECK(r.neurons == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});
    CHECK(r.source == RegionSource::Percentile);
  }
  SUBCASE("point mass keeps only its neuron") {
    CHECK(default_regions(point_mass(9, 4), 0.8).neurons == std::vector<std::size_t>{4});
  }
  SUBCASE("ties at the threshold are included") {
    const auto p = make_pattern({0.1, 0.3, 0.3, 0.3, 0.0});
    CHECK(default_regions(p, 0.9).neurons == std::vector<std::size_t>{1, 2, 3});
  }
  SUBCASE("matches a counting rule") {
    std::mt19937_64 rng(89);
    for (int t = 0; t < 200; ++t) {
      const auto p = random_pattern(rng, 1 + t % 20, true);
      const double pct = 0.05 + 0.9 * static_cast<double>(t % 19) / 18.0;
      std::size_t n_pos = 0;
      for (double w : p.weights) n_pos += w > 0.0;
      const auto rank = static_cast<std::size_t>(std::floor(pct * static_cast<double>(n_pos - 1)));
      std::vector<std::size_t> expected;
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (p.weights[i] <= 0.0) continue;
        std::size_t at_or_below = 0;
        for (double w : p.weights) at_or_below += (w > 0.0 && w <= p.weights[i]);
        if (at_or_below >= rank + 1) expected.push_back(i);
      }
      CHECK(default_regions(p, pct).neurons == expected);
    }
  }
  SUBCASE("percentile must lie in (0, 1)") {
    for (double bad : {0.0, 1.0, -0.5, 1.5}) CHECK_THROWS_AS(default_regions(point_mass(3, 0), bad), Error);
  }
}

TEST_CASE("user regions") {
  const auto r = user_region({5, 1, 5, 3}, 9);
  CHECK(r.neurons == std::vector<std::size_t>{1, 3, 5});
  CHECK(r.source == RegionSource::User);
  CHECK_THROWS_AS(user_region({}, 9), Error);
  CHECK_THROWS_AS(user_region({9}, 9), Error);
}

TEST_CASE("direction") {
  CHECK(direction_of(0.0) == Direction::None);
  CHECK(direction_of(5e-10) == Direction::None);
  CHECK(direction_of(-5e-10) == Direction::None);
  CHECK(direction_of(1e-6) == Direction::Increase);
  CHECK(direction_of(-1e-6) == Direction::Decrease);
  CHECK(std::string(to_string(Direction::Increase)) == "increase");
  CHECK(z_to_t(-1.0) == 40.0);
}

TEST_CASE("identical patterns summarize to no change") {
  const auto som = rgb_toy_map();
  const auto p = masses(9, {{kRed, 0.2}, {kMint, 0.5}, {kCyan, 0.3}});
  const auto s = summarize(p, p, som);
  CHECK(s.emd <= 1e-12);
  CHECK(s.scaled_emd <= 1e-12);
  CHECK(s.overall_direction == Direction::None);
  REQUIRE(s.details.size() == 3);
  for (const auto& f : s.details) {
    CHECK(f.pemd == 0.0);
    CHECK(f.direction == Direction::None);
    CHECK_FALSE(f.significant);
    CHECK(f.scaled_pemd == doctest::Approx(0.1));
    CHECK(f.ref_value == doctest::Approx(f.chg_value));
  }
}

TEST_CASE("a move along two axes") {
  const auto som = rgb_toy_map();
  const auto s = summarize(point_mass(9, kGreen), point_mass(9, kBlue), som);
  CHECK(s.emd == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(s.scaled_emd == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-12));
  CHECK(s.details[0].pemd == doctest::Approx(0.0));
  CHECK(s.details[1].pemd == doctest::Approx(-1.0));
  CHECK(s.details[2].pemd == doctest::Approx(1.0));
  CHECK(s.details[0].direction == Direction::None);
  CHECK(s.details[1].direction == Direction::Decrease);
  CHECK(s.details[2].direction == Direction::Increase);
  CHECK(s.details[1].scaled_pemd == doctest::Approx(0.9));
  CHECK(s.details[1].ref_value == doctest::Approx(60.0));
  CHECK(s.details[1].chg_value == doctest::Approx(50.0));
  CHECK(s.details[1].display_range == ValueRange{50.0, 60.0});
  CHECK(s.overall_direction == Direction::None);
  CHECK(s.mean_feature_range == doctest::Approx(1.0));
  REQUIRE(s.flows.size() == 1);
  CHECK(s.flows[0] == Flow{kGreen, kBlue, 1.0});
}

TEST_CASE("overall direction follows the mean pemd") {
  const auto som = rgb_toy_map();
  CHECK(summarize(point_mass(9, kBlack), point_mass(9, kWhite), som).overall_direction == Direction::Increase);
  CHECK(summarize(point_mass(9, kWhite), point_mass(9, kRed), som).overall_direction == Direction::Decrease);
  const auto s = summarize(point_mass(9, kBlack), point_mass(9, kYellow), som);
  CHECK(s.mean_pemd == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("opposite movements cancel in pemd but not in emd") {
  const auto som = rgb_toy_map();
  const auto p = masses(9, {{kYellow, 0.5}, {kBlack, 0.5}});
  const auto q = masses(9, {{kRed, 0.5}, {kGreen, 0.5}});
  const auto s = summarize(p, q, som);
  CHECK(s.emd == doctest::Approx(1.0).epsilon(1e-12));
  for (const auto& f : s.details) CHECK(std::abs(f.pemd) <= 1e-12);
}

TEST_CASE("a spread that keeps the mean shows up in the region ranges") {
  const auto som = rgb_toy_map();
  const auto p = point_mass(9, kMint);
  const auto q = masses(9, {{kYellow, 0.5}, {kCyan, 0.5}});
  const auto s = summarize(p, q, som);
  CHECK(s.emd == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  for (const auto& f : s.details) CHECK(std::abs(f.pemd) <= 1e-12);
  CHECK(s.details[0].ref_value == doctest::Approx(s.details[0].chg_value));
  CHECK(s.details[0].ref_range == ValueRange{55.0, 55.0});
  CHECK(s.details[0].chg_range == ValueRange{50.0, 60.0});
}

TEST_CASE("region means lie inside region ranges and display ranges") {
  std::mt19937_64 rng(97);
  for (int t = 0; t < 100; ++t) {
    const auto som = random_map(rng, 12, 3);
    const auto p = random_pattern(rng, 12, true);
    const auto q = random_pattern(rng, 12, true);
    const auto s = summarize(p, q, som);
    for (const auto& f : s.details) {
      CHECK(f.ref_value >= f.ref_range.min);
      CHECK(f.ref_value <= f.ref_range.max);
      CHECK(f.chg_value >= f.chg_range.min);
      CHECK(f.chg_value <= f.chg_range.max);
      CHECK(f.ref_range.min >= f.display_range.min);
      CHECK(f.chg_range.max <= f.display_range.max);
      CHECK(f.scaled_pemd >= 0.1);
      CHECK(f.scaled_pemd <= 0.9);
    }
  }
}

TEST_CASE("a region without weight falls back to the argmax") {
  const auto som = rgb_toy_map();
  const auto p = masses(9, {{kRed, 0.7}, {kBlue, 0.3}});
  const auto s = summarize_change(p, p, som, user_region({kWhite}, 9), user_region({kBlue}, 9), {});
  CHECK(s.reference_region.fallback);
  CHECK_FALSE(s.changed_region.fallback);
  CHECK(s.details[0].ref_value == doctest::Approx(60.0));
  CHECK(s.details[2].chg_value == doctest::Approx(60.0));
}

TEST_CASE("ks can be restricted to the regions") {
  const auto som = rgb_toy_map();
  const auto p = masses(9, {{kBlack, 0.6}, {kRed, 0.4}});
  const auto q = masses(9, {{kBlack, 0.4}, {kRed, 0.6}});
  const auto r = user_region({kBlack}, 9);
  const auto c = user_region({kRed}, 9);
  const auto full = summarize_change(p, q, som, r, c, {0.05, KsScope::FullPattern});
  const auto regional = summarize_change(p, q, som, r, c, {0.05, KsScope::Region});
  CHECK(full.details[0].ks_statistic == doctest::Approx(0.2));
  CHECK(regional.details[0].ks_statistic == doctest::Approx(1.0));
}

TEST_CASE("summary rejects mismatched inputs") {
  const auto som = rgb_toy_map();
  const auto p = point_mass(9, 0);
  const auto r = user_region({0}, 9);
  CHECK_THROWS_AS(summarize_change(point_mass(4, 0), p, som, r, r), Error);
  CHECK_THROWS_AS(summarize_change(p, p, som, r, r, {1.5, KsScope::FullPattern}), Error);
  CHECK_THROWS_AS(summarize_change(p, p, som, r, RegionSelection{{12}, RegionSource::User}), Error);
}

TEST_CASE("summary json round trip") {
  std::mt19937_64 rng(101);
  for (int t = 0; t < 20; ++t) {
    const auto som = random_map(rng, 10, 4);
    const auto s = summarize(random_pattern(rng, 10, true), random_pattern(rng, 10, true), som);
    const auto j = to_json(s);
    CHECK(j.at("schema") == "somchange.change_summary/1");
    CHECK(change_summary_from_json(j) == s);
    CHECK(change_summary_from_json(nlohmann::ordered_json::parse(j.dump())) == s);
  }
  CHECK_THROWS_AS(change_summary_from_json(nlohmann::ordered_json{{"schema", "other"}}), Error);
}
