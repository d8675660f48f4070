#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"
#include "somchange/association.hpp"
#include "somchange/som.hpp"
#include "somchange/transport.hpp"

namespace somchange {

enum class RegionSource { User, Percentile };

struct RegionSelection {
  std::vector<std::size_t> neurons;  // ascending, unique
  RegionSource source = RegionSource::User;

  friend bool operator==(const RegionSelection&, const RegionSelection&) = default;
};

// Sorts and de-duplicates; throws on an empty set or an index outside the map.
RegionSelection user_region(std::vector<std::size_t> neurons, std::size_t neuron_count);

// Neurons whose weight reaches the `percentile` quantile of the pattern's
// positive weights (lower order statistic, ties included). Never empty.
RegionSelection default_regions(const WeightedPattern& pattern, double percentile);

enum class Direction { None, Increase, Decrease };

inline constexpr double kDirectionTolerance = 1e-9;

Direction direction_of(double value);
const char* to_string(Direction d);

struct ValueRange {
  double min = 0.0;
  double max = 0.0;
  friend bool operator==(const ValueRange&, const ValueRange&) = default;
};

inline double z_to_t(double z) { return 50.0 + 10.0 * z; }

struct FeatureChangeDetail {
  std::string name;
  double pemd = 0.0;          // Z units
  double scaled_pemd = 0.1;   // display radius in [0.1, 0.9]
  Direction direction = Direction::None;
  bool significant = false;
  double ks_statistic = 0.0;
  double ks_critical = 0.0;
  double ref_value = 50.0;    // region-weighted mean, T units
  double chg_value = 50.0;
  ValueRange ref_range;       // T units
  ValueRange chg_range;
  ValueRange display_range;   // prototype range of the feature, T units

  friend bool operator==(const FeatureChangeDetail&, const FeatureChangeDetail&) = default;
};

struct RegionReport {
  RegionSelection selection;
  // The selection carried no weight and the pattern argmax was used instead.
  bool fallback = false;

  friend bool operator==(const RegionReport&, const RegionReport&) = default;
};

struct ChangeSummary {
  double emd = 0.0;
  double scaled_emd = 0.0;
  bool emd_degenerate = false;
  double mean_pemd = 0.0;
  Direction overall_direction = Direction::None;
  double mean_feature_range = 0.0;  // Z units, average prototype range over features
  double alpha = 0.05;
  std::vector<FeatureChangeDetail> details;
  RegionReport reference_region;
  RegionReport changed_region;
  std::vector<Flow> flows;

  friend bool operator==(const ChangeSummary&, const ChangeSummary&) = default;
};

enum class KsScope { FullPattern, Region };

struct ChangeOptions {
  double alpha = 0.05;
  KsScope ks_scope = KsScope::FullPattern;
};

ChangeSummary summarize_change(const WeightedPattern& p, const WeightedPattern& q, const Som& som,
                               const RegionSelection& rp, const RegionSelection& rq,
                               const ChangeOptions& options = {});

// Same, with the map's ground distances already computed.
ChangeSummary summarize_change(const WeightedPattern& p, const WeightedPattern& q, const Som& som,
                               const GroundDistanceMatrix& d, const RegionSelection& rp,
                               const RegionSelection& rq, const ChangeOptions& options);

// Per-feature prototype range (max - min) in Z units.
std::vector<double> feature_ranges(const Som& som);

nlohmann::ordered_json to_json(const ChangeSummary& summary);
ChangeSummary change_summary_from_json(const nlohmann::ordered_json& j);

}  // namespace somchange
