#include "somchange/change.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "somchange/error.hpp"
#include "somchange/glyph.hpp"
#include "somchange/significance.hpp"

namespace somchange {

namespace {

std::size_t argmax(const std::vector<double>& w) {
  return static_cast<std::size_t>(std::max_element(w.begin(), w.end()) - w.begin());
}

// Weights of `pattern` restricted to `region`; falls back to the argmax neuron
// when the region carries no weight.
std::vector<double> region_weights(const WeightedPattern& pattern, const RegionSelection& region,
                                   bool& fallback) {
  std::vector<double> w(pattern.size(), 0.0);
  double mass = 0.0;
  for (std::size_t i : region.neurons) {
    w[i] = pattern.weights[i];
    mass += w[i];
  }
  fallback = !(mass > 0.0);
  if (fallback) {
    std::fill(w.begin(), w.end(), 0.0);
    w[argmax(pattern.weights)] = 1.0;
    return w;
  }
  for (double& v : w) v /= mass;
  return w;
}

struct RegionStats {
  double mean = 0.0;
  ValueRange range;
};

RegionStats region_stats(const Som& som, const std::vector<double>& w, std::size_t k) {
  RegionStats s;
  bool first = true;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] <= 0.0) continue;
    const double v = som.prototypes(i, k);
    s.mean += w[i] * v;
    if (first) {
      s.range = {v, v};
      first = false;
    } else {
      s.range.min = std::min(s.range.min, v);
      s.range.max = std::max(s.range.max, v);
    }
  }
  // Rounding can push a convex combination a hair outside its hull.
  s.mean = std::clamp(s.mean, s.range.min, s.range.max);
  return s;
}

void check_region(const RegionSelection& r, std::size_t n) {
  if (r.neurons.empty()) fail(ErrorKind::InvalidArgument, "region selection is empty");
  for (std::size_t i : r.neurons) {
    if (i >= n) fail(ErrorKind::InvalidArgument, "region neuron " + std::to_string(i) + " is outside the map");
  }
}

Direction direction_from_string(const std::string& s) {
  if (s == "increase") return Direction::Increase;
  if (s == "decrease") return Direction::Decrease;
  if (s == "none") return Direction::None;
  fail(ErrorKind::InvalidArgument, "unknown direction '" + s + "'");
}

nlohmann::ordered_json range_json(const ValueRange& r) { return {r.min, r.max}; }

ValueRange range_from_json(const nlohmann::ordered_json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

nlohmann::ordered_json region_json(const RegionReport& r) {
  nlohmann::ordered_json j;
  j["neurons"] = r.selection.neurons;
  j["source"] = r.selection.source == RegionSource::User ? "user" : "percentile";
  j["fallback"] = r.fallback;
  return j;
}

RegionReport region_from_json(const nlohmann::ordered_json& j) {
  RegionReport r;
  r.selection.neurons = j.at("neurons").get<std::vector<std::size_t>>();
  r.selection.source = j.at("source").get<std::string>() == "user" ? RegionSource::User : RegionSource::Percentile;
  r.fallback = j.at("fallback").get<bool>();
  return r;
}

}  // namespace

RegionSelection user_region(std::vector<std::size_t> neurons, std::size_t neuron_count) {
  std::sort(neurons.begin(), neurons.end());
  neurons.erase(std::unique(neurons.begin(), neurons.end()), neurons.end());
  RegionSelection r{std::move(neurons), RegionSource::User};
  check_region(r, neuron_count);
  return r;
}

RegionSelection default_regions(const WeightedPattern& pattern, double percentile) {
  if (!(percentile > 0.0 && percentile < 1.0)) fail(ErrorKind::InvalidArgument, "percentile must lie in (0, 1)");
  if (pattern.weights.empty()) fail(ErrorKind::InvalidArgument, "pattern has no weights");
  std::vector<double> positive;
  for (double w : pattern.weights) {
    if (w > 0.0) positive.push_back(w);
  }
  RegionSelection r{{}, RegionSource::Percentile};
  if (positive.empty()) {
    r.neurons.push_back(argmax(pattern.weights));
    return r;
  }
  std::sort(positive.begin(), positive.end());
  const auto rank = static_cast<std::size_t>(std::floor(percentile * static_cast<double>(positive.size() - 1)));
  const double threshold = positive[rank];
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern.weights[i] > 0.0 && pattern.weights[i] >= threshold) r.neurons.push_back(i);
  }
  if (r.neurons.empty()) r.neurons.push_back(argmax(pattern.weights));
  return r;
}

Direction direction_of(double value) {
  if (value > kDirectionTolerance) return Direction::Increase;
  if (value < -kDirectionTolerance) return Direction::Decrease;
  return Direction::None;
}

const char* to_string(Direction d) {
  switch (d) {
    case Direction::Increase: return "increase";
    case Direction::Decrease: return "decrease";
    case Direction::None: break;
  }
  return "none";
}

std::vector<double> feature_ranges(const Som& som) {
  std::vector<double> out(som.feature_count(), 0.0);
  for (std::size_t k = 0; k < som.feature_count(); ++k) {
    double lo = som.prototypes(0, k), hi = lo;
    for (std::size_t i = 1; i < som.neuron_count(); ++i) {
      lo = std::min(lo, som.prototypes(i, k));
      hi = std::max(hi, som.prototypes(i, k));
    }
    out[k] = hi - lo;
  }
  return out;
}

ChangeSummary summarize_change(const WeightedPattern& p, const WeightedPattern& q, const Som& som,
                               const RegionSelection& rp, const RegionSelection& rq,
                               const ChangeOptions& options) {
  return summarize_change(p, q, som, ground_distances(som), rp, rq, options);
}

ChangeSummary summarize_change(const WeightedPattern& p, const WeightedPattern& q, const Som& som,
                               const GroundDistanceMatrix& d, const RegionSelection& rp,
                               const RegionSelection& rq, const ChangeOptions& options) {
  som.validate();
  if (p.size() != som.neuron_count() || q.size() != som.neuron_count()) {
    fail(ErrorKind::DimensionMismatch, "patterns do not belong to this map");
  }
  check_region(rp, som.neuron_count());
  check_region(rq, som.neuron_count());
  ks_critical_coefficient(options.alpha);

  const auto emd = solve_emd(p, q, d);
  const auto scaled = scaled_emd(emd.emd, d);
  const auto pemds = pemd_all(emd.flow, d, som);
  const auto ranges = feature_ranges(som);

  ChangeSummary s;
  s.emd = emd.emd;
  s.scaled_emd = scaled.value;
  s.emd_degenerate = scaled.degenerate;
  s.alpha = options.alpha;
  s.flows = emd.flow.flows;
  s.reference_region.selection = rp;
  s.changed_region.selection = rq;

  const auto wp = region_weights(p, rp, s.reference_region.fallback);
  const auto wq = region_weights(q, rq, s.changed_region.fallback);

  std::vector<double> values(som.neuron_count());
  const std::size_t m = som.feature_count();
  s.details.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    FeatureChangeDetail f;
    f.name = som.features[k].name;
    f.pemd = pemds.values[k];
    f.scaled_pemd = scale_pemd_for_display(f.pemd, ranges[k]);
    f.direction = direction_of(f.pemd);

    for (std::size_t i = 0; i < values.size(); ++i) values[i] = som.prototypes(i, k);
    const auto ks = options.ks_scope == KsScope::Region
                        ? ks_test(values, wp, values, wq, options.alpha)
                        : ks_test(values, p.weights, values, q.weights, options.alpha);
    f.significant = ks.significant;
    f.ks_statistic = ks.statistic;
    f.ks_critical = ks.critical;

    const auto ref = region_stats(som, wp, k);
    const auto chg = region_stats(som, wq, k);
    f.ref_value = z_to_t(ref.mean);
    f.chg_value = z_to_t(chg.mean);
    f.ref_range = {z_to_t(ref.range.min), z_to_t(ref.range.max)};
    f.chg_range = {z_to_t(chg.range.min), z_to_t(chg.range.max)};
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    f.display_range = {z_to_t(*lo), z_to_t(*hi)};
    s.details.push_back(std::move(f));
  }

  s.mean_pemd = std::accumulate(pemds.values.begin(), pemds.values.end(), 0.0) / static_cast<double>(m);
  s.overall_direction = direction_of(s.mean_pemd);
  s.mean_feature_range = std::accumulate(ranges.begin(), ranges.end(), 0.0) / static_cast<double>(m);
  return s;
}

nlohmann::ordered_json to_json(const ChangeSummary& s) {
  nlohmann::ordered_json j;
  j["schema"] = "somchange.change_summary/1";
  j["emd"] = s.emd;
  j["scaled_emd"] = s.scaled_emd;
  j["emd_degenerate"] = s.emd_degenerate;
  j["mean_pemd"] = s.mean_pemd;
  j["overall_direction"] = to_string(s.overall_direction);
  j["mean_feature_range"] = s.mean_feature_range;
  j["alpha"] = s.alpha;
  auto& features = j["features"] = nlohmann::ordered_json::array();
  for (const auto& f : s.details) {
    nlohmann::ordered_json fj;
    fj["name"] = f.name;
    fj["pemd"] = f.pemd;
    fj["scaled_pemd"] = f.scaled_pemd;
    fj["direction"] = to_string(f.direction);
    fj["significant"] = f.significant;
    fj["ks_statistic"] = f.ks_statistic;
    fj["ks_critical"] = f.ks_critical;
    fj["ref_value"] = f.ref_value;
    fj["chg_value"] = f.chg_value;
    fj["ref_range"] = range_json(f.ref_range);
    fj["chg_range"] = range_json(f.chg_range);
    fj["display_range"] = range_json(f.display_range);
    features.push_back(std::move(fj));
  }
  j["regions"]["reference"] = region_json(s.reference_region);
  j["regions"]["changed"] = region_json(s.changed_region);
  auto& flows = j["flows"] = nlohmann::ordered_json::array();
  for (const auto& f : s.flows) flows.push_back({f.from, f.to, f.mass});
  return j;
}

ChangeSummary change_summary_from_json(const nlohmann::ordered_json& j) {
  try {
    if (j.at("schema").get<std::string>() != "somchange.change_summary/1") {
      fail(ErrorKind::Data, "unsupported change summary schema");
    }
    ChangeSummary s;
    s.emd = j.at("emd").get<double>();
    s.scaled_emd = j.at("scaled_emd").get<double>();
    s.emd_degenerate = j.at("emd_degenerate").get<bool>();
    s.mean_pemd = j.at("mean_pemd").get<double>();
    s.overall_direction = direction_from_string(j.at("overall_direction").get<std::string>());
    s.mean_feature_range = j.at("mean_feature_range").get<double>();
    s.alpha = j.at("alpha").get<double>();
    for (const auto& fj : j.at("features")) {
      FeatureChangeDetail f;
      f.name = fj.at("name").get<std::string>();
      f.pemd = fj.at("pemd").get<double>();
      f.scaled_pemd = fj.at("scaled_pemd").get<double>();
      f.direction = direction_from_string(fj.at("direction").get<std::string>());
      f.significant = fj.at("significant").get<bool>();
      f.ks_statistic = fj.at("ks_statistic").get<double>();
      f.ks_critical = fj.at("ks_critical").get<double>();
      f.ref_value = fj.at("ref_value").get<double>();
      f.chg_value = fj.at("chg_value").get<double>();
      f.ref_range = range_from_json(fj.at("ref_range"));
      f.chg_range = range_from_json(fj.at("chg_range"));
      f.display_range = range_from_json(fj.at("display_range"));
      s.details.push_back(std::move(f));
    }
    s.reference_region = region_from_json(j.at("regions").at("reference"));
    s.changed_region = region_from_json(j.at("regions").at("changed"));
    for (const auto& fj : j.at("flows")) {
      s.flows.push_back({fj.at(0).get<std::size_t>(), fj.at(1).get<std::size_t>(), fj.at(2).get<double>()});
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Data, std::string("malformed change summary: ") + e.what());
  }
}

}  // namespace somchange
