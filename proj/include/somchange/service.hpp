#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "somchange/bundle.hpp"
#include "somchange/change.hpp"
#include "somchange/glyph.hpp"
#include "somchange/inputs.hpp"

// Request handling shared by the CLI and the HTTP API, so both paths emit the
// same bytes for the same query.
namespace somchange {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  double alpha = 0.05;
  double percentile = 0.8;
  std::string store = "models";
};

// Defaults, then the JSON config file (if given), then SOMCHANGE_HOST,
// SOMCHANGE_PORT, SOMCHANGE_ALPHA, SOMCHANGE_PERCENTILE, SOMCHANGE_STORE.
ServiceConfig load_service_config(const std::optional<std::filesystem::path>& path);

struct ChangeRequest {
  InputSpec from;
  InputSpec to;
  double percentile = 0.8;
  double alpha = 0.05;
  KsScope ks_scope = KsScope::FullPattern;
  std::optional<std::vector<std::size_t>> reference_region;
  std::optional<std::vector<std::size_t>> changed_region;
};

WeightedPattern pattern_for(const ModelBundle& bundle, const InputSpec& input);

struct ChangeResult {
  WeightedPattern reference;
  WeightedPattern changed;
  ChangeSummary summary;
};

ChangeResult compute_change(const ModelBundle& bundle, const ChangeRequest& request);

// Canonical text form of a change summary (pretty-printed, trailing newline).
std::string change_summary_text(const ChangeSummary& summary);

nlohmann::ordered_json pattern_json(const ModelBundle& bundle, const InputSpec& input, double percentile);
nlohmann::ordered_json model_info_json(const ModelBundle& bundle, const std::string& id);

enum class SceneKind { Reference, Changed, Change };
SceneKind scene_kind_from_string(const std::string& s);
GlyphScene scene_for(const ModelBundle& bundle, SceneKind kind, const ChangeRequest& request);

// JSON request bodies. `defaults` supplies alpha and percentile when absent.
InputSpec input_spec_from_json(const nlohmann::json& j);
ChangeRequest change_request_from_json(const nlohmann::json& j, const ServiceConfig& defaults);
BundleSpec bundle_spec_from_json(const nlohmann::json& j);
CsvSchema schema_from_json(const nlohmann::json& j);

// Parses "10x12".
std::pair<std::size_t, std::size_t> parse_grid_size(const std::string& text);
Topology parse_topology(const std::string& text);
InitMethod parse_init(const std::string& text);
KsScope parse_ks_scope(const std::string& text);

}  // namespace somchange
