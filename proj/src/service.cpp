#include "somchange/service.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

#include "somchange/error.hpp"
#include "somchange/significance.hpp"

namespace somchange {

namespace {

template <typename T>
T field_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return j.at(key).get<T>();
}

double env_double(const char* name, double fallback) {
  const char* v = std::getenv(name);
  if (!v || !*v) return fallback;
  char* end = nullptr;
  const double d = std::strtod(v, &end);
  if (end == v || *end != '\0') fail(ErrorKind::InvalidArgument, std::string("invalid value for ") + name);
  return d;
}

RegionSelection region_or_default(const std::optional<std::vector<std::size_t>>& user, const WeightedPattern& p,
                                  double percentile) {
  if (user) return user_region(*user, p.size());
  return default_regions(p, percentile);
}

}  // namespace

ServiceConfig load_service_config(const std::optional<std::filesystem::path>& path) {
  ServiceConfig cfg;
  if (path) {
    try {
      const auto j = nlohmann::json::parse(read_file(*path));
      cfg.host = field_or<std::string>(j, "host", cfg.host);
      cfg.port = field_or<int>(j, "port", cfg.port);
      cfg.alpha = field_or<double>(j, "alpha", cfg.alpha);
      cfg.percentile = field_or<double>(j, "percentile", cfg.percentile);
      cfg.store = field_or<std::string>(j, "store", cfg.store);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::InvalidArgument, "config file: " + std::string(e.what()));
    }
  }
  if (const char* h = std::getenv("SOMCHANGE_HOST"); h && *h) cfg.host = h;
  if (const char* s = std::getenv("SOMCHANGE_STORE"); s && *s) cfg.store = s;
  cfg.port = static_cast<int>(env_double("SOMCHANGE_PORT", cfg.port));
  cfg.alpha = env_double("SOMCHANGE_ALPHA", cfg.alpha);
  cfg.percentile = env_double("SOMCHANGE_PERCENTILE", cfg.percentile);
  ks_critical_coefficient(cfg.alpha);
  if (!(cfg.percentile > 0.0 && cfg.percentile < 1.0)) fail(ErrorKind::InvalidArgument, "percentile must lie in (0, 1)");
  return cfg;
}

WeightedPattern pattern_for(const ModelBundle& bundle, const InputSpec& input) {
  const auto x = resolve_input(input, bundle.input_som.features);
  return conditional_pattern(x, bundle.association, bundle.input_som, bundle.output_som, "output");
}

ChangeResult compute_change(const ModelBundle& bundle, const ChangeRequest& request) {
  ChangeResult r;
  r.reference = pattern_for(bundle, request.from);
  r.changed = pattern_for(bundle, request.to);
  const auto rp = region_or_default(request.reference_region, r.reference, request.percentile);
  const auto rq = region_or_default(request.changed_region, r.changed, request.percentile);
  r.summary = summarize_change(r.reference, r.changed, bundle.output_som, rp, rq,
                               ChangeOptions{request.alpha, request.ks_scope});
  return r;
}

std::string change_summary_text(const ChangeSummary& summary) { return to_json(summary).dump(2) + "\n"; }

nlohmann::ordered_json pattern_json(const ModelBundle& bundle, const InputSpec& input, double percentile) {
  const auto x = resolve_input(input, bundle.input_som.features);
  const auto p = conditional_pattern(x, bundle.association, bundle.input_som, bundle.output_som, "output");
  nlohmann::ordered_json j;
  j["schema"] = "somchange.pattern/1";
  j["input_z"] = x;
  j["weights"] = p.weights;
  j["region"] = default_regions(p, percentile).neurons;
  j["percentile"] = percentile;
  return j;
}

nlohmann::ordered_json model_info_json(const ModelBundle& b, const std::string& id) {
  auto map_json = [](const Som& som) {
    nlohmann::ordered_json m;
    m["topology"] = som.grid.topology() == Topology::Hexagonal ? "hexagonal" : "rectangular";
    m["width"] = som.grid.width();
    m["height"] = som.grid.height();
    m["bandwidth"] = som.bandwidth;
    auto& feats = m["features"] = nlohmann::ordered_json::array();
    for (const auto& f : som.features) feats.push_back({{"name", f.name}, {"mean", f.z_mean}, {"std", f.z_std}});
    return m;
  };
  nlohmann::ordered_json j;
  j["id"] = id;
  j["fingerprint"] = hex64(b.fingerprint);
  j["input_map"] = map_json(b.input_som);
  j["output_map"] = map_json(b.output_som);
  j["train"] = {{"epochs", b.config.epochs},
                {"initial_radius", b.config.initial_radius},
                {"final_radius", b.config.final_radius},
                {"seed", b.config.seed},
                {"init", b.config.init == InitMethod::PcaPlane ? "pca_plane" : "random_sample"}};
  return j;
}

SceneKind scene_kind_from_string(const std::string& s) {
  if (s == "reference") return SceneKind::Reference;
  if (s == "changed") return SceneKind::Changed;
  if (s == "change") return SceneKind::Change;
  fail(ErrorKind::InvalidArgument, "unknown scene kind '" + s + "' (reference, changed, change)");
}

GlyphScene scene_for(const ModelBundle& bundle, SceneKind kind, const ChangeRequest& request) {
  switch (kind) {
    case SceneKind::Reference: return pattern_scene(bundle.output_som, pattern_for(bundle, request.from));
    case SceneKind::Changed: return pattern_scene(bundle.output_som, pattern_for(bundle, request.to));
    case SceneKind::Change: break;
  }
  return change_glyph(compute_change(bundle, request).summary);
}

InputSpec input_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorKind::InvalidArgument, "input must be an object");
  InputSpec spec;
  try {
    spec.base_z = field_or<double>(j, "base", 0.0);
    if (j.contains("z")) spec.z = j.at("z").get<std::vector<double>>();
    if (j.contains("set")) {
      for (const auto& [name, value] : j.at("set").items()) {
        spec.settings.emplace_back(name, value.is_string() ? value.get<std::string>() : value.dump());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidArgument, std::string("malformed input: ") + e.what());
  }
  return spec;
}

ChangeRequest change_request_from_json(const nlohmann::json& j, const ServiceConfig& defaults) {
  if (!j.is_object()) fail(ErrorKind::InvalidArgument, "request body must be an object");
  ChangeRequest r;
  try {
    r.from = input_spec_from_json(j.at("from"));
    r.to = input_spec_from_json(j.at("to"));
    r.percentile = field_or<double>(j, "percentile", defaults.percentile);
    r.alpha = field_or<double>(j, "alpha", defaults.alpha);
    r.ks_scope = parse_ks_scope(field_or<std::string>(j, "ks_scope", "full"));
    if (j.contains("reference_region")) r.reference_region = j.at("reference_region").get<std::vector<std::size_t>>();
    if (j.contains("changed_region")) r.changed_region = j.at("changed_region").get<std::vector<std::size_t>>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidArgument, std::string("malformed change request: ") + e.what());
  }
  return r;
}

BundleSpec bundle_spec_from_json(const nlohmann::json& j) {
  BundleSpec spec;
  try {
    auto grid = [&](const char* key, const SomGrid& fallback) {
      if (!j.contains(key)) return fallback;
      const auto& g = j.at(key);
      return SomGrid(parse_topology(field_or<std::string>(g, "topology", "hexagonal")), g.at("width").get<std::size_t>(),
                     g.at("height").get<std::size_t>());
    };
    spec.input_grid = grid("input_grid", spec.input_grid);
    spec.output_grid = grid("output_grid", spec.output_grid);
    if (j.contains("train")) {
      const auto& t = j.at("train");
      spec.train.epochs = field_or<std::uint32_t>(t, "epochs", spec.train.epochs);
      spec.train.initial_radius = field_or<double>(t, "initial_radius", spec.train.initial_radius);
      spec.train.final_radius = field_or<double>(t, "final_radius", spec.train.final_radius);
      spec.train.seed = field_or<std::uint64_t>(t, "seed", spec.train.seed);
      spec.train.init = parse_init(field_or<std::string>(t, "init", "random_sample"));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidArgument, std::string("malformed training request: ") + e.what());
  }
  spec.train.validate();
  return spec;
}

CsvSchema schema_from_json(const nlohmann::json& j) {
  CsvSchema s;
  try {
    s.inputs = j.at("inputs").get<std::vector<std::string>>();
    if (j.contains("outputs")) s.outputs = j.at("outputs").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidArgument, std::string("malformed schema: ") + e.what());
  }
  return s;
}

std::pair<std::size_t, std::size_t> parse_grid_size(const std::string& text) {
  const auto x = text.find_first_of("xX");
  std::size_t w = 0, h = 0;
  auto parse = [&](std::string_view s, std::size_t& out) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && out > 0;
  };
  if (x == std::string::npos || !parse(std::string_view(text).substr(0, x), w) ||
      !parse(std::string_view(text).substr(x + 1), h)) {
    fail(ErrorKind::InvalidArgument, "grid size must look like WIDTHxHEIGHT, got '" + text + "'");
  }
  return {w, h};
}

Topology parse_topology(const std::string& text) {
  if (text == "hexagonal" || text == "hex") return Topology::Hexagonal;
  if (text == "rectangular" || text == "rect") return Topology::Rectangular;
  fail(ErrorKind::InvalidArgument, "unknown topology '" + text + "'");
}

InitMethod parse_init(const std::string& text) {
  if (text == "random_sample" || text == "random") return InitMethod::RandomSample;
  if (text == "pca_plane" || text == "pca") return InitMethod::PcaPlane;
  fail(ErrorKind::InvalidArgument, "unknown init method '" + text + "'");
}

KsScope parse_ks_scope(const std::string& text) {
  if (text == "full") return KsScope::FullPattern;
  if (text == "region") return KsScope::Region;
  fail(ErrorKind::InvalidArgument, "unknown ks scope '" + text + "' (full, region)");
}

}  // namespace somchange
