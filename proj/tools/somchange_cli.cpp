// somchange: train SOM pairs, evaluate what-if patterns and describe changes.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "somchange/bundle.hpp"
#include "somchange/error.hpp"
#include "somchange/glyph.hpp"
#include "somchange/http_server.hpp"
#include "somchange/service.hpp"
#include "somchange/synthetic.hpp"

namespace fs = std::filesystem;
using namespace somchange;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kUsage = 2, kData = 3, kNumeric = 4 };

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::DimensionMismatch: return kUsage;
    case ErrorKind::Data:
    case ErrorKind::Io: return kData;
    case ErrorKind::Numeric: return kNumeric;
  }
  return kFailure;
}

struct TrainOptions {
  std::string data;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::string grid = "10x12";
  std::string input_grid;
  std::string output_grid;
  std::string topology = "hexagonal";
  std::uint32_t epochs = 50;
  double radius0 = 3.0;
  double radius1 = 0.5;
  std::uint64_t seed = 1;
  std::string init = "random_sample";

  void attach(CLI::App* cmd, bool with_grids) {
    cmd->add_option("--data", data, "CSV file with a header row")->required()->check(CLI::ExistingFile);
    cmd->add_option("--inputs", inputs, "input columns")->required()->delimiter(',');
    cmd->add_option("--outputs", outputs, "output columns (default: all other columns)")->delimiter(',');
    if (with_grids) {
      cmd->add_option("--grid", grid, "grid size for both maps, WIDTHxHEIGHT");
      cmd->add_option("--input-grid", input_grid, "grid size of the input map");
      cmd->add_option("--output-grid", output_grid, "grid size of the output map");
    }
    cmd->add_option("--topology", topology, "hexagonal or rectangular");
    cmd->add_option("--epochs", epochs, "batch epochs");
    cmd->add_option("--radius0", radius0, "initial neighbourhood radius");
    cmd->add_option("--radius1", radius1, "final neighbourhood radius");
    cmd->add_option("--seed", seed, "random seed");
    cmd->add_option("--init", init, "random_sample or pca_plane");
  }

  TrainConfig config() const {
    TrainConfig c;
    c.epochs = epochs;
    c.initial_radius = radius0;
    c.final_radius = radius1;
    c.seed = seed;
    c.init = parse_init(init);
    c.validate();
    return c;
  }

  SomGrid make_grid(const std::string& size) const {
    const auto [w, h] = parse_grid_size(size);
    return SomGrid(parse_topology(topology), w, h);
  }
};

struct QueryOptions {
  std::string model;
  double base = 0.0;
  std::vector<std::string> from;
  std::vector<std::string> to;
  double percentile = 0.8;
  double alpha = 0.05;
  std::string ks_scope = "full";

  ChangeRequest request() const {
    ChangeRequest r;
    r.from.base_z = r.to.base_z = base;
    for (const auto& s : from) r.from.settings.push_back(parse_setting(s));
    for (const auto& s : to) r.to.settings.push_back(parse_setting(s));
    r.percentile = percentile;
    r.alpha = alpha;
    r.ks_scope = parse_ks_scope(ks_scope);
    return r;
  }
};

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
  } else {
    write_file(path, text);
  }
}

ApiServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Measure and visualize changes between weighted SOM patterns"};
  app.require_subcommand(1);

  TrainOptions train_opts;
  std::string train_out;
  auto* train = app.add_subcommand("train", "train input and output maps plus their association");
  train_opts.attach(train, true);
  train->add_option("--out", train_out, "model bundle file to write")->required();

  QueryOptions q;
  std::string pattern_svg;
  auto* pattern = app.add_subcommand("pattern", "conditional output pattern for one input");
  pattern->add_option("--model", q.model, "model bundle")->required()->check(CLI::ExistingFile);
  pattern->add_option("--base", q.base, "starting value of every input feature, in SD");
  pattern->add_option("--set", q.from, "NAME=+kSD (offset) or NAME=raw")->allow_extra_args(false);
  pattern->add_option("--percentile", q.percentile, "region threshold");
  pattern->add_option("--svg", pattern_svg, "also write the pattern view as SVG");

  std::string change_json, change_svg_dir;
  auto* change = app.add_subcommand("change", "describe the change between two inputs");
  change->add_option("--model", q.model, "model bundle")->required()->check(CLI::ExistingFile);
  change->add_option("--base", q.base, "starting value of every input feature, in SD");
  change->add_option("--from", q.from, "settings of the reference input")->allow_extra_args(false);
  change->add_option("--to", q.to, "settings of the changed input")->allow_extra_args(false);
  change->add_option("--percentile", q.percentile, "region threshold");
  change->add_option("--alpha", q.alpha, "KS significance level");
  change->add_option("--ks-scope", q.ks_scope, "full or region");
  change->add_option("--json", change_json, "write the summary here instead of stdout");
  change->add_option("--svg-dir", change_svg_dir, "write reference.svg, changed.svg and change.svg here");

  std::string render_kind = "change", render_out = "-", render_summary;
  auto* render = app.add_subcommand("render", "render a pattern or change view as SVG");
  render->add_option("--model", q.model, "model bundle")->check(CLI::ExistingFile);
  render->add_option("--summary", render_summary, "render the change glyph of a saved summary")->check(CLI::ExistingFile);
  render->add_option("--kind", render_kind, "reference, changed or change");
  render->add_option("--base", q.base, "starting value of every input feature, in SD");
  render->add_option("--from", q.from, "settings of the reference input")->allow_extra_args(false);
  render->add_option("--to", q.to, "settings of the changed input")->allow_extra_args(false);
  render->add_option("--percentile", q.percentile, "region threshold");
  render->add_option("--alpha", q.alpha, "KS significance level");
  render->add_option("--out", render_out, "SVG file, '-' for stdout");

  TrainOptions sweep_opts;
  std::vector<std::string> sweep_grids{"6x8", "8x10", "10x12"};
  auto* sweep = app.add_subcommand("sweep", "report QE and TE of both maps over grid sizes");
  sweep_opts.attach(sweep, false);
  sweep->add_option("--grids", sweep_grids, "grid sizes")->delimiter(',');

  std::string serve_config;
  std::optional<std::string> serve_store, serve_host;
  std::optional<int> serve_port;
  auto* serve = app.add_subcommand("serve", "start the HTTP API");
  serve->add_option("--config", serve_config, "JSON config file")->check(CLI::ExistingFile);
  serve->add_option("--store", serve_store, "model store directory");
  serve->add_option("--host", serve_host, "listen address");
  serve->add_option("--port", serve_port, "listen port");

  std::size_t synth_rows = 130;
  std::uint64_t synth_seed = 2015;
  std::string synth_out = "-";
  auto* synth = app.add_subcommand("synth", "write the synthetic stream-survey dataset as CSV");
  synth->add_option("--rows", synth_rows, "number of records");
  synth->add_option("--seed", synth_seed, "random seed");
  synth->add_option("--out", synth_out, "CSV file, '-' for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*train) {
      const auto ds = ingest_csv(train_opts.data, {train_opts.inputs, train_opts.outputs});
      BundleSpec spec;
      spec.train = train_opts.config();
      spec.input_grid = train_opts.make_grid(train_opts.input_grid.empty() ? train_opts.grid : train_opts.input_grid);
      spec.output_grid = train_opts.make_grid(train_opts.output_grid.empty() ? train_opts.grid : train_opts.output_grid);
      const auto bundle = train_bundle(ds, spec);
      const auto bytes = encode_bundle(bundle);
      write_file(train_out, bytes);
      std::cout << model_info_json(bundle, bundle_id(bytes)).dump(2) << "\n";
    } else if (*pattern) {
      const auto bundle = load_bundle(q.model);
      InputSpec input{q.base, {}, std::nullopt};
      for (const auto& s : q.from) input.settings.push_back(parse_setting(s));
      std::cout << pattern_json(bundle, input, q.percentile).dump(2) << "\n";
      if (!pattern_svg.empty()) write_file(pattern_svg, render_pattern_svg(bundle.output_som, pattern_for(bundle, input)));
    } else if (*change) {
      const auto bundle = load_bundle(q.model);
      const auto result = compute_change(bundle, q.request());
      const auto text = change_summary_text(result.summary);
      write_text(change_json.empty() ? "-" : change_json, text);
      if (!change_svg_dir.empty()) {
        fs::create_directories(change_svg_dir);
        write_file(fs::path(change_svg_dir) / "reference.svg", render_pattern_svg(bundle.output_som, result.reference));
        write_file(fs::path(change_svg_dir) / "changed.svg", render_pattern_svg(bundle.output_som, result.changed));
        write_file(fs::path(change_svg_dir) / "change.svg", render_change_svg(change_glyph(result.summary)));
      }
    } else if (*render) {
      GlyphScene scene;
      if (!render_summary.empty()) {
        scene = change_glyph(change_summary_from_json(nlohmann::ordered_json::parse(read_file(render_summary))));
      } else {
        if (q.model.empty()) fail(ErrorKind::InvalidArgument, "render needs --model or --summary");
        scene = scene_for(load_bundle(q.model), scene_kind_from_string(render_kind), q.request());
      }
      write_text(render_out, render_svg(scene));
    } else if (*sweep) {
      const auto ds = ingest_csv(sweep_opts.data, {sweep_opts.inputs, sweep_opts.outputs});
      const auto cfg = sweep_opts.config();
      std::printf("%-8s %10s %10s %10s %10s\n", "grid", "in_QE", "in_TE", "out_QE", "out_TE");
      for (const auto& g : sweep_grids) {
        const auto grid = sweep_opts.make_grid(g);
        const auto in_som = train_som(ds.z_inputs, grid, cfg, ds.input_features);
        const auto out_som = train_som(ds.z_outputs, grid, cfg, ds.output_features);
        std::printf("%-8s %10.6f %10.6f %10.6f %10.6f\n", g.c_str(), quantization_error(in_som, ds.z_inputs),
                    topographic_error(in_som, ds.z_inputs), quantization_error(out_som, ds.z_outputs),
                    topographic_error(out_som, ds.z_outputs));
      }
    } else if (*serve) {
      auto cfg = load_service_config(serve_config.empty() ? std::nullopt : std::optional<fs::path>(serve_config));
      if (serve_store) cfg.store = *serve_store;
      if (serve_host) cfg.host = *serve_host;
      if (serve_port) cfg.port = *serve_port;
      ModelStore store(cfg.store);
      ApiServer server(store, cfg);
      if (!server.bind(cfg.host, cfg.port)) fail(ErrorKind::Io, "cannot bind " + cfg.host + ":" + std::to_string(cfg.port));
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on " << cfg.host << ":" << cfg.port << " (store " << cfg.store << ")\n";
      server.listen_after_bind();
      g_server = nullptr;
    } else if (*synth) {
      write_text(synth_out, synthetic_stream_csv(synth_rows, synth_seed));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kOk;
}
