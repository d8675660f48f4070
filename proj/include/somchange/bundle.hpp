#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "somchange/association.hpp"
#include "somchange/dataset.hpp"
#include "somchange/som.hpp"

namespace somchange {

// Everything needed to answer what-if queries: both maps, their association,
// the fingerprint of the training data and the training configuration.
struct ModelBundle {
  Som input_som;
  Som output_som;
  AssociationMatrix association;
  std::uint64_t fingerprint = 0;
  TrainConfig config;

  void validate() const;

  friend bool operator==(const ModelBundle&, const ModelBundle&) = default;
};

struct BundleSpec {
  SomGrid input_grid{Topology::Hexagonal, 10, 12};
  SomGrid output_grid{Topology::Hexagonal, 10, 12};
  TrainConfig train;
};

ModelBundle train_bundle(const Dataset& data, const BundleSpec& spec);

// Binary encodings; the layout is described in docs/model_format.md.
std::string encode_som(const Som& som);
Som decode_som(std::string_view bytes);
std::string encode_bundle(const ModelBundle& bundle);
ModelBundle decode_bundle(std::string_view bytes);

void write_file(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path);
ModelBundle load_bundle(const std::filesystem::path& path);

// Content hash of an encoded bundle; used as the model id.
std::string bundle_id(std::string_view encoded);

// Directory of `<id>.scb` files. Loaded bundles are cached and shared
// read-only; writes are serialized.
class ModelStore {
 public:
  explicit ModelStore(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }

  std::string put(const ModelBundle& bundle);
  // Null when no bundle with this id exists.
  std::shared_ptr<const ModelBundle> get(const std::string& id);
  std::vector<std::string> ids() const;

  // Held while training so that concurrent train requests run one at a time.
  std::mutex& training_mutex() noexcept { return training_; }

 private:
  std::filesystem::path root_;
  mutable std::mutex mutex_;
  std::mutex training_;
  std::map<std::string, std::shared_ptr<const ModelBundle>> cache_;
};

}  // namespace somchange
