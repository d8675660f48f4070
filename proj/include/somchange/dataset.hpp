#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "somchange/matrix.hpp"
#include "somchange/som.hpp"

namespace somchange {

// Which CSV columns feed the input map and which the output map. An empty
// `outputs` list means "every column not listed as input".
struct CsvSchema {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

// Paired records in raw units plus their Z-scored copies. Standardization uses
// the column mean and the sample standard deviation (n - 1).
struct Dataset {
  std::vector<FeatureSpec> input_features;
  std::vector<FeatureSpec> output_features;
  Matrix raw_inputs;
  Matrix raw_outputs;
  Matrix z_inputs;
  Matrix z_outputs;
  std::uint64_t fingerprint = 0;

  std::size_t size() const noexcept { return raw_inputs.rows(); }
};

Dataset parse_csv(std::string_view text, const CsvSchema& schema);
Dataset ingest_csv(const std::filesystem::path& path, const CsvSchema& schema);

Matrix standardize(const Matrix& raw, const std::vector<FeatureSpec>& features);
Matrix destandardize(const Matrix& z, const std::vector<FeatureSpec>& features);

// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

}  // namespace somchange
