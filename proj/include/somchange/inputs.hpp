#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "somchange/som.hpp"

namespace somchange {

// An input vector described the way an analyst states a what-if: every
// feature starts at `base_z` (Z units), then each setting adjusts one feature.
//   NAME=+1SD, NAME=-0.5SD   offset from the base, in standard deviations
//   NAME=12.5                absolute value in raw units
// Alternatively `z` gives the whole vector explicitly.
struct InputSpec {
  double base_z = 0.0;
  std::vector<std::pair<std::string, std::string>> settings;
  std::optional<std::vector<double>> z;

  friend bool operator==(const InputSpec&, const InputSpec&) = default;
};

// Parses "NAME=VALUE".
std::pair<std::string, std::string> parse_setting(const std::string& text);

// Comma-separated list of settings ("P4=+1SD,P1=900").
std::vector<std::pair<std::string, std::string>> parse_setting_list(const std::string& text);

// Resolves to a Z-scored vector over `features`. Unknown names are a
// dimension mismatch; malformed values are invalid arguments.
std::vector<double> resolve_input(const InputSpec& spec, const std::vector<FeatureSpec>& features);

}  // namespace somchange
