#include "somchange/inputs.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "somchange/error.hpp"

namespace somchange {

namespace {

double parse_double(std::string_view text, const std::string& context) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    fail(ErrorKind::InvalidArgument, "invalid value in '" + context + "'");
  }
  return v;
}

bool ends_with_sd(std::string_view s) {
  if (s.size() < 2) return false;
  const auto tail = s.substr(s.size() - 2);
  return (tail[0] == 'S' || tail[0] == 's') && (tail[1] == 'D' || tail[1] == 'd');
}

}  // namespace

std::pair<std::string, std::string> parse_setting(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) {
    fail(ErrorKind::InvalidArgument, "expected NAME=VALUE, got '" + text + "'");
  }
  return {text.substr(0, eq), text.substr(eq + 1)};
}

std::vector<std::pair<std::string, std::string>> parse_setting_list(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find(',', pos), text.size());
    if (end > pos) out.push_back(parse_setting(text.substr(pos, end - pos)));
    pos = end + 1;
  }
  return out;
}

std::vector<double> resolve_input(const InputSpec& spec, const std::vector<FeatureSpec>& features) {
  if (spec.z) {
    if (spec.z->size() != features.size()) {
      fail(ErrorKind::DimensionMismatch, "input has " + std::to_string(spec.z->size()) + " values, model expects " +
                                             std::to_string(features.size()));
    }
    if (!spec.settings.empty()) fail(ErrorKind::InvalidArgument, "explicit vectors cannot be combined with settings");
    for (double v : *spec.z) {
      if (!std::isfinite(v)) fail(ErrorKind::InvalidArgument, "input values must be finite");
    }
    return *spec.z;
  }
  if (!std::isfinite(spec.base_z)) fail(ErrorKind::InvalidArgument, "base value must be finite");
  std::vector<double> z(features.size(), spec.base_z);
  for (const auto& [name, value] : spec.settings) {
    auto it = std::find_if(features.begin(), features.end(), [&](const FeatureSpec& f) { return f.name == name; });
    if (it == features.end()) fail(ErrorKind::DimensionMismatch, "model has no input feature '" + name + "'");
    const auto k = static_cast<std::size_t>(it - features.begin());
    const std::string context = name + "=" + value;
    if (ends_with_sd(value)) {
      z[k] = spec.base_z + parse_double(std::string_view(value).substr(0, value.size() - 2), context);
    } else {
      z[k] = it->to_z(parse_double(value, context));
    }
  }
  return z;
}

}  // namespace somchange
