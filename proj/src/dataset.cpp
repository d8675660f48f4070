#include "somchange/dataset.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "somchange/error.hpp"

namespace somchange {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.emplace_back(trim(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  if (quoted) fail(ErrorKind::Data, "line " + std::to_string(line_no) + ": unterminated quote");
  cells.emplace_back(trim(cell));
  return cells;
}

double parse_number(const std::string& cell, std::size_t line_no, const std::string& column) {
  const std::string where = "line " + std::to_string(line_no) + ", column '" + column + "'";
  if (cell.empty()) fail(ErrorKind::Data, where + ": missing value");
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    fail(ErrorKind::Data, where + ": '" + cell + "' is not a finite number");
  }
  return v;
}

std::vector<FeatureSpec> fit_features(const std::vector<std::string>& names, const Matrix& raw) {
  std::vector<FeatureSpec> out;
  const double n = static_cast<double>(raw.rows());
  for (std::size_t k = 0; k < names.size(); ++k) {
    double mean = 0.0;
    for (std::size_t r = 0; r < raw.rows(); ++r) mean += raw(r, k);
    mean /= n;
    double ss = 0.0;
    for (std::size_t r = 0; r < raw.rows(); ++r) ss += (raw(r, k) - mean) * (raw(r, k) - mean);
    const double sd = raw.rows() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    if (!(sd > 0.0)) fail(ErrorKind::Data, "column '" + names[k] + "' is constant; it cannot be standardized");
    out.push_back({names[k], k, mean, sd});
  }
  return out;
}

}  // namespace

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

Matrix standardize(const Matrix& raw, const std::vector<FeatureSpec>& features) {
  if (raw.cols() != features.size()) fail(ErrorKind::DimensionMismatch, "feature specs do not match columns");
  Matrix z(raw.rows(), raw.cols());
  for (std::size_t r = 0; r < raw.rows(); ++r) {
    for (std::size_t k = 0; k < raw.cols(); ++k) z(r, k) = features[k].to_z(raw(r, k));
  }
  return z;
}

Matrix destandardize(const Matrix& z, const std::vector<FeatureSpec>& features) {
  if (z.cols() != features.size()) fail(ErrorKind::DimensionMismatch, "feature specs do not match columns");
  Matrix raw(z.rows(), z.cols());
  for (std::size_t r = 0; r < z.rows(); ++r) {
    for (std::size_t k = 0; k < z.cols(); ++k) raw(r, k) = features[k].to_raw(z(r, k));
  }
  return raw;
}

Dataset parse_csv(std::string_view text, const CsvSchema& schema) {
  std::vector<std::string_view> lines;
  for (std::size_t pos = 0; pos <= text.size();) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    lines.push_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  std::size_t header_line = 0;
  while (header_line < lines.size() && trim(lines[header_line]).empty()) ++header_line;
  if (header_line == lines.size()) fail(ErrorKind::Data, "CSV has no header row");

  const auto header = split_line(lines[header_line], header_line + 1);
  std::map<std::string, std::size_t> column_of;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c].empty()) fail(ErrorKind::Data, "CSV header has an empty column name");
    if (!column_of.emplace(header[c], c).second) fail(ErrorKind::Data, "CSV header repeats column '" + header[c] + "'");
  }

  auto resolve = [&](const std::vector<std::string>& names) {
    std::vector<std::size_t> cols;
    for (const auto& name : names) {
      auto it = column_of.find(name);
      if (it == column_of.end()) fail(ErrorKind::Data, "CSV has no column '" + name + "'");
      cols.push_back(it->second);
    }
    return cols;
  };
  if (schema.inputs.empty()) fail(ErrorKind::InvalidArgument, "schema lists no input columns");
  const auto in_cols = resolve(schema.inputs);
  std::vector<std::string> out_names = schema.outputs;
  if (out_names.empty()) {
    for (const auto& h : header) {
      if (std::find(schema.inputs.begin(), schema.inputs.end(), h) == schema.inputs.end()) out_names.push_back(h);
    }
  }
  if (out_names.empty()) fail(ErrorKind::InvalidArgument, "schema leaves no output columns");
  const auto out_cols = resolve(out_names);

  Dataset ds;
  std::vector<double> in_row(in_cols.size()), out_row(out_cols.size());
  for (std::size_t l = header_line + 1; l < lines.size(); ++l) {
    if (trim(lines[l]).empty()) continue;
    const auto cells = split_line(lines[l], l + 1);
    if (cells.size() != header.size()) {
      fail(ErrorKind::Data, "line " + std::to_string(l + 1) + ": expected " + std::to_string(header.size()) +
                                " cells, found " + std::to_string(cells.size()));
    }
    for (std::size_t k = 0; k < in_cols.size(); ++k) in_row[k] = parse_number(cells[in_cols[k]], l + 1, schema.inputs[k]);
    for (std::size_t k = 0; k < out_cols.size(); ++k) out_row[k] = parse_number(cells[out_cols[k]], l + 1, out_names[k]);
    ds.raw_inputs.append_row(in_row);
    ds.raw_outputs.append_row(out_row);
  }
  if (ds.raw_inputs.rows() == 0) fail(ErrorKind::Data, "CSV has no data rows");

  ds.input_features = fit_features(schema.inputs, ds.raw_inputs);
  ds.output_features = fit_features(out_names, ds.raw_outputs);
  ds.z_inputs = standardize(ds.raw_inputs, ds.input_features);
  ds.z_outputs = standardize(ds.raw_outputs, ds.output_features);

  std::string canon;
  for (const auto& n : schema.inputs) canon += n + '\x1f';
  canon += '\x1e';
  for (const auto& n : out_names) canon += n + '\x1f';
  for (const Matrix* m : {&ds.raw_inputs, &ds.raw_outputs}) {
    for (double v : m->values()) {
      const auto bits = std::bit_cast<std::uint64_t>(v);
      for (int b = 0; b < 8; ++b) canon += static_cast<char>((bits >> (8 * b)) & 0xff);
    }
  }
  ds.fingerprint = fnv1a(canon);
  return ds;
}

Dataset ingest_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), schema);
}

}  // namespace somchange
