#include "somchange/bundle.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>

#include "somchange/error.hpp"

namespace somchange {

namespace {

constexpr char kBundleMagic[8] = {'S', 'O', 'M', 'C', 'H', 'G', 'B', '\0'};
constexpr char kSomMagic[8] = {'S', 'O', 'M', 'C', 'H', 'G', 'S', '\0'};
constexpr std::uint32_t kFormatVersion = 1;

class Writer {
 public:
  void raw(std::string_view s) { out_.append(s); }
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    raw(s);
  }
  std::string& bytes() { return out_; }

 private:
  void le(std::uint64_t v, int n) {
    for (int b = 0; b < n; ++b) out_.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
  }
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  std::string_view raw(std::size_t n) {
    need(n);
    auto s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  double f64() { return std::bit_cast<double>(le(8)); }
  std::string str() {
    const auto n = u32();
    return std::string(raw(n));
  }
  std::size_t position() const { return pos_; }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) fail(ErrorKind::Data, "model file is truncated");
  }
  std::uint64_t le(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int b = 0; b < n; ++b) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in_[pos_ + b])) << (8 * b);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::string_view in_;
  std::size_t pos_ = 0;
};

void put_som(Writer& w, const Som& som) {
  w.raw("SOMM");
  w.u8(static_cast<std::uint8_t>(som.grid.topology()));
  w.u32(static_cast<std::uint32_t>(som.grid.width()));
  w.u32(static_cast<std::uint32_t>(som.grid.height()));
  w.u32(static_cast<std::uint32_t>(som.feature_count()));
  w.f64(som.bandwidth);
  for (const auto& f : som.features) {
    w.str(f.name);
    w.f64(f.z_mean);
    w.f64(f.z_std);
  }
  for (double v : som.prototypes.values()) w.f64(v);
}

Som get_som(Reader& r) {
  if (r.raw(4) != "SOMM") fail(ErrorKind::Data, "model file: bad map block tag");
  const auto topo = r.u8();
  if (topo > 1) fail(ErrorKind::Data, "model file: unknown grid topology");
  const auto width = r.u32();
  const auto height = r.u32();
  const auto m = r.u32();
  Som som;
  som.grid = SomGrid(static_cast<Topology>(topo), width, height);
  som.bandwidth = r.f64();
  for (std::uint32_t k = 0; k < m; ++k) {
    FeatureSpec f;
    f.name = r.str();
    f.index = k;
    f.z_mean = r.f64();
    f.z_std = r.f64();
    som.features.push_back(std::move(f));
  }
  som.prototypes = Matrix(som.grid.size(), m);
  for (double& v : som.prototypes.values()) v = r.f64();
  som.validate();
  return som;
}

void seal(Writer& w) { w.u64(fnv1a(w.bytes())); }

Reader open_sealed(std::string_view bytes, const char (&magic)[8]) {
  if (bytes.size() < 20) fail(ErrorKind::Data, "model file is truncated");
  if (std::memcmp(bytes.data(), magic, 8) != 0) fail(ErrorKind::Data, "not a model file of the expected kind");
  const auto body = bytes.substr(0, bytes.size() - 8);
  Reader tail(bytes.substr(bytes.size() - 8));
  if (tail.u64() != fnv1a(body)) fail(ErrorKind::Data, "model file checksum mismatch");
  Reader r(body);
  r.raw(8);
  if (r.u32() != kFormatVersion) fail(ErrorKind::Data, "unsupported model file version");
  return r;
}

}  // namespace

void ModelBundle::validate() const {
  input_som.validate();
  output_som.validate();
  if (association.entries.rows() != input_som.neuron_count() ||
      association.entries.cols() != output_som.neuron_count()) {
    fail(ErrorKind::Data, "association shape does not match the maps");
  }
}

ModelBundle train_bundle(const Dataset& data, const BundleSpec& spec) {
  ModelBundle b;
  b.config = spec.train;
  b.fingerprint = data.fingerprint;
  b.input_som = train_som(data.z_inputs, spec.input_grid, spec.train, data.input_features);
  b.output_som = train_som(data.z_outputs, spec.output_grid, spec.train, data.output_features);
  b.association = build_association(b.input_som, b.output_som, data.z_inputs, data.z_outputs);
  return b;
}

std::string encode_som(const Som& som) {
  som.validate();
  Writer w;
  w.raw(std::string_view(kSomMagic, 8));
  w.u32(kFormatVersion);
  put_som(w, som);
  seal(w);
  return std::move(w.bytes());
}

Som decode_som(std::string_view bytes) {
  auto r = open_sealed(bytes, kSomMagic);
  Som som = get_som(r);
  if (!r.done()) fail(ErrorKind::Data, "model file has trailing bytes");
  return som;
}

std::string encode_bundle(const ModelBundle& b) {
  b.validate();
  Writer w;
  w.raw(std::string_view(kBundleMagic, 8));
  w.u32(kFormatVersion);
  w.u64(b.fingerprint);
  w.u32(b.config.epochs);
  w.f64(b.config.initial_radius);
  w.f64(b.config.final_radius);
  w.u64(b.config.seed);
  w.u8(static_cast<std::uint8_t>(b.config.init));
  put_som(w, b.input_som);
  put_som(w, b.output_som);
  w.raw("ASSC");
  w.u32(static_cast<std::uint32_t>(b.association.entries.rows()));
  w.u32(static_cast<std::uint32_t>(b.association.entries.cols()));
  w.u8(b.association.row_normalized ? 1 : 0);
  for (double v : b.association.entries.values()) w.f64(v);
  seal(w);
  return std::move(w.bytes());
}

ModelBundle decode_bundle(std::string_view bytes) {
  auto r = open_sealed(bytes, kBundleMagic);
  ModelBundle b;
  b.fingerprint = r.u64();
  b.config.epochs = r.u32();
  b.config.initial_radius = r.f64();
  b.config.final_radius = r.f64();
  b.config.seed = r.u64();
  const auto init = r.u8();
  if (init > 1) fail(ErrorKind::Data, "model file: unknown init method");
  b.config.init = static_cast<InitMethod>(init);
  b.input_som = get_som(r);
  b.output_som = get_som(r);
  if (r.raw(4) != "ASSC") fail(ErrorKind::Data, "model file: bad association block tag");
  const auto rows = r.u32();
  const auto cols = r.u32();
  b.association.row_normalized = r.u8() != 0;
  b.association.entries = Matrix(rows, cols);
  for (double& v : b.association.entries.values()) v = r.f64();
  if (!r.done()) fail(ErrorKind::Data, "model file has trailing bytes");
  b.validate();
  return b;
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::Io, "failed while writing '" + path.string() + "'");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path) {
  write_file(path, encode_bundle(bundle));
}

ModelBundle load_bundle(const std::filesystem::path& path) { return decode_bundle(read_file(path)); }

std::string bundle_id(std::string_view encoded) { return hex64(fnv1a(encoded)); }

ModelStore::ModelStore(std::filesystem::path root) : root_(std::move(root)) {
  std::error_code ec;
  std::filesystem::create_directories(root_, ec);
  if (ec) fail(ErrorKind::Io, "cannot create model store '" + root_.string() + "'");
}

std::string ModelStore::put(const ModelBundle& bundle) {
  const auto bytes = encode_bundle(bundle);
  const auto id = bundle_id(bytes);
  std::lock_guard lock(mutex_);
  const auto path = root_ / (id + ".scb");
  if (!std::filesystem::exists(path)) {
    const auto tmp = root_ / (id + ".scb.tmp");
    write_file(tmp, bytes);
    std::filesystem::rename(tmp, path);
  }
  cache_.try_emplace(id, std::make_shared<const ModelBundle>(bundle));
  return id;
}

std::shared_ptr<const ModelBundle> ModelStore::get(const std::string& id) {
  std::lock_guard lock(mutex_);
  if (auto it = cache_.find(id); it != cache_.end()) return it->second;
  for (char c : id) {
    if (!std::isxdigit(static_cast<unsigned char>(c))) return nullptr;
  }
  const auto path = root_ / (id + ".scb");
  if (id.empty() || !std::filesystem::exists(path)) return nullptr;
  auto b = std::make_shared<const ModelBundle>(load_bundle(path));
  cache_.emplace(id, b);
  return b;
}

std::vector<std::string> ModelStore::ids() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(root_)) {
    if (e.path().extension() == ".scb") out.push_back(e.path().stem().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace somchange
