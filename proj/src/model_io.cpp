#include "pforest/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <system_error>

#include "pforest/errors.hpp"

namespace pforest {

namespace {

constexpr std::string_view kMagic{"PFOREST\0", 8};
constexpr std::size_t kHeaderSize = 8 + 4 + 8;
constexpr std::size_t kTrailerSize = 8;

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }
  std::string take() { return std::move(out_); }

 private:
  void put(std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s(in_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  // Guards element counts read from the file against the bytes remaining.
  std::uint64_t count(std::uint64_t min_bytes_each) {
    const std::uint64_t n = u64();
    if (min_bytes_each > 0 && n > (in_.size() - pos_) / min_bytes_each) corrupt("count exceeds payload");
    return n;
  }
  [[nodiscard]] bool done() const { return pos_ == in_.size(); }

  [[noreturn]] static void corrupt(const std::string& what) {
    throw ModelCorruptError("corrupted model: " + what);
  }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) corrupt("unexpected end of payload");
  }
  std::uint64_t get(int bytes) {
    need(static_cast<std::size_t>(bytes));
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    }
    pos_ += static_cast<std::size_t>(bytes);
    return v;
  }

  std::string_view in_;
  std::size_t pos_ = 0;
};

void write_measure(Writer& w, const MeasureParams& m) {
  w.u8(static_cast<std::uint8_t>(m.kind));
  w.u64(m.window);
  w.f64(m.g);
  w.f64(m.epsilon);
  w.f64(m.nu);
  w.f64(m.lambda);
  w.f64(m.c_cost);
}

MeasureParams read_measure(Reader& r) {
  MeasureParams m;
  const auto kind = r.u8();
  if (kind >= kMeasureCount) Reader::corrupt("unknown measure kind");
  m.kind = static_cast<MeasureKind>(kind);
  m.window = static_cast<std::size_t>(r.u64());
  m.g = r.f64();
  m.epsilon = r.f64();
  m.nu = r.f64();
  m.lambda = r.f64();
  m.c_cost = r.f64();
  return m;
}

}  // namespace

std::string serialize_model(const ProximityForest& forest) {
  Writer w;
  const auto& cfg = forest.config;
  w.u64(cfg.num_trees);
  w.u64(cfg.candidates);
  w.u8(static_cast<std::uint8_t>(cfg.scope));
  w.u64(cfg.seed);
  w.u64(cfg.measures.size());
  for (auto k : cfg.measures) w.u8(static_cast<std::uint8_t>(k));

  w.u64(forest.length);
  w.u64(forest.label_names.size());
  for (const auto& name : forest.label_names) w.str(name);

  w.u64(forest.exemplars.size());
  for (std::size_t i = 0; i < forest.exemplars.size(); ++i) {
    for (double v : forest.exemplars.values(i)) w.f64(v);
  }

  w.u64(forest.trees.size());
  for (const auto& tree : forest.trees) {
    w.u64(tree.nodes.size());
    for (const auto& node : tree.nodes) {
      write_measure(w, node.measure);
      w.i32(node.label);
      w.u64(node.branches.size());
      for (const auto& b : node.branches) {
        w.u32(b.exemplar);
        w.i32(b.label);
        w.u32(b.child);
      }
    }
  }
  const std::string payload = w.take();

  Writer out;
  std::string bytes(kMagic);
  out.u32(kModelFormatVersion);
  out.u64(payload.size());
  bytes += out.take();
  bytes += payload;
  Writer trailer;
  trailer.u64(fnv1a(payload));
  bytes += trailer.take();
  return bytes;
}

ProximityForest deserialize_model(std::string_view bytes) {
  if (bytes.size() < kHeaderSize || bytes.substr(0, kMagic.size()) != kMagic) {
    Reader::corrupt("missing model header");
  }
  Reader header(bytes.substr(kMagic.size(), kHeaderSize - kMagic.size()));
  const std::uint32_t version = header.u32();
  if (version != kModelFormatVersion) {
    throw ModelVersionError("model format version " + std::to_string(version) +
                            " is not supported (expected " +
                            std::to_string(kModelFormatVersion) + ")");
  }
  const std::uint64_t payload_size = header.u64();
  if (bytes.size() - kHeaderSize < kTrailerSize ||
      payload_size != bytes.size() - kHeaderSize - kTrailerSize) {
    Reader::corrupt("payload size does not match file size");
  }
  const std::string_view payload = bytes.substr(kHeaderSize, payload_size);
  Reader trailer(bytes.substr(kHeaderSize + payload_size));
  if (trailer.u64() != fnv1a(payload)) Reader::corrupt("checksum mismatch");

  Reader r(payload);
  ProximityForest f;
  auto& cfg = f.config;
  cfg.num_trees = static_cast<std::size_t>(r.u64());
  cfg.candidates = static_cast<std::size_t>(r.u64());
  const auto scope = r.u8();
  if (scope > 1) Reader::corrupt("unknown measure scope");
  cfg.scope = static_cast<MeasureScope>(scope);
  cfg.seed = r.u64();
  cfg.measures.clear();
  const auto n_measures = r.count(1);
  for (std::uint64_t i = 0; i < n_measures; ++i) {
    const auto k = r.u8();
    if (k >= kMeasureCount) Reader::corrupt("unknown measure kind");
    cfg.measures.push_back(static_cast<MeasureKind>(k));
  }

  f.length = static_cast<std::size_t>(r.u64());
  const auto n_labels = r.count(4);
  for (std::uint64_t i = 0; i < n_labels; ++i) f.label_names.push_back(r.str());

  const auto n_exemplars = r.count(8 * std::max<std::size_t>(f.length, 1));
  f.exemplars = SeriesStore(f.length);
  std::vector<double> values(f.length);
  for (std::uint64_t i = 0; i < n_exemplars; ++i) {
    for (auto& v : values) v = r.f64();
    f.exemplars.add(values);
  }

  const auto n_trees = r.count(8);
  if (n_trees != cfg.num_trees) Reader::corrupt("tree count does not match configuration");
  f.trees.resize(static_cast<std::size_t>(n_trees));
  for (auto& tree : f.trees) {
    const auto n_nodes = r.count(1);
    if (n_nodes == 0) Reader::corrupt("empty tree");
    tree.nodes.resize(static_cast<std::size_t>(n_nodes));
    for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
      auto& node = tree.nodes[id];
      node.measure = read_measure(r);
      node.label = r.i32();
      const auto n_branches = r.count(12);
      for (std::uint64_t b = 0; b < n_branches; ++b) {
        Branch br;
        br.exemplar = r.u32();
        br.label = r.i32();
        br.child = r.u32();
        // Children are always created after their parent.
        if (br.child <= id || br.child >= n_nodes) Reader::corrupt("invalid child index");
        if (br.exemplar >= n_exemplars) Reader::corrupt("invalid exemplar index");
        node.branches.push_back(br);
      }
      if (node.label < 1 || static_cast<std::uint64_t>(node.label) > n_labels) {
        Reader::corrupt("leaf label out of range");
      }
      if (node.branches.size() == 1) Reader::corrupt("internal node with one branch");
    }
  }
  if (!r.done()) Reader::corrupt("trailing bytes in payload");
  return f;
}

void save_model(const ProximityForest& forest, const std::filesystem::path& path) {
  const std::string bytes = serialize_model(forest);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ModelIoError("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw ModelIoError("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw ModelIoError("cannot move model into " + path.string());
  }
}

ProximityForest load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelIoError("cannot open model file " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw ModelIoError("failed reading model file " + path.string());
  return deserialize_model(bytes);
}

}  // namespace pforest
