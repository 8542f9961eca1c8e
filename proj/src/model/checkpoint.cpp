#include "grnet/model/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "grnet/error.hpp"
#include "grnet/planning/vocabulary.hpp"

namespace grnet::model {

namespace {

constexpr char kMagic[8] = {'G', 'R', 'N', 'E', 'T', 'C', 'K', 'P'};
constexpr std::uint8_t kFloat32 = 1;

class Writer {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes_.insert(bytes_.end(), s.begin(), s.end());
  }
  std::vector<std::uint8_t>& bytes() { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  Reader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

  std::uint8_t u8() { return *take(1); }
  std::uint32_t u32() {
    const auto* p = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    const auto* p = take(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint32_t n = u32();
    const auto* p = take(n);
    return std::string(reinterpret_cast<const char*>(p), n);
  }
  bool done() const { return pos_ == size_; }

 private:
  const std::uint8_t* take(std::size_t n) {
    if (n > size_ - pos_) throw Error(ErrorCode::kParse, "checkpoint truncated");
    const auto* p = data_ + pos_;
    pos_ += n;
    return p;
  }
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

std::uint64_t fnv(const std::uint8_t* data, std::size_t n) {
  return planning::fnv1a64(std::string_view(reinterpret_cast<const char*>(data), n));
}

}  // namespace

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt) {
  Writer w;
  for (char c : kMagic) w.u8(static_cast<std::uint8_t>(c));
  w.u32(kCheckpointVersion);
  w.str(to_text(ckpt.config));
  w.str(ckpt.domain_id);
  w.u64(ckpt.vocab_checksum);
  const auto ts = nn::tensors(ckpt.params);
  w.u32(static_cast<std::uint32_t>(ts.size()));
  for (const auto& t : ts) {
    w.str(t.name);
    w.u8(kFloat32);
    w.u32(static_cast<std::uint32_t>(t.shape.size()));
    for (auto d : t.shape) w.u64(d);
    for (float v : t.values) w.f32(v);
  }
  w.u32(static_cast<std::uint32_t>(ckpt.history.size()));
  for (const auto& e : ckpt.history) {
    w.f64(e.train_loss);
    w.f64(e.validation_loss);
  }
  auto& bytes = w.bytes();
  const auto sum = fnv(bytes.data(), bytes.size());
  w.u64(sum);
  return std::move(bytes);
}

Checkpoint deserialize_checkpoint(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < sizeof(kMagic) + 4 + 8) throw Error(ErrorCode::kParse, "checkpoint truncated");
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) throw Error(ErrorCode::kParse, "not a checkpoint file");
  Reader header(bytes.data() + sizeof(kMagic), 4);
  const std::uint32_t version = header.u32();
  if (version != kCheckpointVersion)
    throw Error(ErrorCode::kIncompatible, "checkpoint version " + std::to_string(version) + ", expected " +
                                              std::to_string(kCheckpointVersion));
  const std::size_t body = bytes.size() - 8;
  Reader tail(bytes.data() + body, 8);
  if (tail.u64() != fnv(bytes.data(), body)) throw Error(ErrorCode::kParse, "checkpoint checksum mismatch");

  Reader r(bytes.data() + sizeof(kMagic) + 4, body - sizeof(kMagic) - 4);
  Checkpoint ckpt;
  std::istringstream config_text(r.str());
  ckpt.config = parse_config(config_text);
  ckpt.domain_id = r.str();
  ckpt.vocab_checksum = r.u64();

  const std::uint32_t count = r.u32();
  std::vector<std::pair<std::string, std::vector<std::size_t>>> shapes;
  std::vector<std::vector<float>> values;
  for (std::uint32_t i = 0; i < count; ++i) {
    auto name = r.str();
    if (r.u8() != kFloat32) throw Error(ErrorCode::kParse, "unsupported dtype for tensor " + name);
    const std::uint32_t rank = r.u32();
    if (rank == 0 || rank > 2) throw Error(ErrorCode::kParse, "bad rank for tensor " + name);
    std::vector<std::size_t> shape(rank);
    std::size_t n = 1;
    for (auto& d : shape) {
      d = static_cast<std::size_t>(r.u64());
      if (d > (std::size_t{1} << 32)) throw Error(ErrorCode::kParse, "bad dimension for tensor " + name);
      n *= d;
    }
    std::vector<float> v(n);
    for (auto& x : v) x = r.f32();
    shapes.emplace_back(std::move(name), std::move(shape));
    values.push_back(std::move(v));
  }
  const std::uint32_t epochs = r.u32();
  for (std::uint32_t i = 0; i < epochs; ++i) {
    EpochStats e;
    e.train_loss = r.f64();
    e.validation_loss = r.f64();
    ckpt.history.push_back(e);
  }
  if (!r.done()) throw Error(ErrorCode::kParse, "trailing bytes in checkpoint");

  // Shape comes from the embedding, LSTM input gate and output layer.
  auto find = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < shapes.size(); ++i)
      if (shapes[i].first == name) return i;
    throw Error(ErrorCode::kParse, "checkpoint lacks tensor " + name);
  };
  const auto& emb = shapes[find("embedding")].second;
  const auto& out = shapes[find("output.w")].second;
  if (emb.size() != 2 || out.size() != 2 || emb[0] == 0) throw Error(ErrorCode::kParse, "bad tensor ranks");
  const nn::NetworkShape shape{emb[0] - 1, emb[1], out[0], out[1]};
  ckpt.params = Params(shape);
  auto ts = nn::tensors(ckpt.params);
  if (ts.size() != shapes.size()) throw Error(ErrorCode::kParse, "unexpected tensor count");
  for (auto& t : ts) {
    const auto i = find(t.name);
    if (shapes[i].second != t.shape) throw Error(ErrorCode::kParse, "inconsistent shape for tensor " + t.name);
    std::copy(values[i].begin(), values[i].end(), t.values.begin());
  }
  ckpt.params.validate();
  if (ckpt.config.embedding_dim != shape.embedding_dim || ckpt.config.hidden_size != shape.hidden_size)
    throw Error(ErrorCode::kParse, "config disagrees with tensor shapes");
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  const auto bytes = serialize_checkpoint(ckpt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes);
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const planning::DomainVocabulary& vocab) {
  Checkpoint ckpt = load_checkpoint(path);
  if (ckpt.vocab_checksum != vocab.checksum())
    throw Error(ErrorCode::kIncompatible, "checkpoint vocabulary " + planning::checksum_hex(ckpt.vocab_checksum) +
                                              " does not match " + planning::checksum_hex(vocab.checksum()));
  const auto shape = ckpt.params.shape();
  if (shape.num_actions != vocab.num_actions() || shape.num_fluents != vocab.num_fluents())
    throw Error(ErrorCode::kIncompatible, "checkpoint tensor shapes do not match the vocabulary");
  return ckpt;
}

}  // namespace grnet::model
