#include "patchxfer/tensor_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include "patchxfer/error.hpp"

namespace patchxfer {

namespace {

constexpr char kMagic[4] = {'T', 'N', 'S', 'R'};
constexpr std::int64_t kMaxExactIndex = std::int64_t{1} << 24;

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i)
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

template <typename T>
T get_le(std::span<const std::uint8_t> b, std::size_t off) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(b[off + i]) << (8 * i);
  return v;
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : bytes_(b) {}

  template <typename T>
  T take(const char* field) {
    if (pos_ + sizeof(T) > bytes_.size())
      throw FormatError(std::string("truncated tensor file: missing ") + field);
    T v = get_le<T>(bytes_, pos_);
    pos_ += sizeof(T);
    return v;
  }

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize_tensor(const Tensor& t) {
  if (t.empty()) throw ShapeError("cannot serialize an empty tensor");
  if (t.rank() > std::numeric_limits<std::uint8_t>::max())
    throw ShapeError("rank too large for TNSR format");
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  out.reserve(4 + 4 + 2 + 8 * t.rank() + 4 * t.size());
  put_le<std::uint32_t>(out, kTensorFormatVersion);
  out.push_back(kDtypeF32);
  out.push_back(static_cast<std::uint8_t>(t.rank()));
  for (auto d : t.shape()) put_le<std::uint64_t>(out, d);
  for (float v : t.data()) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

Tensor deserialize_tensor(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw FormatError("bad magic");
  Reader r(bytes.subspan(4));
  const auto version = r.take<std::uint32_t>("version");
  if (version != kTensorFormatVersion)
    throw FormatError("unsupported version " + std::to_string(version));
  const auto dtype = r.take<std::uint8_t>("dtype");
  if (dtype != kDtypeF32)
    throw FormatError("dtype mismatch: code " + std::to_string(dtype) + ", expected 0 (f32)");
  const auto rank = r.take<std::uint8_t>("rank");
  if (rank == 0) throw FormatError("rank: zero-dimensional tensors are not supported");
  Shape shape;
  std::uint64_t numel = 1;
  for (std::uint8_t i = 0; i < rank; ++i) {
    const auto d = r.take<std::uint64_t>("dims");
    if (d == 0) throw FormatError("dims: zero-sized dimension " + std::to_string(i));
    if (numel > std::numeric_limits<std::uint64_t>::max() / d)
      throw FormatError("dims: element count overflows");
    numel *= d;
    shape.push_back(static_cast<std::size_t>(d));
  }
  if (r.remaining() / 4 < numel)
    throw FormatError("truncated tensor file: payload has " +
                      std::to_string(r.remaining()) + " bytes, expected " +
                      std::to_string(numel * 4));
  if (r.remaining() != numel * 4)
    throw FormatError("payload: " + std::to_string(r.remaining() - numel * 4) +
                      " trailing bytes");
  std::vector<float> data(numel);
  for (auto& v : data) {
    v = std::bit_cast<float>(r.take<std::uint32_t>("payload"));
    if (!std::isfinite(v)) throw FormatError("payload: non-finite value");
  }
  return Tensor(std::move(shape), std::move(data));
}

void save_tensor(const std::filesystem::path& path, const Tensor& t) {
  const auto bytes = serialize_tensor(t);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for " + path.string());
}

Tensor load_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return deserialize_tensor(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

Tensor index_to_tensor(const IndexTensor& idx) {
  std::vector<float> data(idx.data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (idx.data[i] < 0 || idx.data[i] >= kMaxExactIndex)
      throw ParameterError("index " + std::to_string(idx.data[i]) +
                           " not representable exactly as f32");
    data[i] = static_cast<float>(idx.data[i]);
  }
  return Tensor(idx.shape, std::move(data));
}

IndexTensor tensor_to_index(const Tensor& t) {
  IndexTensor idx{t.shape(), std::vector<std::int64_t>(t.size())};
  for (std::size_t i = 0; i < t.size(); ++i) {
    const float v = t[i];
    if (!(v >= 0.0f) || v != std::floor(v) || v >= static_cast<float>(kMaxExactIndex))
      throw FormatError("index plane holds non-index value " + std::to_string(v));
    idx.data[i] = static_cast<std::int64_t>(v);
  }
  return idx;
}

}  // namespace patchxfer
