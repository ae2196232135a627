#include "patchxfer/image.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "patchxfer/error.hpp"

namespace patchxfer {

namespace {

constexpr std::array<std::uint8_t, 8> kPngSignature = {0x89, 'P', 'N', 'G',
                                                       '\r', '\n', 0x1a, '\n'};

std::uint32_t read_be32(std::span<const std::uint8_t> b, std::size_t off) {
  return (std::uint32_t{b[off]} << 24) | (std::uint32_t{b[off + 1]} << 16) |
         (std::uint32_t{b[off + 2]} << 8) | std::uint32_t{b[off + 3]};
}

void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::uint8_t paeth(int a, int b, int c) {
  const int p = a + b - c;
  const int pa = std::abs(p - a);
  const int pb = std::abs(p - b);
  const int pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return static_cast<std::uint8_t>(a);
  if (pb <= pc) return static_cast<std::uint8_t>(b);
  return static_cast<std::uint8_t>(c);
}

struct Header {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::size_t channels = 0;
};

std::vector<std::uint8_t> inflate_all(const std::vector<std::uint8_t>& in,
                                      std::size_t expected,
                                      std::size_t idat_offset) {
  std::vector<std::uint8_t> out(expected);
  z_stream zs{};
  if (inflateInit(&zs) != Z_OK) throw DecodeError("zlib init failed", idat_offset);
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  const std::size_t consumed = zs.total_in;
  const std::size_t produced = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END)
    throw DecodeError("corrupt or truncated image data (zlib code " +
                          std::to_string(rc) + ")",
                      idat_offset + consumed);
  if (produced != expected)
    throw DecodeError("image data size mismatch", idat_offset + consumed);
  return out;
}

}  // namespace

ImageU8 decode_png(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kPngSignature.size() ||
      !std::equal(kPngSignature.begin(), kPngSignature.end(), bytes.begin()))
    throw DecodeError("missing PNG signature", 0);

  Header hdr;
  bool have_header = false;
  bool have_end = false;
  std::vector<std::uint8_t> compressed;
  std::size_t first_idat = 0;
  std::size_t pos = kPngSignature.size();

  while (!have_end) {
    if (pos + 8 > bytes.size()) throw DecodeError("truncated chunk header", pos);
    const std::uint32_t length = read_be32(bytes, pos);
    const std::string type(reinterpret_cast<const char*>(&bytes[pos + 4]), 4);
    const std::size_t data_at = pos + 8;
    if (length > bytes.size() || data_at + length + 4 > bytes.size())
      throw DecodeError("truncated " + type + " chunk", pos);
    const auto data = bytes.subspan(data_at, length);
    const std::uint32_t stored_crc = read_be32(bytes, data_at + length);
    uLong crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, &bytes[pos + 4], static_cast<uInt>(length + 4));
    if (crc != stored_crc) throw DecodeError("CRC mismatch in " + type + " chunk", pos);

    if (!have_header && type != "IHDR") throw DecodeError("first chunk is not IHDR", pos);
    if (type == "IHDR") {
      if (length != 13) throw DecodeError("bad IHDR length", pos);
      hdr.width = read_be32(data, 0);
      hdr.height = read_be32(data, 4);
      const std::uint8_t depth = data[8];
      const std::uint8_t color = data[9];
      if (hdr.width == 0 || hdr.height == 0)
        throw DecodeError("zero image dimension", data_at);
      if (depth != 8) throw DecodeError("unsupported bit depth " + std::to_string(depth), data_at + 8);
      if (color == 0) {
        hdr.channels = 1;
      } else if (color == 2) {
        hdr.channels = 3;
      } else {
        throw DecodeError("unsupported color type " + std::to_string(color), data_at + 9);
      }
      if (data[10] != 0 || data[11] != 0)
        throw DecodeError("unsupported compression or filter method", data_at + 10);
      if (data[12] != 0) throw DecodeError("interlaced PNG not supported", data_at + 12);
      have_header = true;
    } else if (type == "IDAT") {
      if (compressed.empty()) first_idat = data_at;
      compressed.insert(compressed.end(), data.begin(), data.end());
    } else if (type == "IEND") {
      have_end = true;
    } else if ((type[0] & 0x20) == 0) {
      throw DecodeError("unknown critical chunk " + type, pos);
    }
    pos = data_at + length + 4;
  }
  if (compressed.empty()) throw DecodeError("no IDAT chunk", pos);

  const std::size_t stride = hdr.width * hdr.channels;
  auto raw = inflate_all(compressed, (stride + 1) * hdr.height, first_idat);

  ImageU8 img;
  img.width = hdr.width;
  img.height = hdr.height;
  img.pixels.resize(img.width * img.height * 3);

  std::vector<std::uint8_t> prev(stride, 0);
  std::vector<std::uint8_t> cur(stride);
  const std::size_t bpp = hdr.channels;
  for (std::size_t y = 0; y < hdr.height; ++y) {
    const std::uint8_t* line = &raw[y * (stride + 1)];
    const std::uint8_t filter = line[0];
    for (std::size_t i = 0; i < stride; ++i) {
      const int x = line[1 + i];
      const int a = i >= bpp ? cur[i - bpp] : 0;
      const int b = prev[i];
      const int c = i >= bpp ? prev[i - bpp] : 0;
      int v = 0;
      switch (filter) {
        case 0: v = x; break;
        case 1: v = x + a; break;
        case 2: v = x + b; break;
        case 3: v = x + ((a + b) >> 1); break;
        case 4: v = x + paeth(a, b, c); break;
        default:
          throw DecodeError("bad filter type " + std::to_string(filter) + " on row " +
                                std::to_string(y),
                            first_idat);
      }
      cur[i] = static_cast<std::uint8_t>(v);
    }
    std::uint8_t* dst = &img.pixels[y * img.width * 3];
    if (hdr.channels == 3) {
      std::copy(cur.begin(), cur.end(), dst);
    } else {
      for (std::size_t x = 0; x < img.width; ++x)
        dst[3 * x] = dst[3 * x + 1] = dst[3 * x + 2] = cur[x];
    }
    std::swap(prev, cur);
  }
  return img;
}

std::vector<std::uint8_t> encode_png(const ImageU8& img) {
  if (img.width == 0 || img.height == 0 ||
      img.pixels.size() != img.width * img.height * 3)
    throw ShapeError("encode_png: inconsistent image buffer");

  const std::size_t stride = img.width * 3;
  std::vector<std::uint8_t> raw;
  raw.reserve((stride + 1) * img.height);
  for (std::size_t y = 0; y < img.height; ++y) {
    raw.push_back(0);
    raw.insert(raw.end(), img.pixels.begin() + y * stride,
               img.pixels.begin() + (y + 1) * stride);
  }
  uLongf packed_len = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> packed(packed_len);
  if (compress2(packed.data(), &packed_len, raw.data(), static_cast<uLong>(raw.size()),
                Z_DEFAULT_COMPRESSION) != Z_OK)
    throw Error("encode_png: zlib compression failed");
  packed.resize(packed_len);

  std::vector<std::uint8_t> out(kPngSignature.begin(), kPngSignature.end());
  auto chunk = [&out](const char* type, std::span<const std::uint8_t> data) {
    put_be32(out, static_cast<std::uint32_t>(data.size()));
    const std::size_t type_at = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    uLong crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, &out[type_at], static_cast<uInt>(data.size() + 4));
    put_be32(out, static_cast<std::uint32_t>(crc));
  };

  std::vector<std::uint8_t> ihdr;
  put_be32(ihdr, static_cast<std::uint32_t>(img.width));
  put_be32(ihdr, static_cast<std::uint32_t>(img.height));
  ihdr.insert(ihdr.end(), {8, 2, 0, 0, 0});
  chunk("IHDR", ihdr);
  chunk("IDAT", packed);
  chunk("IEND", {});
  return out;
}

ImageU8 read_png(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_png(bytes);
}

void write_png(const std::filesystem::path& path, const ImageU8& img) {
  const auto bytes = encode_png(img);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for " + path.string());
}

Tensor to_tensor(const ImageU8& img) {
  if (img.pixels.size() != img.width * img.height * 3)
    throw ShapeError("to_tensor: inconsistent image buffer");
  Tensor t = Tensor::image(3, img.height, img.width);
  for (std::size_t y = 0; y < img.height; ++y)
    for (std::size_t x = 0; x < img.width; ++x)
      for (std::size_t c = 0; c < 3; ++c)
        t.at(c, y, x) = static_cast<float>(img.pixels[(y * img.width + x) * 3 + c]) / 255.0f;
  return t;
}

ImageU8 to_image(const Tensor& t) {
  require_image(t, "to_image");
  if (t.channels() != 3 && t.channels() != 1)
    throw ShapeError("to_image: expected 1 or 3 channels, got " +
                     std::to_string(t.channels()));
  ImageU8 img;
  img.width = t.width();
  img.height = t.height();
  img.pixels.resize(img.width * img.height * 3);
  for (std::size_t y = 0; y < img.height; ++y)
    for (std::size_t x = 0; x < img.width; ++x)
      for (std::size_t c = 0; c < 3; ++c) {
        const float v = t.at(t.channels() == 3 ? c : 0, y, x);
        const float clamped = std::clamp(std::isfinite(v) ? v : 0.0f, 0.0f, 1.0f);
        img.pixels[(y * img.width + x) * 3 + c] =
            static_cast<std::uint8_t>(std::lround(clamped * 255.0f));
      }
  return img;
}

Tensor to_luma_bt601(const Tensor& rgb) {
  require_image(rgb, "to_luma_bt601");
  if (rgb.channels() != 3)
    throw ShapeError("to_luma_bt601: expected 3 channels, got " +
                     std::to_string(rgb.channels()));
  Tensor y = Tensor::image(1, rgb.height(), rgb.width());
  const auto r = rgb.plane(0);
  const auto g = rgb.plane(1);
  const auto b = rgb.plane(2);
  auto out = y.plane(0);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = static_cast<float>(0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i]);
  return y;
}

}  // namespace patchxfer
