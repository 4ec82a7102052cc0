#include "synthdet/png_io.hpp"

#include <zlib.h>

#include <array>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

namespace synthdet {

namespace {

void put_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t get_u32_be(const std::uint8_t* p) {
  return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
         (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

constexpr std::array<std::uint8_t, 8> kSignature = {137, 80, 78, 71, 13, 10, 26, 10};

void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                  const std::uint8_t* data, std::size_t len) {
  put_u32_be(out, static_cast<std::uint32_t>(len));
  const std::size_t crc_start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data, data + len);
  const uLong crc = crc32(0, out.data() + crc_start, static_cast<uInt>(4 + len));
  put_u32_be(out, static_cast<std::uint32_t>(crc));
}

std::vector<std::uint8_t> deflate_bytes(const std::vector<std::uint8_t>& raw) {
  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> out(bound);
  if (compress2(out.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK) {
    throw std::runtime_error("png: deflate failed");
  }
  out.resize(bound);
  return out;
}

std::vector<std::uint8_t> encode_common(int width, int height, int bit_depth, int color_type,
                                        const std::vector<std::uint8_t>& raw_rows) {
  std::vector<std::uint8_t> png(kSignature.begin(), kSignature.end());
  std::vector<std::uint8_t> ihdr;
  put_u32_be(ihdr, static_cast<std::uint32_t>(width));
  put_u32_be(ihdr, static_cast<std::uint32_t>(height));
  ihdr.push_back(static_cast<std::uint8_t>(bit_depth));
  ihdr.push_back(static_cast<std::uint8_t>(color_type));
  ihdr.push_back(0);  // compression
  ihdr.push_back(0);  // filter method
  ihdr.push_back(0);  // no interlace
  append_chunk(png, "IHDR", ihdr.data(), ihdr.size());
  const auto idat = deflate_bytes(raw_rows);
  append_chunk(png, "IDAT", idat.data(), idat.size());
  append_chunk(png, "IEND", nullptr, 0);
  return png;
}

struct DecodedPng {
  int width = 0;
  int height = 0;
  int bit_depth = 0;
  int color_type = 0;
  std::vector<std::uint8_t> scanlines;  // de-filtered, packed samples
};

int channel_count(int color_type) {
  switch (color_type) {
    case 0: return 1;  // gray
    case 2: return 3;  // rgb
    case 6: return 4;  // rgba
    default: throw std::runtime_error("png: unsupported color type " + std::to_string(color_type));
  }
}

std::uint8_t paeth(std::uint8_t a, std::uint8_t b, std::uint8_t c) {
  const int p = static_cast<int>(a) + b - c;
  const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

DecodedPng decode_common(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kSignature.data(), 8) != 0) {
    throw std::runtime_error("png: bad signature");
  }
  DecodedPng img;
  std::vector<std::uint8_t> idat;
  std::size_t pos = 8;
  bool saw_ihdr = false;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t len = get_u32_be(bytes.data() + pos);
    if (pos + 12 + len > bytes.size()) throw std::runtime_error("png: truncated chunk");
    const char* type = reinterpret_cast<const char*>(bytes.data() + pos + 4);
    const std::uint8_t* data = bytes.data() + pos + 8;
    if (std::memcmp(type, "IHDR", 4) == 0) {
      if (len != 13) throw std::runtime_error("png: bad IHDR");
      img.width = static_cast<int>(get_u32_be(data));
      img.height = static_cast<int>(get_u32_be(data + 4));
      img.bit_depth = data[8];
      img.color_type = data[9];
      if (data[12] != 0) throw std::runtime_error("png: interlaced images unsupported");
      saw_ihdr = true;
    } else if (std::memcmp(type, "IDAT", 4) == 0) {
      idat.insert(idat.end(), data, data + len);
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      break;
    }
    pos += 12 + len;
  }
  if (!saw_ihdr || img.width <= 0 || img.height <= 0) throw std::runtime_error("png: missing IHDR");
  if (img.bit_depth != 8 && img.bit_depth != 16) {
    throw std::runtime_error("png: unsupported bit depth " + std::to_string(img.bit_depth));
  }

  const int channels = channel_count(img.color_type);
  const std::size_t bpp = static_cast<std::size_t>(channels) * (img.bit_depth / 8);
  const std::size_t stride = bpp * img.width;
  std::vector<std::uint8_t> raw((stride + 1) * img.height);
  uLongf raw_len = static_cast<uLongf>(raw.size());
  const int rc = uncompress(raw.data(), &raw_len, idat.data(), static_cast<uLong>(idat.size()));
  if (rc != Z_OK || raw_len != raw.size()) throw std::runtime_error("png: inflate failed");

  img.scanlines.resize(stride * img.height);
  std::vector<std::uint8_t> prev(stride, 0);
  for (int y = 0; y < img.height; ++y) {
    const std::uint8_t filter = raw[(stride + 1) * y];
    const std::uint8_t* src = raw.data() + (stride + 1) * y + 1;
    std::uint8_t* dst = img.scanlines.data() + stride * y;
    for (std::size_t i = 0; i < stride; ++i) {
      const std::uint8_t left = i >= bpp ? dst[i - bpp] : 0;
      const std::uint8_t up = prev[i];
      const std::uint8_t ul = i >= bpp ? prev[i - bpp] : 0;
      switch (filter) {
        case 0: dst[i] = src[i]; break;
        case 1: dst[i] = static_cast<std::uint8_t>(src[i] + left); break;
        case 2: dst[i] = static_cast<std::uint8_t>(src[i] + up); break;
        case 3: dst[i] = static_cast<std::uint8_t>(src[i] + (left + up) / 2); break;
        case 4: dst[i] = static_cast<std::uint8_t>(src[i] + paeth(left, up, ul)); break;
        default: throw std::runtime_error("png: bad filter byte");
      }
    }
    std::memcpy(prev.data(), dst, stride);
  }
  return img;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

std::vector<std::uint8_t> encode_png(const ImageRgb8& image) {
  const std::size_t stride = static_cast<std::size_t>(image.width) * 3;
  std::vector<std::uint8_t> raw((stride + 1) * image.height);
  for (int y = 0; y < image.height; ++y) {
    raw[(stride + 1) * y] = 0;
    std::memcpy(raw.data() + (stride + 1) * y + 1, image.pixels.data() + stride * y, stride);
  }
  return encode_common(image.width, image.height, 8, 2, raw);
}

std::vector<std::uint8_t> encode_png(const ImageGray16& image) {
  const std::size_t stride = static_cast<std::size_t>(image.width) * 2;
  std::vector<std::uint8_t> raw((stride + 1) * image.height);
  for (int y = 0; y < image.height; ++y) {
    std::uint8_t* row = raw.data() + (stride + 1) * y;
    row[0] = 0;
    for (int x = 0; x < image.width; ++x) {
      const std::uint16_t v = image.at(x, y);
      row[1 + 2 * x] = static_cast<std::uint8_t>(v >> 8);  // big-endian samples
      row[2 + 2 * x] = static_cast<std::uint8_t>(v & 0xFF);
    }
  }
  return encode_common(image.width, image.height, 16, 0, raw);
}

void write_png(const std::filesystem::path& path, const ImageRgb8& image) {
  write_file(path, encode_png(image));
}

void write_png(const std::filesystem::path& path, const ImageGray16& image) {
  write_file(path, encode_png(image));
}

ImageRgb8 decode_png_rgb8(const std::vector<std::uint8_t>& bytes) {
  const DecodedPng d = decode_common(bytes);
  if (d.bit_depth != 8) throw std::runtime_error("png: expected 8-bit image");
  const int channels = channel_count(d.color_type);
  if (channels < 3) throw std::runtime_error("png: expected RGB image");
  ImageRgb8 img(d.width, d.height);
  for (int y = 0; y < d.height; ++y) {
    const std::uint8_t* src = d.scanlines.data() + static_cast<std::size_t>(y) * d.width * channels;
    for (int x = 0; x < d.width; ++x) {
      std::uint8_t* px = img.at(x, y);
      px[0] = src[x * channels];
      px[1] = src[x * channels + 1];
      px[2] = src[x * channels + 2];
    }
  }
  return img;
}

ImageGray16 decode_png_gray16(const std::vector<std::uint8_t>& bytes) {
  const DecodedPng d = decode_common(bytes);
  if (d.color_type != 0 || d.bit_depth != 16) {
    throw std::runtime_error("png: expected 16-bit grayscale image");
  }
  ImageGray16 img(d.width, d.height);
  for (int y = 0; y < d.height; ++y) {
    const std::uint8_t* src = d.scanlines.data() + static_cast<std::size_t>(y) * d.width * 2;
    for (int x = 0; x < d.width; ++x) {
      img.at(x, y) = static_cast<std::uint16_t>((src[2 * x] << 8) | src[2 * x + 1]);
    }
  }
  return img;
}

ImageRgb8 read_png_rgb8(const std::filesystem::path& path) {
  return decode_png_rgb8(read_file(path));
}

ImageGray16 read_png_gray16(const std::filesystem::path& path) {
  return decode_png_gray16(read_file(path));
}

}  // namespace synthdet
