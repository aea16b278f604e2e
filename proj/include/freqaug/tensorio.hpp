#pragma once

// On-disk formats: CIFAR-10 binary batches, NPY u8 arrays (CIFAR-10-C
// style N x H x W x C), and binary PPM for eyeballing results.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <regex>
#include <span>
#include <string>
#include <vector>

#include "freqaug/errors.hpp"
#include "freqaug/image.hpp"

namespace freqaug {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::size_t kCifarSide = 32;
inline constexpr std::size_t kCifarPixels = kCifarSide * kCifarSide * 3;
inline constexpr std::size_t kCifarRecord = kCifarPixels + 1;
inline constexpr Shape kCifarShape{kCifarSide, kCifarSide, 3};

inline Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed for " + path.string());
  return bytes;
}

inline void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

/// Pixel value to byte: round(v * 255) after clamping to [0,1].
inline std::uint8_t quantize(double v) {
  if (!(v > 0.0)) return 0;  // also maps NaN to 0
  if (v >= 1.0) return 255;
  return static_cast<std::uint8_t>(std::lround(v * 255.0));
}

inline double dequantize(std::uint8_t b) { return static_cast<double>(b) / 255.0; }

// --- CIFAR-10 binary -------------------------------------------------------

inline LabeledDataset parse_cifar_binary(std::span<const std::uint8_t> bytes,
                                         std::size_t class_count) {
  if (bytes.size() % kCifarRecord != 0) {
    throw FormatError("CIFAR binary is truncated: " + std::to_string(bytes.size()) +
                      " bytes is not a multiple of 3073; record " +
                      std::to_string(bytes.size() / kCifarRecord) + " is incomplete");
  }
  const std::size_t n = bytes.size() / kCifarRecord;
  std::vector<ImageTensor> images;
  images.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    auto rec = bytes.subspan(r * kCifarRecord, kCifarRecord);
    const int label = rec[0];
    if (static_cast<std::size_t>(label) >= class_count) {
      throw LabelError("record " + std::to_string(r) + " has label " + std::to_string(label) +
                       " >= class count " + std::to_string(class_count));
    }
    std::vector<double> px(kCifarPixels);
    std::transform(rec.begin() + 1, rec.end(), px.begin(), dequantize);
    images.emplace_back(kCifarShape, std::move(px), label);
  }
  return LabeledDataset(std::move(images), class_count);
}

inline LabeledDataset load_cifar_binary(const std::filesystem::path& path,
                                        std::size_t class_count) {
  return parse_cifar_binary(read_file(path), class_count);
}

inline Bytes encode_cifar_binary(const LabeledDataset& dataset) {
  Bytes out;
  out.reserve(dataset.size() * kCifarRecord);
  for (std::size_t p = 0; p < dataset.size(); ++p) {
    const ImageTensor& img = dataset[p];
    if (img.shape() != kCifarShape) {
      throw ShapeError("image " + std::to_string(p) + " has shape " + to_string(img.shape()) +
                       ", CIFAR binary requires 32x32x3");
    }
    if (*img.label() > 255) {
      throw LabelError("image " + std::to_string(p) + " label does not fit in a byte");
    }
    out.push_back(static_cast<std::uint8_t>(*img.label()));
    for (double v : img.data()) out.push_back(quantize(v));
  }
  return out;
}

inline void write_cifar_binary(const LabeledDataset& dataset, const std::filesystem::path& path) {
  write_file(path, encode_cifar_binary(dataset));
}

// --- NPY (u8, 4-D, C order) ------------------------------------------------

namespace detail {

inline std::uint64_t read_le(std::span<const std::uint8_t> b, std::size_t offset, int width) {
  std::uint64_t v = 0;
  for (int k = width - 1; k >= 0; --k) v = (v << 8) | b[offset + static_cast<std::size_t>(k)];
  return v;
}

}  // namespace detail

struct NpyHeader {
  std::string text;
  std::vector<std::size_t> shape;
  std::size_t data_offset = 0;
};

inline NpyHeader parse_npy_header(std::span<const std::uint8_t> bytes) {
  static constexpr std::uint8_t kMagic[] = {0x93, 'N', 'U', 'M', 'P', 'Y'};
  if (bytes.size() < 10 || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw FormatError("not an NPY file (missing \\x93NUMPY magic)");
  }
  const int major = bytes[6];
  std::size_t len_width = 0;
  if (major == 1) {
    len_width = 2;
  } else if (major == 2 || major == 3) {
    len_width = 4;
  } else {
    throw FormatError("unsupported NPY version " + std::to_string(major));
  }
  const std::size_t prefix = 8 + len_width;
  if (bytes.size() < prefix) throw FormatError("NPY header truncated");
  const std::size_t header_len = detail::read_le(bytes, 8, static_cast<int>(len_width));
  if (bytes.size() < prefix + header_len) throw FormatError("NPY header truncated");

  NpyHeader h;
  h.text.assign(bytes.begin() + static_cast<std::ptrdiff_t>(prefix),
                bytes.begin() + static_cast<std::ptrdiff_t>(prefix + header_len));
  h.data_offset = prefix + header_len;
  while (!h.text.empty() && (h.text.back() == '\n' || h.text.back() == ' ')) h.text.pop_back();

  const auto fail = [&](const std::string& why) {
    return FormatError("unsupported NPY array (" + why + "): " + h.text);
  };
  std::smatch m;
  static const std::regex descr_re(R"('descr'\s*:\s*'([^']*)')");
  static const std::regex order_re(R"('fortran_order'\s*:\s*(True|False))");
  static const std::regex shape_re(R"('shape'\s*:\s*\(([^)]*)\))");
  if (!std::regex_search(h.text, m, descr_re)) throw fail("no descr");
  const std::string descr = m[1];
  if (descr != "|u1" && descr != "<u1" && descr != ">u1" && descr != "u1" && descr != "=u1") {
    throw fail("dtype " + descr + " is not unsigned 8-bit");
  }
  if (!std::regex_search(h.text, m, order_re)) throw fail("no fortran_order");
  if (m[1] == "True") throw fail("fortran order");
  if (!std::regex_search(h.text, m, shape_re)) throw fail("no shape");
  const std::string dims = m[1];
  static const std::regex num_re(R"(\d+)");
  for (auto it = std::sregex_iterator(dims.begin(), dims.end(), num_re);
       it != std::sregex_iterator(); ++it) {
    h.shape.push_back(std::stoull(it->str()));
  }
  if (h.shape.size() != 4) throw fail("expected 4-D shape N,H,W,C");
  if (h.shape[3] != 1 && h.shape[3] != 3) throw fail("channel count must be 1 or 3");
  return h;
}

/// Decodes an N x H x W x C u8 array into N unlabeled channel-planar images.
inline std::vector<ImageTensor> parse_npy_u8(std::span<const std::uint8_t> bytes) {
  const NpyHeader h = parse_npy_header(bytes);
  const std::size_t n = h.shape[0];
  const Shape shape{h.shape[1], h.shape[2], h.shape[3]};
  const std::size_t need = n * shape.size();
  if (bytes.size() - h.data_offset < need) {
    throw FormatError("NPY payload has " + std::to_string(bytes.size() - h.data_offset) +
                      " bytes, header requires " + std::to_string(need) + ": " + h.text);
  }
  std::vector<ImageTensor> images;
  images.reserve(n);
  const std::uint8_t* base = bytes.data() + h.data_offset;
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint8_t* src = base + k * shape.size();
    std::vector<double> px(shape.size());
    for (std::size_t i = 0; i < shape.height; ++i)
      for (std::size_t j = 0; j < shape.width; ++j)
        for (std::size_t c = 0; c < shape.channels; ++c)
          px[(c * shape.height + i) * shape.width + j] =
              dequantize(src[(i * shape.width + j) * shape.channels + c]);
    images.emplace_back(shape, std::move(px));
  }
  return images;
}

inline std::vector<ImageTensor> load_npy_u8(const std::filesystem::path& path) {
  return parse_npy_u8(read_file(path));
}

/// Encodes same-shape images as an NPY v1.0 u8 array (N, H, W, C).
inline Bytes encode_npy_u8(std::span<const ImageTensor> images) {
  Shape shape = images.empty() ? Shape{0, 0, 3} : images.front().shape();
  std::string dict = "{'descr': '|u1', 'fortran_order': False, 'shape': (" +
                     std::to_string(images.size()) + ", " + std::to_string(shape.height) +
                     ", " + std::to_string(shape.width) + ", " +
                     std::to_string(shape.channels) + "), }";
  // Pad so magic + len + dict + '\n' is a multiple of 64.
  const std::size_t unpadded = 10 + dict.size() + 1;
  dict.append((64 - unpadded % 64) % 64, ' ');
  dict.push_back('\n');

  Bytes out = {0x93, 'N', 'U', 'M', 'P', 'Y', 1, 0,
               static_cast<std::uint8_t>(dict.size() & 0xFF),
               static_cast<std::uint8_t>(dict.size() >> 8)};
  out.insert(out.end(), dict.begin(), dict.end());
  for (std::size_t k = 0; k < images.size(); ++k) {
    const ImageTensor& img = images[k];
    if (img.shape() != shape) {
      throw ShapeError("image " + std::to_string(k) + " has shape " + to_string(img.shape()) +
                       ", expected " + to_string(shape));
    }
    for (std::size_t i = 0; i < shape.height; ++i)
      for (std::size_t j = 0; j < shape.width; ++j)
        for (std::size_t c = 0; c < shape.channels; ++c) out.push_back(quantize(img.at(c, i, j)));
  }
  return out;
}

inline void write_npy_u8(std::span<const ImageTensor> images, const std::filesystem::path& path) {
  write_file(path, encode_npy_u8(images));
}

// --- PPM -------------------------------------------------------------------

inline Bytes write_ppm(const ImageTensor& image) {
  if (image.channels() != 3) {
    throw FormatError("PPM export needs 3 channels, image has " +
                      std::to_string(image.channels()));
  }
  const std::string header = "P6\n" + std::to_string(image.width()) + " " +
                             std::to_string(image.height()) + "\n255\n";
  Bytes out(header.begin(), header.end());
  out.reserve(header.size() + image.size());
  for (std::size_t i = 0; i < image.height(); ++i)
    for (std::size_t j = 0; j < image.width(); ++j)
      for (std::size_t c = 0; c < 3; ++c) out.push_back(quantize(image.at(c, i, j)));
  return out;
}

}  // namespace freqaug
