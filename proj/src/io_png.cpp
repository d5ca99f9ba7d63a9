#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>

#include "pelletseg/classes.hpp"
#include "pelletseg/io.hpp"

namespace pelletseg::io {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct RawPng {
  int width = 0;
  int height = 0;
  int bit_depth = 0;
  int color_type = 0;
  std::vector<std::uint8_t> bytes;  // rows packed, 16-bit samples big-endian
};

std::string color_type_name(int t) {
  switch (t) {
    case PNG_COLOR_TYPE_GRAY: return "grayscale";
    case PNG_COLOR_TYPE_GRAY_ALPHA: return "grayscale+alpha";
    case PNG_COLOR_TYPE_RGB: return "RGB";
    case PNG_COLOR_TYPE_RGB_ALPHA: return "RGBA";
    case PNG_COLOR_TYPE_PALETTE: return "palette";
    default: return "unknown";
  }
}

int channels_of(int color_type) {
  switch (color_type) {
    case PNG_COLOR_TYPE_GRAY: return 1;
    case PNG_COLOR_TYPE_GRAY_ALPHA: return 2;
    case PNG_COLOR_TYPE_RGB: return 3;
    case PNG_COLOR_TYPE_RGB_ALPHA: return 4;
    default: return 1;
  }
}

struct ReadGuard {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~ReadGuard() { png_destroy_read_struct(&png, info ? &info : nullptr, nullptr); }
};

struct WriteGuard {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~WriteGuard() { png_destroy_write_struct(&png, info ? &info : nullptr); }
};

// Reads a PNG, accepting only the expected depth and color type.
RawPng read_png(const fs::path& path, int want_depth, int want_color, const char* purpose) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw FormatError("cannot open " + path.string() + " for reading");
  std::uint8_t sig[8] = {};
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw FormatError(path.string() + " is not a PNG file");
  }
  RawPng raw;
  ReadGuard g;
  std::vector<png_bytep> rows;
  g.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!g.png) throw FormatError("libpng: cannot create read struct");
  g.info = png_create_info_struct(g.png);
  if (!g.info) throw FormatError("libpng: cannot create info struct");
  if (setjmp(png_jmpbuf(g.png))) {
    throw FormatError("libpng: failed to decode " + path.string());
  }
  png_init_io(g.png, file.get());
  png_set_sig_bytes(g.png, 8);
  png_read_info(g.png, g.info);
  raw.width = static_cast<int>(png_get_image_width(g.png, g.info));
  raw.height = static_cast<int>(png_get_image_height(g.png, g.info));
  raw.bit_depth = png_get_bit_depth(g.png, g.info);
  raw.color_type = png_get_color_type(g.png, g.info);
  if (raw.bit_depth != want_depth || raw.color_type != want_color) {
    throw FormatError(path.string() + ": " + purpose + " must be a " + std::to_string(want_depth) + "-bit " +
                      color_type_name(want_color) + " PNG, found " + std::to_string(raw.bit_depth) + "-bit " +
                      color_type_name(raw.color_type) + " (" + std::to_string(channels_of(raw.color_type)) +
                      " channel(s))");
  }
  const std::size_t stride = png_get_rowbytes(g.png, g.info);
  raw.bytes.resize(stride * raw.height);
  rows.resize(raw.height);
  for (int r = 0; r < raw.height; ++r) rows[r] = raw.bytes.data() + stride * r;
  png_read_image(g.png, rows.data());
  png_read_end(g.png, nullptr);
  return raw;
}

void write_png(const fs::path& path, int width, int height, int depth, int color, std::vector<std::uint8_t>& bytes) {
  const fs::path tmp = path.string() + ".tmp";
  {
    FilePtr file(std::fopen(tmp.c_str(), "wb"));
    if (!file) throw FormatError("cannot open " + tmp.string() + " for writing");
    WriteGuard g;
    std::vector<png_bytep> rows(height);
    g.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!g.png) throw FormatError("libpng: cannot create write struct");
    g.info = png_create_info_struct(g.png);
    if (!g.info) throw FormatError("libpng: cannot create info struct");
    if (setjmp(png_jmpbuf(g.png))) {
      throw FormatError("libpng: failed to encode " + path.string());
    }
    png_init_io(g.png, file.get());
    png_set_IHDR(g.png, g.info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), depth, color,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(g.png, g.info);
    const std::size_t stride = bytes.size() / std::max(height, 1);
    for (int r = 0; r < height; ++r) rows[r] = bytes.data() + stride * r;
    png_write_image(g.png, rows.data());
    png_write_end(g.png, nullptr);
  }
  fs::rename(tmp, path);
}

std::vector<std::uint8_t> pack16(std::span<const std::uint16_t> values) {
  std::vector<std::uint8_t> bytes(values.size() * 2);
  for (std::size_t i = 0; i < values.size(); ++i) {
    bytes[2 * i] = static_cast<std::uint8_t>(values[i] >> 8);
    bytes[2 * i + 1] = static_cast<std::uint8_t>(values[i] & 0xFF);
  }
  return bytes;
}

template <typename T>
Grid<T> unpack16(const RawPng& raw, const fs::path& path, std::uint32_t max_value, const char* what) {
  Grid<T> out(raw.height, raw.width, 1, 0);
  auto data = out.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::uint32_t v = (std::uint32_t(raw.bytes[2 * i]) << 8) | raw.bytes[2 * i + 1];
    if (v > max_value) {
      throw FormatError(path.string() + ": " + what + " value " + std::to_string(v) + " exceeds " +
                        std::to_string(max_value));
    }
    data[i] = static_cast<T>(v);
  }
  return out;
}

}  // namespace

LabelMap read_label_map(const fs::path& path) {
  const RawPng raw = read_png(path, 16, PNG_COLOR_TYPE_GRAY, "label map");
  return unpack16<Label>(raw, path, 0xFFFF, "label");
}

void write_label_map(const LabelMap& labels, const fs::path& path) {
  if (labels.channels() != 1) throw FormatError("label map must have exactly one channel");
  std::vector<std::uint16_t> values(labels.pixel_count());
  const auto data = labels.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i] > 0xFFFF) {
      throw FormatError("label id " + std::to_string(data[i]) +
                        " exceeds the 16-bit PNG limit of 65535; relabel instances sequentially (1..N) "
                        "or split the image before writing");
    }
    values[i] = static_cast<std::uint16_t>(data[i]);
  }
  auto bytes = pack16(values);
  write_png(path, labels.cols(), labels.rows(), 16, PNG_COLOR_TYPE_GRAY, bytes);
}

ClassMap read_class_map(const fs::path& path) {
  const RawPng raw = read_png(path, 16, PNG_COLOR_TYPE_GRAY, "class map");
  return unpack16<std::uint8_t>(raw, path, kNumClasses - 1, "class");
}

void write_class_map(const ClassMap& classes, const fs::path& path) {
  if (classes.channels() != 1) throw FormatError("class map must have exactly one channel");
  std::vector<std::uint16_t> values(classes.data().begin(), classes.data().end());
  auto bytes = pack16(values);
  write_png(path, classes.cols(), classes.rows(), 16, PNG_COLOR_TYPE_GRAY, bytes);
}

RgbImage read_rgb(const fs::path& path) {
  const RawPng raw = read_png(path, 8, PNG_COLOR_TYPE_RGB, "image");
  RgbImage out(raw.height, raw.width, 3, 0);
  std::ranges::copy(raw.bytes, out.data().begin());
  return out;
}

void write_rgb(const RgbImage& image, const fs::path& path) {
  if (image.channels() != 3) throw FormatError("RGB image must have three channels");
  std::vector<std::uint8_t> bytes(image.data().begin(), image.data().end());
  write_png(path, image.cols(), image.rows(), 8, PNG_COLOR_TYPE_RGB, bytes);
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open " + tmp.string() + " for writing");
    out << text;
    if (!out) throw FormatError("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace pelletseg::io
