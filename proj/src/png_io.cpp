#include "fragscan/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

namespace fragscan {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// Decoded 8- or 16-bit grayscale rows. All libpng calls live behind this
// function so no C++ object with a destructor is in scope across setjmp.
struct RawPng {
  int width = 0, height = 0, bit_depth = 0;
  std::vector<std::uint8_t> bytes;  // row-major, big-endian for 16-bit
};

RawPng read_raw(const std::string& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw IoError("cannot open " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng init failed");
  }

  RawPng out;
  std::vector<png_bytep> row_ptrs;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("failed to decode " + path);
  }

  png_init_io(png, file.get());
  png_read_info(png, info);

  const png_byte color_type = png_get_color_type(png, info);
  out.bit_depth = png_get_bit_depth(png, info);
  if (color_type != PNG_COLOR_TYPE_GRAY || (out.bit_depth != 8 && out.bit_depth != 16)) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(path + ": expected single-channel 8- or 16-bit grayscale PNG");
  }

  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  const std::size_t row_bytes = static_cast<std::size_t>(out.width) * (out.bit_depth / 8);
  out.bytes.resize(row_bytes * out.height);
  row_ptrs.resize(out.height);
  for (int y = 0; y < out.height; ++y) row_ptrs[y] = out.bytes.data() + row_bytes * y;

  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

void write_raw(const std::string& path, int width, int height, int bit_depth,
               const std::vector<std::uint8_t>& bytes) {
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw IoError("cannot create " + path);

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng init failed");
  }

  std::vector<png_bytep> row_ptrs(height);
  const std::size_t row_bytes = static_cast<std::size_t>(width) * (bit_depth / 8);
  for (int y = 0; y < height; ++y)
    row_ptrs[y] = const_cast<png_bytep>(bytes.data() + row_bytes * y);

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed to encode " + path);
  }

  png_init_io(png, file.get());
  png_set_IHDR(png, info, width, height, bit_depth, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, row_ptrs.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

RawPng read_raw8(const std::string& path) {
  RawPng raw = read_raw(path);
  if (raw.bit_depth != 8) throw IoError(path + ": expected 8-bit grayscale PNG");
  return raw;
}

}  // namespace

GrayImage read_gray_png(const std::string& path) {
  const RawPng raw = read_raw8(path);
  GrayImage img(raw.width, raw.height);
  for (std::size_t i = 0; i < raw.bytes.size(); ++i) img.v[i] = raw.bytes[i];
  return img;
}

void write_gray_png(const std::string& path, const GrayImage& img) {
  std::vector<std::uint8_t> bytes(img.v.size());
  for (std::size_t i = 0; i < img.v.size(); ++i) {
    const float q = std::round(std::clamp(img.v[i], 0.0f, 255.0f));
    bytes[i] = static_cast<std::uint8_t>(q);
  }
  write_raw(path, img.width, img.height, 8, bytes);
}

ClassMask read_mask_png(const std::string& path) {
  const RawPng raw = read_raw8(path);
  ClassMask mask(raw.width, raw.height);
  for (std::size_t i = 0; i < raw.bytes.size(); ++i) {
    if (raw.bytes[i] > kBoundary)
      throw IoError(path + ": invalid class label " + std::to_string(raw.bytes[i]));
    mask.v[i] = raw.bytes[i];
  }
  return mask;
}

void write_mask_png(const std::string& path, const ClassMask& mask) {
  if (!valid_mask(mask)) throw IoError("write_mask_png: mask holds an invalid class label");
  write_raw(path, mask.width, mask.height, 8, mask.v);
}

InstanceMap read_instance_png(const std::string& path) {
  const RawPng raw = read_raw(path);
  if (raw.bit_depth != 16) throw IoError(path + ": expected 16-bit grayscale PNG");
  InstanceMap im;
  im.ids = Grid<std::uint32_t>(raw.width, raw.height, 0);
  std::uint32_t max_id = 0;
  for (std::size_t i = 0; i < im.ids.v.size(); ++i) {
    const std::uint32_t id = (static_cast<std::uint32_t>(raw.bytes[2 * i]) << 8) | raw.bytes[2 * i + 1];
    im.ids.v[i] = id;
    max_id = std::max(max_id, id);
  }
  im.instance_count = static_cast<int>(max_id);
  return im;
}

void write_instance_png(const std::string& path, const InstanceMap& instances) {
  std::vector<std::uint8_t> bytes(instances.ids.v.size() * 2);
  for (std::size_t i = 0; i < instances.ids.v.size(); ++i) {
    const std::uint32_t id = instances.ids.v[i];
    if (id > 0xffff) throw IoError("write_instance_png: instance id exceeds 16-bit range");
    bytes[2 * i] = static_cast<std::uint8_t>(id >> 8);
    bytes[2 * i + 1] = static_cast<std::uint8_t>(id & 0xff);
  }
  write_raw(path, instances.ids.width, instances.ids.height, 16, bytes);
}

}  // namespace fragscan
