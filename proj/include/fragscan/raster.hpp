#pragma once

#include <utility>
#include <vector>

#include "fragscan/grid.hpp"

namespace fragscan {

struct Calibration {
  double cm_per_pixel = 1.0;  // strictly positive and finite
};

/// Sliding-window tiling of an image that is reflect-padded on the right and
/// bottom so (padded_dim - window) is a nonnegative multiple of stride.
struct TileLayout {
  int window = 512;
  int stride = 256;
  int source_width = 0;
  int source_height = 0;
  int padded_width = 0;
  int padded_height = 0;
  std::vector<Pixel> origins;  // row-major top-left corners

  int cols() const { return (padded_width - window) / stride + 1; }
  int rows() const { return (padded_height - window) / stride + 1; }
};

/// Symmetric reflection of index i into [0, n): ... 1 0 | 0 1 ... n-1 | n-1 n-2 ...
inline int reflect_index(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

/// Bilinear rescale with half-pixel-center sampling and edge clamping.
GrayImage rescale_bilinear(const GrayImage& img, int new_width, int new_height);

TileLayout plan_tiles(int width, int height, int window = 512, int stride = 256);

/// Crop one window x window tile at a layout origin; the out-of-image part on
/// the right/bottom reads through the symmetric reflection.
template <typename T>
Grid<T> extract_tile(const Grid<T>& src, Pixel origin, const TileLayout& layout) {
  if (src.width != layout.source_width || src.height != layout.source_height)
    throw std::invalid_argument("extract_tile: source does not match layout");
  const int s = layout.stride, w = layout.window;
  if (origin.x < 0 || origin.y < 0 || origin.x % s != 0 || origin.y % s != 0 ||
      origin.x / s >= layout.cols() || origin.y / s >= layout.rows())
    throw std::invalid_argument("extract_tile: origin is not part of the layout");
  Grid<T> tile(w, w);
  for (int y = 0; y < w; ++y) {
    const int sy = reflect_index(origin.y + y, src.height);
    for (int x = 0; x < w; ++x) tile.at(x, y) = src.at(reflect_index(origin.x + x, src.width), sy);
  }
  return tile;
}

/// Fuse per-tile predictions into one mask: each output pixel takes the label
/// of the tile whose center is nearest (Euclidean); ties go to the lowest
/// row-major tile index. Padding beyond out_width/out_height is discarded.
ClassMask stitch(const std::vector<std::pair<Pixel, ClassMask>>& tiles, const TileLayout& layout,
                 int out_width, int out_height);

/// Morphological opening of Body+Boundary treated as one foreground set with a
/// (2*se_half+1)^2 square element; survivors keep their original class,
/// removed pixels become Background.
ClassMask morphological_open(const ClassMask& mask, int se_half = 4);

}  // namespace fragscan
