#include "fragscan/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace fragscan {

GrayImage rescale_bilinear(const GrayImage& img, int new_width, int new_height) {
  if (img.width < 1 || img.height < 1) throw std::invalid_argument("rescale_bilinear: empty image");
  if (new_width < 1 || new_height < 1)
    throw std::invalid_argument("rescale_bilinear: output dimensions must be >= 1");

  GrayImage out(new_width, new_height);
  const double sx = static_cast<double>(img.width) / new_width;
  const double sy = static_cast<double>(img.height) / new_height;
  auto clampi = [](int i, int n) { return std::clamp(i, 0, n - 1); };

  for (int oy = 0; oy < new_height; ++oy) {
    const double fy = (oy + 0.5) * sy - 0.5;
    const int y0 = static_cast<int>(std::floor(fy));
    const double ty = fy - y0;
    const int ya = clampi(y0, img.height), yb = clampi(y0 + 1, img.height);
    for (int ox = 0; ox < new_width; ++ox) {
      const double fx = (ox + 0.5) * sx - 0.5;
      const int x0 = static_cast<int>(std::floor(fx));
      const double tx = fx - x0;
      const int xa = clampi(x0, img.width), xb = clampi(x0 + 1, img.width);
      const double top = img.at(xa, ya) * (1.0 - tx) + img.at(xb, ya) * tx;
      const double bot = img.at(xa, yb) * (1.0 - tx) + img.at(xb, yb) * tx;
      out.at(ox, oy) = static_cast<float>(top * (1.0 - ty) + bot * ty);
    }
  }
  return out;
}

TileLayout plan_tiles(int width, int height, int window, int stride) {
  if (width < 1 || height < 1) throw std::invalid_argument("plan_tiles: image dimensions must be >= 1");
  if (stride < 1) throw std::invalid_argument("plan_tiles: stride must be >= 1");
  if (stride > window) throw std::invalid_argument("plan_tiles: stride must not exceed window");

  auto pad_to = [&](int dim) {
    if (dim <= window) return window;
    const int over = dim - window;
    const int steps = (over + stride - 1) / stride;
    return window + steps * stride;
  };

  TileLayout layout;
  layout.window = window;
  layout.stride = stride;
  layout.source_width = width;
  layout.source_height = height;
  layout.padded_width = pad_to(width);
  layout.padded_height = pad_to(height);
  for (int oy = 0; oy + window <= layout.padded_height; oy += stride)
    for (int ox = 0; ox + window <= layout.padded_width; ox += stride)
      layout.origins.push_back({ox, oy});
  return layout;
}

namespace {

// Index of the tile with the nearest center along one axis, per pixel.
// Distances are compared in doubled coordinates so ties are exact; the scan
// order keeps the lowest tile index on a tie.
std::vector<int> nearest_tile_axis(int out_dim, int window, int stride, int count) {
  std::vector<int> best(out_dim, 0);
  for (int p = 0; p < out_dim; ++p) {
    long best_d = std::numeric_limits<long>::max();
    for (int k = 0; k < count; ++k) {
      const long d = std::labs(2L * p + 1 - (2L * k * stride + window));
      if (d < best_d) {
        best_d = d;
        best[p] = k;
      }
    }
  }
  return best;
}

}  // namespace

ClassMask stitch(const std::vector<std::pair<Pixel, ClassMask>>& tiles, const TileLayout& layout,
                 int out_width, int out_height) {
  if (out_width < 1 || out_height < 1 || out_width > layout.padded_width ||
      out_height > layout.padded_height)
    throw std::invalid_argument("stitch: output size incompatible with layout");

  const int ncols = layout.cols(), nrows = layout.rows();
  std::vector<const ClassMask*> slot(layout.origins.size(), nullptr);
  for (const auto& [origin, mask] : tiles) {
    if (origin.x < 0 || origin.y < 0 || origin.x % layout.stride != 0 ||
        origin.y % layout.stride != 0 || origin.x / layout.stride >= ncols ||
        origin.y / layout.stride >= nrows)
      throw std::invalid_argument("stitch: tile origin is not part of the layout");
    if (mask.width != layout.window || mask.height != layout.window)
      throw std::invalid_argument("stitch: tile size does not match layout window");
    slot[static_cast<std::size_t>(origin.y / layout.stride) * ncols + origin.x / layout.stride] =
        &mask;
  }
  for (std::size_t i = 0; i < slot.size(); ++i)
    if (!slot[i])
      throw std::invalid_argument("stitch: missing tile at origin (" +
                                  std::to_string(layout.origins[i].x) + ", " +
                                  std::to_string(layout.origins[i].y) + ")");

  const auto col_of = nearest_tile_axis(out_width, layout.window, layout.stride, ncols);
  const auto row_of = nearest_tile_axis(out_height, layout.window, layout.stride, nrows);

  ClassMask out(out_width, out_height);
  for (int y = 0; y < out_height; ++y) {
    const int r = row_of[y];
    const int ty = y - r * layout.stride;
    for (int x = 0; x < out_width; ++x) {
      const int c = col_of[x];
      out.at(x, y) = slot[static_cast<std::size_t>(r) * ncols + c]->at(x - c * layout.stride, ty);
    }
  }
  return out;
}

namespace {

// Separable window count: out(x,y) = number of set pixels in the clipped
// (2h+1)^2 square around (x,y).
Grid<int> window_counts(const Grid<std::uint8_t>& bin, int h) {
  const int w = bin.width, ht = bin.height;
  Grid<int> rowsum(w, ht);
  for (int y = 0; y < ht; ++y) {
    int acc = 0;
    for (int x = 0; x < std::min(h, w - 1) + 1; ++x) acc += bin.at(x, y);
    for (int x = 0; x < w; ++x) {
      rowsum.at(x, y) = acc;
      const int add = x + h + 1, sub = x - h;
      if (add < w) acc += bin.at(add, y);
      if (sub >= 0) acc -= bin.at(sub, y);
    }
  }
  Grid<int> out(w, ht);
  for (int x = 0; x < w; ++x) {
    int acc = 0;
    for (int y = 0; y < std::min(h, ht - 1) + 1; ++y) acc += rowsum.at(x, y);
    for (int y = 0; y < ht; ++y) {
      out.at(x, y) = acc;
      const int add = y + h + 1, sub = y - h;
      if (add < ht) acc += rowsum.at(x, add);
      if (sub >= 0) acc -= rowsum.at(x, sub);
    }
  }
  return out;
}

}  // namespace

ClassMask morphological_open(const ClassMask& mask, int se_half) {
  if (se_half < 0) throw std::invalid_argument("morphological_open: se_half must be >= 0");
  if (se_half == 0) return mask;

  const int full = (2 * se_half + 1) * (2 * se_half + 1);
  Grid<std::uint8_t> fg(mask.width, mask.height);
  for (std::size_t i = 0; i < mask.v.size(); ++i) fg.v[i] = mask.v[i] != kBackground;

  // Erosion: the whole square must be foreground; pixels outside the image
  // count as background, so clipped windows can never reach the full count.
  const auto cnt = window_counts(fg, se_half);
  Grid<std::uint8_t> eroded(mask.width, mask.height);
  for (std::size_t i = 0; i < cnt.v.size(); ++i) eroded.v[i] = cnt.v[i] == full;

  const auto dil = window_counts(eroded, se_half);
  ClassMask out(mask.width, mask.height);
  for (std::size_t i = 0; i < out.v.size(); ++i)
    out.v[i] = dil.v[i] > 0 ? mask.v[i] : std::uint8_t{kBackground};
  return out;
}

}  // namespace fragscan
