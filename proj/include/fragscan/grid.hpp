#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace fragscan {

// Pixel class labels emitted by the semantic segmentation model.
enum : std::uint8_t { kBackground = 0, kBody = 1, kBoundary = 2 };

struct Pixel {
  int x = 0;
  int y = 0;
  bool operator==(const Pixel&) const = default;
};

/// Dense row-major 2-D grid. Indexing is unchecked; callers stay in bounds.
template <typename T>
struct Grid {
  int width = 0;
  int height = 0;
  std::vector<T> v;

  Grid() = default;
  Grid(int w, int h, T fill = T{}) {
    if (w < 1 || h < 1) throw std::invalid_argument("grid dimensions must be >= 1");
    width = w;
    height = h;
    v.assign(static_cast<std::size_t>(w) * h, fill);
  }

  std::size_t idx(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
  T& at(int x, int y) { return v[idx(x, y)]; }
  const T& at(int x, int y) const { return v[idx(x, y)]; }
  bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
  std::size_t size() const { return v.size(); }

  bool operator==(const Grid&) const = default;
};

using GrayImage = Grid<float>;         // intensities in [0, 255]
using ClassMask = Grid<std::uint8_t>;  // values in {kBackground, kBody, kBoundary}

/// True when every pixel carries one of the three class labels.
template <typename M>
bool valid_mask(const M& mask) {
  if (mask.width < 1 || mask.height < 1) return false;
  for (auto p : mask.v)
    if (p > kBoundary) return false;
  return true;
}

}  // namespace fragscan
