#pragma once

// Shared test utilities: a deterministic RNG and independent reference
// implementations (oracles) the suites compare the library against. These
// deliberately use the most direct algorithm available, not the library's.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "fragscan/fusion.hpp"
#include "fragscan/grid.hpp"
#include "fragscan/raster.hpp"

namespace testutil {

struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(next() >> 11) * 0x1.0p-53);
  }
};

inline fragscan::ClassMask random_mask(Rng& rng, int w, int h, int bg_pct = 40, int body_pct = 35) {
  fragscan::ClassMask mask(w, h);
  for (auto& p : mask.v) {
    const int roll = rng.below(100);
    p = roll < bg_pct ? fragscan::kBackground : roll < bg_pct + body_pct ? fragscan::kBody
                                                                         : fragscan::kBoundary;
  }
  return mask;
}

// Reflection by explicit mirroring until the index lands in range.
inline int reflect_oracle(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -1 - i;
    if (i >= n) i = 2 * n - 1 - i;
  }
  return i;
}

// Nearest-tile-center label by scanning every tile; ties keep the first
// (lowest row-major index) tile.
inline std::uint8_t stitch_oracle_pixel(
    const std::vector<std::pair<fragscan::Pixel, fragscan::ClassMask>>& tiles,
    const fragscan::TileLayout& layout, int x, int y) {
  long best = -1;
  std::uint8_t label = 0;
  for (std::size_t k = 0; k < layout.origins.size(); ++k) {
    const auto o = layout.origins[k];
    // Match by origin; the provided list may be permuted.
    const fragscan::ClassMask* tile = nullptr;
    for (const auto& [to, tm] : tiles)
      if (to == o) {
        tile = &tm;
        break;
      }
    const double cx = o.x + layout.window / 2.0, cy = o.y + layout.window / 2.0;
    const double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
    const long d2 = std::lround(4.0 * (dx * dx + dy * dy));  // integral in quarter units
    if (best < 0 || d2 < best) {
      best = d2;
      label = tile->at(x - o.x, y - o.y);
    }
  }
  return label;
}

// Plain double-loop erosion/dilation with a square element.
inline fragscan::ClassMask open_oracle(const fragscan::ClassMask& mask, int h) {
  using namespace fragscan;
  const int w = mask.width, ht = mask.height;
  auto fg = [&](int x, int y) { return mask.in_bounds(x, y) && mask.at(x, y) != kBackground; };
  Grid<std::uint8_t> eroded(w, ht, 0);
  for (int y = 0; y < ht; ++y)
    for (int x = 0; x < w; ++x) {
      bool all = true;
      for (int dy = -h; dy <= h && all; ++dy)
        for (int dx = -h; dx <= h; ++dx)
          if (!fg(x + dx, y + dy)) {
            all = false;
            break;
          }
      eroded.at(x, y) = all;
    }
  ClassMask out(w, ht, kBackground);
  for (int y = 0; y < ht; ++y)
    for (int x = 0; x < w; ++x) {
      bool any = false;
      for (int dy = -h; dy <= h && !any; ++dy)
        for (int dx = -h; dx <= h; ++dx) {
          const int sx = x + dx, sy = y + dy;
          if (eroded.in_bounds(sx, sy) && eroded.at(sx, sy)) {
            any = true;
            break;
          }
        }
      if (any) out.at(x, y) = mask.at(x, y);
    }
  return out;
}

// Independent Body component labeling: repeated single-seed flood fills in
// raster order.
inline std::vector<std::vector<int>> label_oracle(const fragscan::ClassMask& mask, int conn) {
  using namespace fragscan;
  std::vector<std::vector<int>> comps;
  std::vector<int> owner(mask.size(), 0);
  const int dx8[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
  const int dy8[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
  const int dx4[4] = {0, -1, 1, 0};
  const int dy4[4] = {-1, 0, 0, 1};
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x) {
      const int i = static_cast<int>(mask.idx(x, y));
      if (mask.v[i] != kBody || owner[i]) continue;
      std::vector<int> comp, todo{i};
      owner[i] = static_cast<int>(comps.size()) + 1;
      while (!todo.empty()) {
        const int cur = todo.back();
        todo.pop_back();
        comp.push_back(cur);
        const int cx = cur % mask.width, cy = cur / mask.width;
        for (int s = 0; s < conn; ++s) {
          const int nx = cx + (conn == 8 ? dx8[s] : dx4[s]);
          const int ny = cy + (conn == 8 ? dy8[s] : dy4[s]);
          if (!mask.in_bounds(nx, ny)) continue;
          const int ni = static_cast<int>(mask.idx(nx, ny));
          if (mask.v[ni] == kBody && !owner[ni]) {
            owner[ni] = owner[i];
            todo.push_back(ni);
          }
        }
      }
      std::sort(comp.begin(), comp.end());
      comps.push_back(std::move(comp));
    }
  return comps;
}

// Per-seed geodesic BFS within Body+Boundary; each Boundary pixel goes to the
// seed with the smallest distance <= max_radius, ties to the lowest id.
inline fragscan::Grid<std::uint32_t> expand_oracle(const fragscan::ClassMask& mask,
                                                   const fragscan::SeedSet& seeds, int max_radius,
                                                   int step_conn) {
  using namespace fragscan;
  Grid<std::uint32_t> result(mask.width, mask.height, 0);
  std::vector<int> best_dist(mask.size(), -1);
  const int dx8[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
  const int dy8[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
  const int dx4[4] = {0, -1, 1, 0};
  const int dy4[4] = {-1, 0, 0, 1};

  for (std::size_t k = 0; k < seeds.components.size(); ++k) {
    const auto id = static_cast<std::uint32_t>(k + 1);
    std::vector<int> dist(mask.size(), -1);
    std::vector<int> frontier = seeds.components[k];
    for (int p : frontier) dist[p] = 0;
    for (int d = 0; d < max_radius && !frontier.empty(); ++d) {
      std::vector<int> next;
      for (int cur : frontier) {
        const int cx = cur % mask.width, cy = cur / mask.width;
        for (int s = 0; s < step_conn; ++s) {
          const int nx = cx + (step_conn == 8 ? dx8[s] : dx4[s]);
          const int ny = cy + (step_conn == 8 ? dy8[s] : dy4[s]);
          if (!mask.in_bounds(nx, ny)) continue;
          const int ni = static_cast<int>(mask.idx(nx, ny));
          if (mask.v[ni] == kBackground || dist[ni] != -1) continue;
          dist[ni] = d + 1;
          next.push_back(ni);
        }
      }
      frontier.swap(next);
    }
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (dist[i] < 0) continue;
      if (mask.v[i] == kBody) continue;  // bodies keep their own seed below
      if (best_dist[i] < 0 || dist[i] < best_dist[i]) {
        best_dist[i] = dist[i];
        result.v[i] = id;
      }  // equal distance: earlier (lower) id already stored wins
    }
    for (int p : seeds.components[k]) result.v[p] = id;
  }
  return result;
}

}  // namespace testutil
