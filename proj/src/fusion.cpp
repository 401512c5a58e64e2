#include "fragscan/fusion.hpp"

#include <array>
#include <stdexcept>

#include "fragscan/shape.hpp"

namespace fragscan {

namespace {

constexpr std::array<Pixel, 8> kSteps8 = {
    Pixel{-1, -1}, Pixel{0, -1}, Pixel{1, -1}, Pixel{-1, 0},
    Pixel{1, 0},   Pixel{-1, 1}, Pixel{0, 1},  Pixel{1, 1}};
constexpr std::array<Pixel, 4> kSteps4 = {Pixel{0, -1}, Pixel{-1, 0}, Pixel{1, 0}, Pixel{0, 1}};

void check_connectivity(int c) {
  if (c != 4 && c != 8) throw std::invalid_argument("connectivity must be 4 or 8");
}

}  // namespace

SeedSet extract_seeds(const ClassMask& mask, int seed_connectivity) {
  check_connectivity(seed_connectivity);
  SeedSet seeds;
  seeds.connectivity = seed_connectivity;

  std::vector<std::uint8_t> seen(mask.size(), 0);
  std::vector<int> stack;
  const Pixel* steps = seed_connectivity == 8 ? kSteps8.data() : kSteps4.data();
  const int nsteps = seed_connectivity;

  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      const int start = static_cast<int>(mask.idx(x, y));
      if (mask.v[start] != kBody || seen[start]) continue;
      std::vector<int> comp;
      stack.assign(1, start);
      seen[start] = 1;
      while (!stack.empty()) {
        const int cur = stack.back();
        stack.pop_back();
        comp.push_back(cur);
        const int cx = cur % mask.width, cy = cur / mask.width;
        for (int s = 0; s < nsteps; ++s) {
          const int nx = cx + steps[s].x, ny = cy + steps[s].y;
          if (!mask.in_bounds(nx, ny)) continue;
          const int ni = static_cast<int>(mask.idx(nx, ny));
          if (mask.v[ni] == kBody && !seen[ni]) {
            seen[ni] = 1;
            stack.push_back(ni);
          }
        }
      }
      seeds.components.push_back(std::move(comp));
    }
  }
  return seeds;
}

InstanceMap expand_regions(const ClassMask& mask, const SeedSet& seeds, const ExpansionConfig& cfg) {
  check_connectivity(cfg.step_connectivity);
  if (cfg.max_radius < 0) throw std::invalid_argument("expand_regions: max_radius must be >= 0");

  InstanceMap im;
  im.ids = Grid<std::uint32_t>(mask.width, mask.height, 0);
  im.instance_count = static_cast<int>(seeds.components.size());

  std::vector<int> dist(mask.size(), -1);
  std::vector<int> frontier, next;
  for (std::size_t k = 0; k < seeds.components.size(); ++k) {
    const auto id = static_cast<std::uint32_t>(k + 1);
    for (int p : seeds.components[k]) {
      if (p < 0 || p >= static_cast<int>(mask.size()) || mask.v[p] != kBody)
        throw std::invalid_argument("expand_regions: seed pixel is not Body in this mask");
      im.ids.v[p] = id;
      dist[p] = 0;
      frontier.push_back(p);
    }
  }

  const Pixel* steps = cfg.step_connectivity == 8 ? kSteps8.data() : kSteps4.data();
  const int nsteps = cfg.step_connectivity;

  // Level-synchronized BFS; within a level the lowest owner id wins, which
  // makes the result identical to per-seed geodesic distances with the
  // lowest-id tie rule.
  for (int d = 0; d < cfg.max_radius && !frontier.empty(); ++d) {
    next.clear();
    for (int cur : frontier) {
      const int cx = cur % mask.width, cy = cur / mask.width;
      const std::uint32_t owner = im.ids.v[cur];
      for (int s = 0; s < nsteps; ++s) {
        const int nx = cx + steps[s].x, ny = cy + steps[s].y;
        if (!mask.in_bounds(nx, ny)) continue;
        const int ni = static_cast<int>(mask.idx(nx, ny));
        if (mask.v[ni] != kBoundary) continue;
        if (dist[ni] == -1) {
          dist[ni] = d + 1;
          im.ids.v[ni] = owner;
          next.push_back(ni);
        } else if (dist[ni] == d + 1 && owner < im.ids.v[ni]) {
          im.ids.v[ni] = owner;
        }
      }
    }
    frontier.swap(next);
  }
  return im;
}

std::pair<InstanceMap, std::vector<Fragment>> filter_fine(const InstanceMap& instances,
                                                          const std::vector<Fragment>& fragments,
                                                          double min_diameter_px) {
  if (min_diameter_px < 0) throw std::invalid_argument("filter_fine: negative threshold");

  std::vector<std::uint32_t> renumber(instances.instance_count + 1, 0);
  std::vector<Fragment> kept;
  for (const auto& f : fragments) {
    if (pixel_diameter(f) <= min_diameter_px) continue;
    Fragment g = f;
    g.id = static_cast<int>(kept.size()) + 1;
    if (f.id >= 1 && f.id <= instances.instance_count)
      renumber[f.id] = static_cast<std::uint32_t>(g.id);
    kept.push_back(g);
  }

  InstanceMap out;
  out.ids = Grid<std::uint32_t>(instances.ids.width, instances.ids.height, 0);
  out.instance_count = static_cast<int>(kept.size());
  for (std::size_t i = 0; i < instances.ids.v.size(); ++i) {
    const auto id = instances.ids.v[i];
    out.ids.v[i] = id <= static_cast<std::uint32_t>(instances.instance_count) ? renumber[id] : 0;
  }
  return {std::move(out), std::move(kept)};
}

}  // namespace fragscan
