#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fragscan/grid.hpp"

namespace fragscan {

struct Fragment;

/// Connected components of Body pixels, ids 1..n in raster-scan discovery
/// order. Component pixels are stored as row-major flat indices.
struct SeedSet {
  std::vector<std::vector<int>> components;
  int connectivity = 4;
};

/// Per-pixel fragment ids; 0 is background.
struct InstanceMap {
  Grid<std::uint32_t> ids;
  int instance_count = 0;
};

struct ExpansionConfig {
  int max_radius = 10;       // geodesic step limit, measured from seed pixels
  int step_connectivity = 8; // {4, 8}
  int seed_connectivity = 4; // {4, 8}
};

SeedSet extract_seeds(const ClassMask& mask, int seed_connectivity = 4);

/// Simultaneous breadth-first growth of all seeds into Boundary pixels.
/// Fronts never enter Background; a pixel reached by several fronts at the
/// same step distance goes to the lowest seed id. Boundary pixels farther
/// than max_radius from every seed stay background.
InstanceMap expand_regions(const ClassMask& mask, const SeedSet& seeds,
                           const ExpansionConfig& cfg = {});

/// Drop fragments whose equivalent-ellipse diameter is min_diameter_px or
/// less (in pixels), zero them in the map and renumber the survivors.
std::pair<InstanceMap, std::vector<Fragment>> filter_fine(const InstanceMap& instances,
                                                          const std::vector<Fragment>& fragments,
                                                          double min_diameter_px = 10.0);

}  // namespace fragscan
