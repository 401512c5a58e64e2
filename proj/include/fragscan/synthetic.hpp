#pragma once

#include <cstdint>
#include <vector>

#include "fragscan/shape.hpp"

namespace fragscan {

/// One synthetic particle: the ellipse (a_px, b_px) is drawn as Body and a
/// band of band_px around it as Boundary, so the full particle has semi-axes
/// (a_px + band_px, b_px + band_px).
struct EllipseSpec {
  double cx = 0.0, cy = 0.0;  // px
  double a_px = 0.0;          // semi-major of the Body ellipse
  double b_px = 0.0;
  double orientation = 0.0;   // radians
  int band_px = 2;            // >= 1
};

struct SyntheticSceneSpec {
  int width = 0, height = 0;
  std::vector<EllipseSpec> ellipses;
  std::uint64_t seed = 0;  // provenance of randomly placed scenes
};

struct SyntheticScene {
  ClassMask mask;
  // Analytic ground truth per ellipse, in pixel units (a, b are the full
  // particle semi-axes including the band; d and volume follow from them).
  std::vector<Fragment> truth;
};

/// Rasterizes the scene; later ellipses overwrite earlier ones. Every
/// particle (including its band) must lie inside the canvas.
SyntheticScene generate_synthetic_scene(const SyntheticSceneSpec& spec);

/// Randomly places `count` non-touching ellipses (disjoint circumscribed
/// circles, band included) with a in [a_min, a_max] and b in
/// [b_ratio_min * a, a]. Deterministic in `seed`.
SyntheticSceneSpec random_scene_spec(int width, int height, int count, double a_min, double a_max,
                                     int band_px, std::uint64_t seed, double b_ratio_min = 0.6);

}  // namespace fragscan
