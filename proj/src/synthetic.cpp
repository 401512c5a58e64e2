#include "fragscan/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fragscan {

namespace {

constexpr double kPi = std::numbers::pi;

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
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(next() >> 11) * 0x1.0p-53);
  }
};

// Squared normalized radius of pixel center (x, y) in the ellipse frame.
double norm_radius_sq(const EllipseSpec& e, double semi_a, double semi_b, int x, int y) {
  const double dx = x - e.cx, dy = y - e.cy;
  const double c = std::cos(e.orientation), s = std::sin(e.orientation);
  const double u = (dx * c + dy * s) / semi_a;
  const double v = (-dx * s + dy * c) / semi_b;
  return u * u + v * v;
}

// Axis-aligned half extents of the rotated ellipse with the band included.
void half_extents(const EllipseSpec& e, double* hx, double* hy) {
  const double A = e.a_px + e.band_px, B = e.b_px + e.band_px;
  const double c = std::cos(e.orientation), s = std::sin(e.orientation);
  *hx = std::sqrt(A * A * c * c + B * B * s * s);
  *hy = std::sqrt(A * A * s * s + B * B * c * c);
}

}  // namespace

SyntheticScene generate_synthetic_scene(const SyntheticSceneSpec& spec) {
  if (spec.width < 1 || spec.height < 1)
    throw std::invalid_argument("generate_synthetic_scene: canvas must be >= 1x1");

  SyntheticScene scene;
  scene.mask = ClassMask(spec.width, spec.height, kBackground);

  int next_id = 0;
  for (const auto& e : spec.ellipses) {
    ++next_id;
    if (!(e.a_px >= e.b_px) || !(e.b_px > 0))
      throw std::invalid_argument("generate_synthetic_scene: requires a >= b > 0");
    if (e.band_px < 1) throw std::invalid_argument("generate_synthetic_scene: band must be >= 1 px");
    double hx, hy;
    half_extents(e, &hx, &hy);
    if (e.cx - hx < 0 || e.cy - hy < 0 || e.cx + hx > spec.width - 1 || e.cy + hy > spec.height - 1)
      throw std::invalid_argument("generate_synthetic_scene: ellipse extends outside the canvas");

    const double A = e.a_px + e.band_px, B = e.b_px + e.band_px;
    const int x0 = static_cast<int>(std::floor(e.cx - hx)), x1 = static_cast<int>(std::ceil(e.cx + hx));
    const int y0 = static_cast<int>(std::floor(e.cy - hy)), y1 = static_cast<int>(std::ceil(e.cy + hy));
    std::int64_t owned = 0;
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        if (norm_radius_sq(e, A, B, x, y) > 1.0) continue;
        scene.mask.at(x, y) =
            norm_radius_sq(e, e.a_px, e.b_px, x, y) <= 1.0 ? kBody : kBoundary;
        ++owned;
      }

    Fragment f;
    f.id = next_id;
    f.pixel_area = owned;  // rasterized full-particle pixels this ellipse drew
    f.centroid_x = e.cx;
    f.centroid_y = e.cy;
    f.a = A;
    f.b = B;
    f.orientation = std::fmod(std::fmod(e.orientation, kPi) + kPi, kPi);
    f.d = equivalent_diameter(f.a, f.b);
    f.volume = ellipsoid_volume(f.a, f.b, f.d);
    scene.truth.push_back(f);
  }
  return scene;
}

SyntheticSceneSpec random_scene_spec(int width, int height, int count, double a_min, double a_max,
                                     int band_px, std::uint64_t seed, double b_ratio_min) {
  if (width < 1 || height < 1 || count < 0 || !(a_min > 0) || a_max < a_min || band_px < 1 ||
      !(b_ratio_min > 0) || b_ratio_min > 1)
    throw std::invalid_argument("random_scene_spec: invalid parameters");

  SyntheticSceneSpec spec;
  spec.width = width;
  spec.height = height;
  spec.seed = seed;
  Rng rng(seed);

  std::vector<double> cxs, cys, radii;
  int placed = 0, attempts = 0;
  const int max_attempts = 2000 * std::max(count, 1);
  while (placed < count) {
    if (++attempts > max_attempts)
      throw std::invalid_argument("random_scene_spec: cannot place that many ellipses");
    EllipseSpec e;
    e.a_px = rng.uniform(a_min, a_max);
    e.b_px = rng.uniform(b_ratio_min * e.a_px, e.a_px);
    e.orientation = rng.uniform(0.0, kPi);
    e.band_px = band_px;
    const double radius = e.a_px + band_px + 1.0;  // circumscribed, band included
    if (2 * radius + 2 >= std::min(width, height))
      throw std::invalid_argument("random_scene_spec: canvas too small for ellipse size");
    e.cx = rng.uniform(radius + 1.0, width - 2.0 - radius);
    e.cy = rng.uniform(radius + 1.0, height - 2.0 - radius);

    bool clash = false;
    for (std::size_t i = 0; i < radii.size(); ++i) {
      const double dx = e.cx - cxs[i], dy = e.cy - cys[i];
      const double min_d = radius + radii[i] + 2.0;
      if (dx * dx + dy * dy < min_d * min_d) {
        clash = true;
        break;
      }
    }
    if (clash) continue;
    cxs.push_back(e.cx);
    cys.push_back(e.cy);
    radii.push_back(radius);
    spec.ellipses.push_back(e);
    ++placed;
  }
  return spec;
}

}  // namespace fragscan
