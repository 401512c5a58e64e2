#include "fragscan/shape.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fragscan {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kDiameterScale = 1.16;   // d = 1.16 * b * sqrt(1.35 * a / b)
constexpr double kDiameterRatio = 1.35;
}  // namespace

EllipseFit fit_ellipse(std::span<const Pixel> pixels) {
  const std::size_t n = pixels.size();
  if (n == 0) throw std::invalid_argument("fit_ellipse: empty pixel set");

  double cx = 0, cy = 0;
  for (const auto& p : pixels) {
    cx += p.x;
    cy += p.y;
  }
  cx /= static_cast<double>(n);
  cy /= static_cast<double>(n);

  double mu20 = 0, mu02 = 0, mu11 = 0;
  for (const auto& p : pixels) {
    const double dx = p.x - cx, dy = p.y - cy;
    mu20 += dx * dx;
    mu02 += dy * dy;
    mu11 += dx * dy;
  }
  // Unit-square pixel footprint adds variance 1/12 per axis; this keeps solid
  // rectangles exact and makes single pixels and slivers non-degenerate.
  mu20 = mu20 / static_cast<double>(n) + 1.0 / 12.0;
  mu02 = mu02 / static_cast<double>(n) + 1.0 / 12.0;
  mu11 /= static_cast<double>(n);

  const double mean = 0.5 * (mu20 + mu02);
  const double disc = std::sqrt(0.25 * (mu20 - mu02) * (mu20 - mu02) + mu11 * mu11);
  const double l1 = mean + disc, l2 = mean - disc;

  EllipseFit fit;
  double ratio = 1.0;
  if (l2 > 0.0) {
    ratio = std::sqrt(l1 / l2);
    fit.orientation = 0.5 * std::atan2(2.0 * mu11, mu20 - mu02);
    if (fit.orientation < 0) fit.orientation += kPi;
  }
  // Area match: pi * a * b = pixel count, a / b = ratio.
  fit.b_px = std::sqrt(static_cast<double>(n) / (kPi * ratio));
  fit.a_px = fit.b_px * ratio;
  return fit;
}

double equivalent_diameter(double a, double b) {
  if (a < 0 || b < 0) throw std::invalid_argument("equivalent_diameter: negative axis");
  if (a < b) throw std::invalid_argument("equivalent_diameter: requires a >= b");
  if (b == 0) return 0.0;
  return kDiameterScale * b * std::sqrt(kDiameterRatio * a / b);
}

double ellipsoid_volume(double a, double b, double d) {
  if (a < 0 || b < 0 || d < 0) throw std::invalid_argument("ellipsoid_volume: negative input");
  return (4.0 / 3.0) * kPi * a * b * (d / 2.0);
}

double pixel_diameter(const Fragment& f) {
  return kDiameterScale * std::sqrt(kDiameterRatio) *
         std::sqrt(static_cast<double>(f.pixel_area) / kPi);
}

std::vector<Fragment> measure(const InstanceMap& instances, const Calibration& cal) {
  if (!(cal.cm_per_pixel > 0) || !std::isfinite(cal.cm_per_pixel))
    throw std::invalid_argument("measure: cm_per_pixel must be positive and finite");

  const auto& ids = instances.ids;
  std::vector<std::vector<Pixel>> buckets(instances.instance_count);
  std::vector<std::uint8_t> border(instances.instance_count, 0);
  for (int y = 0; y < ids.height; ++y) {
    for (int x = 0; x < ids.width; ++x) {
      const auto id = ids.at(x, y);
      if (id == 0 || id > static_cast<std::uint32_t>(instances.instance_count)) continue;
      buckets[id - 1].push_back({x, y});
      if (x == 0 || y == 0 || x == ids.width - 1 || y == ids.height - 1) border[id - 1] = 1;
    }
  }

  std::vector<Fragment> out;
  out.reserve(buckets.size());
  for (std::size_t k = 0; k < buckets.size(); ++k) {
    const auto& px = buckets[k];
    if (px.empty()) continue;
    const auto fit = fit_ellipse(px);
    Fragment f;
    f.id = static_cast<int>(k + 1);
    f.pixel_area = static_cast<std::int64_t>(px.size());
    double sx = 0, sy = 0;
    for (const auto& p : px) {
      sx += p.x;
      sy += p.y;
    }
    f.centroid_x = sx / static_cast<double>(px.size());
    f.centroid_y = sy / static_cast<double>(px.size());
    f.a = fit.a_px * cal.cm_per_pixel;
    f.b = fit.b_px * cal.cm_per_pixel;
    f.orientation = fit.orientation;
    f.d = equivalent_diameter(f.a, f.b);
    f.volume = ellipsoid_volume(f.a, f.b, f.d);
    f.touches_border = border[k] != 0;
    out.push_back(f);
  }
  return out;
}

}  // namespace fragscan
