#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fragscan/fusion.hpp"
#include "fragscan/raster.hpp"

namespace fragscan {

/// One measured rock particle. Axes are semi-axes of the equivalent ellipse
/// (so pi*a*b equals the calibrated pixel area); d and volume follow the
/// d = 1.16*b*sqrt(1.35*a/b) and V = 4/3*pi*a*b*(d/2) conventions.
struct Fragment {
  int id = 0;
  std::int64_t pixel_area = 0;
  double centroid_x = 0.0;  // px
  double centroid_y = 0.0;  // px
  double a = 0.0;           // semi-major, cm
  double b = 0.0;           // semi-minor, cm
  double orientation = 0.0; // radians in [0, pi)
  double d = 0.0;           // equivalent diameter, cm
  double volume = 0.0;      // cm^3
  bool touches_border = false;
};

struct EllipseFit {
  double a_px = 0.0;
  double b_px = 0.0;
  double orientation = 0.0;
};

/// Equivalent ellipse of a pixel set: orientation and axis ratio come from
/// the second central moments (each pixel counted as a unit square, which
/// adds 1/12 per axis), scaled so pi*a*b equals the pixel count.
EllipseFit fit_ellipse(std::span<const Pixel> pixels);

double equivalent_diameter(double a, double b);
double ellipsoid_volume(double a, double b, double d);

/// Eq-3 diameter in pixel units, recovered from the area-match identity
/// d = 1.16*sqrt(1.35)*sqrt(pixel_area/pi); independent of calibration.
double pixel_diameter(const Fragment& f);

std::vector<Fragment> measure(const InstanceMap& instances, const Calibration& cal);

}  // namespace fragscan
