#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "fragscan/shape.hpp"

namespace fragscan {

enum class PsdMode { count, volume };

/// Binned shares plus the exact (unbinned) cumulative passing curve.
struct SizeDistribution {
  PsdMode mode = PsdMode::count;
  double bin_width = 0.0;
  std::vector<double> bin_edges;                    // nbins+1 edges starting at 0
  std::vector<double> bin_shares;                   // sums to 1
  std::vector<std::pair<double, double>> cumulative;// (d, F) per fragment, d ascending
  int n_fragments = 0;
  double total_volume = 0.0;                        // cm^3, sum of Eq-4 volumes
};

struct CharacteristicDiameters {
  double d10 = 0.0;
  double d50 = 0.0;
  double d90 = 0.0;
};

struct ConfidenceInterval {
  double low = 0.0;
  double high = 0.0;
};

struct SectionReport {
  std::string section_id;
  std::pair<double, double> depth_range_m{0.0, 0.0};
  std::vector<CharacteristicDiameters> per_image;
  CharacteristicDiameters mean;
  ConfidenceInterval ci10, ci50, ci90;  // two-sided 95%, Student-t
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rss = 0.0;  // sum of squared residuals
};

struct SegregationReport {
  CharacteristicDiameters overall;  // d'10, d'50, d'90 of the pooled slope
  struct SectionRatios {
    std::string section_id;
    double r10 = 0.0, r50 = 0.0, r90 = 0.0;
  };
  std::vector<SectionRatios> ratios;      // section order = fit x order (1-based index)
  LineFit fit10, fit50, fit90;
};

struct CountSummary {
  double share_below = 0.0;  // count fraction strictly below the lower threshold
  double share_above = 0.0;  // strictly above the upper threshold
  double mean_d = 0.0;
};

SizeDistribution psd(const std::vector<Fragment>& fragments, PsdMode mode, double bin_width);

/// Piecewise-linear inverse of the exact cumulative volume curve at 10/50/90%.
CharacteristicDiameters characteristic_diameters(const SizeDistribution& dist);

CountSummary count_summary(const std::vector<Fragment>& fragments, double below_cm = 5.0,
                           double above_cm = 20.0);

SectionReport section_report(const std::vector<CharacteristicDiameters>& per_image,
                             std::string section_id, std::pair<double, double> depth_range_m);

std::pair<SizeDistribution, CharacteristicDiameters> pool_overall(
    const std::vector<Fragment>& all_fragments, double bin_width = 0.8);

std::array<double, 3> relative_diameters(const CharacteristicDiameters& section,
                                         const CharacteristicDiameters& overall);

/// Ordinary least squares over (x, y) points; needs >= 2 distinct x.
LineFit fit_line(const std::vector<std::pair<double, double>>& points);

SegregationReport build_segregation(const std::vector<SectionReport>& sections,
                                    const CharacteristicDiameters& overall);

/// Student-t quantile at probability p with dof degrees of freedom.
double student_t_quantile(double p, int dof);

}  // namespace fragscan
