#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "fragscan/grid.hpp"

namespace fragscan {

struct ClassCounts {
  std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
};

/// One-vs-rest pixel counts for the three mask classes.
struct ConfusionMatrix {
  std::array<ClassCounts, 3> per_class{};
  std::int64_t total = 0;
};

struct ClassMetrics {
  double iou = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double pixel_accuracy = 0.0;  // (TP+TN)/total
  bool undefined = false;       // some denominator was zero; affected values report 0
};

struct MetricsReport {
  std::array<ClassMetrics, 3> per_class{};
  double miou = 0.0;  // mean IoU over all three classes
  double mpa = 0.0;   // mean of per-class (TP+TN)/(TP+TN+FP+FN)
  double miou_foreground = 0.0;  // Body and Boundary only
  double mpa_foreground = 0.0;
  // Conventional mean pixel accuracy (mean recall), for comparison with the
  // (TP+TN)-based variant above.
  double mpa_conventional = 0.0;
  double mpa_conventional_foreground = 0.0;
};

ConfusionMatrix confusion(const ClassMask& pred, const ClassMask& truth);
MetricsReport metrics(const ConfusionMatrix& cm);

/// Per-pixel class probabilities with one-hot ground truth (stored as the
/// index of the hot class).
struct ProbabilityMap {
  int n = 0;  // pixels
  int k = 0;  // classes
  std::vector<double> p;    // n*k, pixel-major
  std::vector<int> truth;   // n entries in [0, k)

  double at(int i, int c) const { return p[static_cast<std::size_t>(i) * k + c]; }
  void validate() const;  // rows sum to 1 +- 1e-6, probabilities in [0,1]
};

double cross_entropy(const ProbabilityMap& pm);
double dice_loss(const ProbabilityMap& pm);
double total_loss(const ProbabilityMap& pm);

}  // namespace fragscan
