#include "fragscan/segeval.hpp"

#include <cmath>
#include <stdexcept>

namespace fragscan {

ConfusionMatrix confusion(const ClassMask& pred, const ClassMask& truth) {
  if (pred.width != truth.width || pred.height != truth.height)
    throw std::invalid_argument("confusion: mask dimensions differ");

  std::int64_t joint[3][3] = {};
  for (std::size_t i = 0; i < pred.v.size(); ++i) {
    const auto t = truth.v[i], p = pred.v[i];
    if (t > kBoundary || p > kBoundary) throw std::invalid_argument("confusion: invalid class label");
    ++joint[t][p];
  }

  ConfusionMatrix cm;
  cm.total = static_cast<std::int64_t>(pred.v.size());
  for (int k = 0; k < 3; ++k) {
    auto& c = cm.per_class[k];
    c.tp = joint[k][k];
    for (int j = 0; j < 3; ++j) {
      if (j == k) continue;
      c.fp += joint[j][k];
      c.fn += joint[k][j];
    }
    c.tn = cm.total - c.tp - c.fp - c.fn;
  }
  return cm;
}

namespace {

double ratio_or_zero(std::int64_t num, std::int64_t den, bool* undefined) {
  if (den == 0) {
    *undefined = true;
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

MetricsReport metrics(const ConfusionMatrix& cm) {
  MetricsReport rep;
  for (int k = 0; k < 3; ++k) {
    const auto& c = cm.per_class[k];
    auto& m = rep.per_class[k];
    m.precision = ratio_or_zero(c.tp, c.tp + c.fp, &m.undefined);
    m.recall = ratio_or_zero(c.tp, c.tp + c.fn, &m.undefined);
    m.iou = ratio_or_zero(c.tp, c.tp + c.fp + c.fn, &m.undefined);
    m.pixel_accuracy = ratio_or_zero(c.tp + c.tn, cm.total, &m.undefined);
    if (m.precision + m.recall > 0)
      m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    else
      m.undefined = true;
  }
  for (int k = 0; k < 3; ++k) {
    rep.miou += rep.per_class[k].iou / 3.0;
    rep.mpa += rep.per_class[k].pixel_accuracy / 3.0;
    rep.mpa_conventional += rep.per_class[k].recall / 3.0;
  }
  for (int k = kBody; k <= kBoundary; ++k) {
    rep.miou_foreground += rep.per_class[k].iou / 2.0;
    rep.mpa_foreground += rep.per_class[k].pixel_accuracy / 2.0;
    rep.mpa_conventional_foreground += rep.per_class[k].recall / 2.0;
  }
  return rep;
}

void ProbabilityMap::validate() const {
  if (n < 1 || k < 1) throw std::invalid_argument("ProbabilityMap: empty map");
  if (p.size() != static_cast<std::size_t>(n) * k || truth.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("ProbabilityMap: inconsistent sizes");
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int c = 0; c < k; ++c) {
      const double q = at(i, c);
      if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("ProbabilityMap: probability out of [0,1]");
      sum += q;
    }
    if (std::fabs(sum - 1.0) > 1e-6)
      throw std::invalid_argument("ProbabilityMap: pixel probabilities do not sum to 1");
    if (truth[i] < 0 || truth[i] >= k) throw std::invalid_argument("ProbabilityMap: truth label out of range");
  }
}

double cross_entropy(const ProbabilityMap& pm) {
  pm.validate();
  double loss = 0.0;
  for (int i = 0; i < pm.n; ++i) {
    const double q = std::max(pm.at(i, pm.truth[i]), 1e-12);
    loss -= std::log(q);
  }
  return loss / pm.n;
}

double dice_loss(const ProbabilityMap& pm) {
  pm.validate();
  double overlap = 0.0, sum_s = 0.0;
  for (int i = 0; i < pm.n; ++i) {
    overlap += pm.at(i, pm.truth[i]);
    for (int c = 0; c < pm.k; ++c) sum_s += pm.at(i, c);
  }
  const double sum_g = static_cast<double>(pm.n);  // one-hot rows each sum to 1
  return 1.0 - 2.0 * overlap / (sum_g + sum_s);
}

double total_loss(const ProbabilityMap& pm) { return cross_entropy(pm) + dice_loss(pm); }

}  // namespace fragscan
