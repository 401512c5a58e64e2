#include "fragscan/graindist.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fragscan {

namespace {

double fragment_weight(const Fragment& f, PsdMode mode) {
  return mode == PsdMode::count ? 1.0 : f.volume;
}

// Regularized incomplete beta via the standard continued fraction.
double ibeta_cf(double a, double b, double x) {
  const double tiny = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return h;
}

double ibeta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * ibeta_cf(a, b, x) / a;
  return 1.0 - front * ibeta_cf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, int dof) {
  const double v = dof;
  const double x = v / (v + t * t);
  const double tail = 0.5 * ibeta(0.5 * v, 0.5, x);
  return t >= 0 ? 1.0 - tail : tail;
}

}  // namespace

double student_t_quantile(double p, int dof) {
  if (dof < 1) throw std::invalid_argument("student_t_quantile: dof must be >= 1");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("student_t_quantile: p must be in (0,1)");
  if (p == 0.5) return 0.0;
  if (p < 0.5) return -student_t_quantile(1.0 - p, dof);
  double lo = 0.0, hi = 1.0;
  while (student_t_cdf(hi, dof) < p) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (student_t_cdf(mid, dof) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

SizeDistribution psd(const std::vector<Fragment>& fragments, PsdMode mode, double bin_width) {
  if (fragments.empty()) throw std::invalid_argument("psd: empty fragment list");
  if (!(bin_width > 0)) throw std::invalid_argument("psd: bin_width must be positive");

  SizeDistribution dist;
  dist.mode = mode;
  dist.bin_width = bin_width;
  dist.n_fragments = static_cast<int>(fragments.size());

  double max_d = 0.0, total_w = 0.0;
  for (const auto& f : fragments) {
    max_d = std::max(max_d, f.d);
    total_w += fragment_weight(f, mode);
    dist.total_volume += f.volume;
  }
  if (!(total_w > 0)) throw std::invalid_argument("psd: total weight is zero");

  const int nbins = std::max(1, static_cast<int>(std::ceil(max_d / bin_width)));
  dist.bin_edges.resize(nbins + 1);
  for (int i = 0; i <= nbins; ++i) dist.bin_edges[i] = i * bin_width;
  dist.bin_shares.assign(nbins, 0.0);
  for (const auto& f : fragments) {
    const int bin = std::min(nbins - 1, static_cast<int>(std::floor(f.d / bin_width)));
    dist.bin_shares[bin] += fragment_weight(f, mode) / total_w;
  }

  std::vector<std::pair<double, double>> dw;
  dw.reserve(fragments.size());
  for (const auto& f : fragments) dw.emplace_back(f.d, fragment_weight(f, mode));
  std::sort(dw.begin(), dw.end());
  // Equal diameters merge into one point so the curve is a function of the
  // weight fractions alone (duplicating the fragment list changes nothing).
  double acc = 0.0;
  dist.cumulative.reserve(dw.size());
  for (const auto& [d, w] : dw) {
    acc += w;
    if (!dist.cumulative.empty() && dist.cumulative.back().first == d)
      dist.cumulative.back().second = acc / total_w;
    else
      dist.cumulative.emplace_back(d, acc / total_w);
  }
  dist.cumulative.back().second = 1.0;  // cancel accumulation round-off
  return dist;
}

namespace {

double invert_cumulative(const std::vector<std::pair<double, double>>& curve, double p) {
  // Curve starts at (d_1, 0), so p <= F_1 maps to d_1.
  double d_prev = curve.front().first, f_prev = 0.0;
  for (const auto& [d, f] : curve) {
    if (f >= p) {
      if (f == f_prev) return d;
      return d_prev + (p - f_prev) * (d - d_prev) / (f - f_prev);
    }
    d_prev = d;
    f_prev = f;
  }
  return curve.back().first;
}

}  // namespace

CharacteristicDiameters characteristic_diameters(const SizeDistribution& dist) {
  if (dist.mode != PsdMode::volume)
    throw std::invalid_argument("characteristic_diameters: volume-mode distribution required");
  if (dist.cumulative.empty())
    throw std::invalid_argument("characteristic_diameters: empty distribution");
  CharacteristicDiameters cd;
  cd.d10 = invert_cumulative(dist.cumulative, 0.10);
  cd.d50 = invert_cumulative(dist.cumulative, 0.50);
  cd.d90 = invert_cumulative(dist.cumulative, 0.90);
  return cd;
}

CountSummary count_summary(const std::vector<Fragment>& fragments, double below_cm,
                           double above_cm) {
  if (fragments.empty()) throw std::invalid_argument("count_summary: empty fragment list");
  CountSummary cs;
  double sum = 0.0;
  int below = 0, above = 0;
  for (const auto& f : fragments) {
    sum += f.d;
    if (f.d < below_cm) ++below;
    if (f.d > above_cm) ++above;
  }
  const double n = static_cast<double>(fragments.size());
  cs.share_below = below / n;
  cs.share_above = above / n;
  cs.mean_d = sum / n;
  return cs;
}

namespace {

ConfidenceInterval mean_ci95(const std::vector<double>& xs, double* mean_out) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double s = std::sqrt(ss / (n - 1.0));
  const double half = student_t_quantile(0.975, static_cast<int>(xs.size()) - 1) * s / std::sqrt(n);
  *mean_out = mean;
  return {mean - half, mean + half};
}

}  // namespace

SectionReport section_report(const std::vector<CharacteristicDiameters>& per_image,
                             std::string section_id, std::pair<double, double> depth_range_m) {
  if (per_image.size() < 2)
    throw std::invalid_argument("section_report: insufficient samples (need >= 2 images)");
  SectionReport r;
  r.section_id = std::move(section_id);
  r.depth_range_m = depth_range_m;
  r.per_image = per_image;

  std::vector<double> v10, v50, v90;
  for (const auto& cd : per_image) {
    v10.push_back(cd.d10);
    v50.push_back(cd.d50);
    v90.push_back(cd.d90);
  }
  r.ci10 = mean_ci95(v10, &r.mean.d10);
  r.ci50 = mean_ci95(v50, &r.mean.d50);
  r.ci90 = mean_ci95(v90, &r.mean.d90);
  return r;
}

std::pair<SizeDistribution, CharacteristicDiameters> pool_overall(
    const std::vector<Fragment>& all_fragments, double bin_width) {
  if (all_fragments.empty()) throw std::invalid_argument("pool_overall: empty fragment list");
  auto dist = psd(all_fragments, PsdMode::volume, bin_width);
  auto cd = characteristic_diameters(dist);
  return {std::move(dist), cd};
}

std::array<double, 3> relative_diameters(const CharacteristicDiameters& section,
                                         const CharacteristicDiameters& overall) {
  if (!(overall.d10 > 0) || !(overall.d50 > 0) || !(overall.d90 > 0))
    throw std::invalid_argument("relative_diameters: overall diameters must be positive");
  return {section.d10 / overall.d10, section.d50 / overall.d50, section.d90 / overall.d90};
}

LineFit fit_line(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw std::invalid_argument("fit_line: need at least 2 points");
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : points) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(points.size());
  my /= static_cast<double>(points.size());
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: all x values are equal");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (const auto& [x, y] : points) {
    const double r = y - (fit.slope * x + fit.intercept);
    fit.rss += r * r;
  }
  return fit;
}

SegregationReport build_segregation(const std::vector<SectionReport>& sections,
                                    const CharacteristicDiameters& overall) {
  if (sections.size() < 2) throw std::invalid_argument("build_segregation: need >= 2 sections");
  SegregationReport rep;
  rep.overall = overall;
  std::vector<std::pair<double, double>> p10, p50, p90;
  for (std::size_t i = 0; i < sections.size(); ++i) {
    const auto r = relative_diameters(sections[i].mean, overall);
    rep.ratios.push_back({sections[i].section_id, r[0], r[1], r[2]});
    const double x = static_cast<double>(i + 1);
    p10.emplace_back(x, r[0]);
    p50.emplace_back(x, r[1]);
    p90.emplace_back(x, r[2]);
  }
  rep.fit10 = fit_line(p10);
  rep.fit50 = fit_line(p50);
  rep.fit90 = fit_line(p90);
  return rep;
}

}  // namespace fragscan
