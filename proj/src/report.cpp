#include "fragscan/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fragscan/csv.hpp"
#include "fragscan/png_io.hpp"
#include "fragscan/svg.hpp"

namespace fragscan {

namespace {

double r6(double v) { return std::strtod(fmt6(v).c_str(), nullptr); }

nlohmann::json ci_json(const ConfidenceInterval& ci) {
  return {{"low", r6(ci.low)}, {"high", r6(ci.high)}};
}

}  // namespace

nlohmann::json to_json(const SizeDistribution& dist) {
  nlohmann::json edges = nlohmann::json::array(), shares = nlohmann::json::array();
  for (double e : dist.bin_edges) edges.push_back(r6(e));
  for (double s : dist.bin_shares) shares.push_back(r6(s));
  nlohmann::json cum = nlohmann::json::array();
  for (const auto& [d, f] : dist.cumulative) cum.push_back({r6(d), r6(f)});
  return {{"mode", dist.mode == PsdMode::count ? "count" : "volume"},
          {"bin_width_cm", r6(dist.bin_width)},
          {"bin_edges_cm", std::move(edges)},
          {"bin_shares", std::move(shares)},
          {"cumulative", std::move(cum)},
          {"n_fragments", dist.n_fragments},
          {"total_volume_cm3", r6(dist.total_volume)}};
}

nlohmann::json to_json(const CharacteristicDiameters& cd) {
  return {{"d10_cm", r6(cd.d10)}, {"d50_cm", r6(cd.d50)}, {"d90_cm", r6(cd.d90)}};
}

nlohmann::json to_json(const CountSummary& cs) {
  return {{"share_below", r6(cs.share_below)},
          {"share_above", r6(cs.share_above)},
          {"mean_d_cm", r6(cs.mean_d)}};
}

nlohmann::json to_json(const SectionReport& report) {
  nlohmann::json per_image = nlohmann::json::array();
  for (const auto& cd : report.per_image) per_image.push_back(to_json(cd));
  return {{"section_id", report.section_id},
          {"depth_range_m", {r6(report.depth_range_m.first), r6(report.depth_range_m.second)}},
          {"per_image", std::move(per_image)},
          {"mean", to_json(report.mean)},
          {"ci95", {{"d10", ci_json(report.ci10)}, {"d50", ci_json(report.ci50)}, {"d90", ci_json(report.ci90)}}}};
}

namespace {

nlohmann::json fit_json(const LineFit& fit) {
  return {{"slope", r6(fit.slope)}, {"intercept", r6(fit.intercept)}, {"rss", r6(fit.rss)}};
}

}  // namespace

nlohmann::json to_json(const SegregationReport& report) {
  nlohmann::json ratios = nlohmann::json::array();
  for (const auto& r : report.ratios)
    ratios.push_back({{"section_id", r.section_id},
                      {"r10", r6(r.r10)},
                      {"r50", r6(r.r50)},
                      {"r90", r6(r.r90)}});
  return {{"overall", to_json(report.overall)},
          {"ratios", std::move(ratios)},
          {"fits", {{"r10", fit_json(report.fit10)}, {"r50", fit_json(report.fit50)}, {"r90", fit_json(report.fit90)}}}};
}

nlohmann::json to_json(const MetricsReport& report) {
  static const char* kNames[3] = {"background", "body", "boundary"};
  nlohmann::json per_class;
  for (int k = 0; k < 3; ++k) {
    const auto& m = report.per_class[k];
    per_class[kNames[k]] = {{"iou", r6(m.iou)},          {"precision", r6(m.precision)},
                            {"recall", r6(m.recall)},    {"f1", r6(m.f1)},
                            {"pixel_accuracy", r6(m.pixel_accuracy)}, {"undefined", m.undefined}};
  }
  return {{"miou", r6(report.miou)},
          {"mpa", r6(report.mpa)},
          {"miou_foreground", r6(report.miou_foreground)},
          {"mpa_foreground", r6(report.mpa_foreground)},
          {"mpa_conventional", r6(report.mpa_conventional)},
          {"mpa_conventional_foreground", r6(report.mpa_conventional_foreground)},
          {"per_class", std::move(per_class)}};
}

nlohmann::json to_json(const SectionsResult& result) {
  nlohmann::json sections = nlohmann::json::array();
  for (const auto& s : result.sections) sections.push_back(to_json(s));
  return {{"sections", std::move(sections)},
          {"overall", to_json(result.overall)},
          {"overall_distribution", to_json(result.overall_dist)},
          {"segregation", to_json(result.segregation)}};
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot create " + path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path);
}

std::string metrics_table(const MetricsReport& report) {
  char buf[256];
  std::ostringstream out;
  out << "mIoU     mPA      | Body:  IoU     Prec    Recall  F1      | Boundary: IoU     Prec  "
         "  Recall  F1\n";
  const auto& body = report.per_class[kBody];
  const auto& bnd = report.per_class[kBoundary];
  std::snprintf(buf, sizeof buf,
                "%-8.4f %-8.4f |        %-7.4f %-7.4f %-7.4f %-7.4f |           %-7.4f %-7.4f "
                "%-7.4f %-7.4f\n",
                report.miou, report.mpa, body.iou, body.precision, body.recall, body.f1, bnd.iou,
                bnd.precision, bnd.recall, bnd.f1);
  out << buf;
  return out.str();
}

namespace {

struct Frame {
  double x0, y0, x1, y1;  // plot area in canvas coordinates (y grows down)
  double xmin, xmax, ymin, ymax;
  double px(double x) const { return x0 + (x - xmin) / (xmax - xmin) * (x1 - x0); }
  double py(double y) const { return y1 - (y - ymin) / (ymax - ymin) * (y1 - y0); }
};

const char* kSeriesColor[3] = {"#1f77b4", "#d62728", "#2ca02c"};

}  // namespace

void write_psd_chart(const std::string& path, const SizeDistribution& dist,
                     const std::string& title) {
  const double W = 640, H = 420;
  SvgCanvas svg(W, H);
  Frame fr{60, 40, W - 70, H - 50, 0, 1, 0, 1};

  const double dmax = std::max(dist.bin_edges.back(), dist.cumulative.back().first);
  const double xlo = std::max(dist.bin_width * 0.25, dmax * 1e-4);
  fr.xmin = std::log10(xlo);
  fr.xmax = std::log10(std::max(dmax, xlo * 10));
  double share_max = 0.0;
  for (double s : dist.bin_shares) share_max = std::max(share_max, s);
  fr.ymin = 0;
  fr.ymax = share_max > 0 ? share_max * 1.1 : 1.0;

  svg.text(fr.x0, 24, title, 15);
  svg.line(fr.x0, fr.y1, fr.x1, fr.y1, "stroke:black;stroke-width:1");
  svg.line(fr.x0, fr.y0, fr.x0, fr.y1, "stroke:black;stroke-width:1");
  svg.line(fr.x1, fr.y0, fr.x1, fr.y1, "stroke:black;stroke-width:1");

  // Decade ticks on the log axis.
  for (int e = static_cast<int>(std::floor(fr.xmin)); e <= std::ceil(fr.xmax); ++e) {
    const double x = fr.px(e);
    if (x < fr.x0 - 1 || x > fr.x1 + 1) continue;
    svg.line(x, fr.y1, x, fr.y1 + 5, "stroke:black;stroke-width:1");
    svg.text(x - 10, fr.y1 + 18, fmt6(std::pow(10.0, e)), 11);
  }
  svg.text((fr.x0 + fr.x1) / 2 - 30, H - 12, "diameter (cm)", 12);
  svg.text(10, (fr.y0 + fr.y1) / 2, dist.mode == PsdMode::count ? "count share" : "volume share",
           12, "transform=\"rotate(-90 14 " + fmt6((fr.y0 + fr.y1) / 2) + ")\"");

  for (std::size_t i = 0; i < dist.bin_shares.size(); ++i) {
    if (dist.bin_shares[i] <= 0) continue;
    const double lo = std::max(dist.bin_edges[i], xlo);
    const double hi = std::max(dist.bin_edges[i + 1], xlo);
    const double x = fr.px(std::log10(lo));
    const double w = std::max(0.5, fr.px(std::log10(hi)) - x);
    const double y = fr.py(dist.bin_shares[i] / fr.ymax);
    svg.rect(x, y, w, fr.y1 - y, "fill:#9ecae1;stroke:#3182bd;stroke-width:0.5");
  }

  std::ostringstream pts;
  for (const auto& [d, f] : dist.cumulative)
    pts << fmt6(fr.px(std::log10(std::max(d, xlo)))) << ',' << fmt6(fr.y1 - f * (fr.y1 - fr.y0))
        << ' ';
  svg.polyline(pts.str(), "fill:none;stroke:#d62728;stroke-width:1.5;stroke-dasharray:5,3");
  svg.text(fr.x1 + 8, fr.y0 + 4, "1.0", 11);
  svg.text(fr.x1 + 8, fr.y1 + 4, "0.0", 11);
  svg.text(fr.x1 + 8, (fr.y0 + fr.y1) / 2, "F", 11);

  if (dist.mode == PsdMode::volume) {
    const auto cd = characteristic_diameters(dist);
    const double ds[3] = {cd.d10, cd.d50, cd.d90};
    const char* names[3] = {"d10", "d50", "d90"};
    for (int i = 0; i < 3; ++i) {
      const double x = fr.px(std::log10(std::max(ds[i], xlo)));
      svg.line(x, fr.y0, x, fr.y1, "stroke:#555;stroke-width:0.8;stroke-dasharray:2,2");
      svg.text(x + 2, fr.y0 + 12 + 12 * i, std::string(names[i]) + " = " + fmt6(ds[i]) + " cm", 10);
    }
  }
  svg.save(path);
}

void write_section_ci_chart(const std::string& path, const std::vector<SectionReport>& sections) {
  const double W = 640, H = 420;
  SvgCanvas svg(W, H);
  Frame fr{70, 40, W - 40, H - 60, 0.5, sections.size() + 0.5, 0, 1};

  double ymax = 0;
  for (const auto& s : sections) ymax = std::max({ymax, s.ci10.high, s.ci50.high, s.ci90.high});
  fr.ymax = ymax * 1.1;

  svg.text(fr.x0, 24, "Characteristic diameters per section (mean, 95% CI)", 14);
  svg.line(fr.x0, fr.y1, fr.x1, fr.y1, "stroke:black;stroke-width:1");
  svg.line(fr.x0, fr.y0, fr.x0, fr.y1, "stroke:black;stroke-width:1");
  svg.text((fr.x0 + fr.x1) / 2 - 20, H - 14, "section", 12);
  svg.text(12, (fr.y0 + fr.y1) / 2, "cm", 12);

  for (int g = 0; g <= 4; ++g) {
    const double y = fr.y1 - g / 4.0 * (fr.y1 - fr.y0);
    svg.line(fr.x0 - 4, y, fr.x0, y, "stroke:black;stroke-width:1");
    svg.text(fr.x0 - 48, y + 4, fmt6(g / 4.0 * fr.ymax), 10);
  }

  const char* names[3] = {"d10", "d50", "d90"};
  for (std::size_t i = 0; i < sections.size(); ++i) {
    const auto& s = sections[i];
    const double means[3] = {s.mean.d10, s.mean.d50, s.mean.d90};
    const ConfidenceInterval cis[3] = {s.ci10, s.ci50, s.ci90};
    for (int k = 0; k < 3; ++k) {
      const double x = fr.px(i + 1) + (k - 1) * 14;
      const std::string stroke = std::string("stroke:") + kSeriesColor[k] + ";stroke-width:1.5";
      svg.line(x, fr.py(cis[k].low), x, fr.py(cis[k].high), stroke);
      svg.line(x - 4, fr.py(cis[k].low), x + 4, fr.py(cis[k].low), stroke);
      svg.line(x - 4, fr.py(cis[k].high), x + 4, fr.py(cis[k].high), stroke);
      svg.circle(x, fr.py(means[k]), 3, std::string("fill:") + kSeriesColor[k]);
    }
    svg.text(fr.px(i + 1) - 10, fr.y1 + 16, s.section_id, 11);
  }
  for (int k = 0; k < 3; ++k) {
    svg.circle(fr.x1 - 90, fr.y0 + 10 + 16 * k, 3, std::string("fill:") + kSeriesColor[k]);
    svg.text(fr.x1 - 80, fr.y0 + 14 + 16 * k, names[k], 11);
  }
  svg.save(path);
}

void write_ratio_fit_chart(const std::string& path, const SegregationReport& seg) {
  const double W = 640, H = 420;
  SvgCanvas svg(W, H);
  Frame fr{70, 40, W - 40, H - 60, 0.5, seg.ratios.size() + 0.5, 0, 1};

  double ymax = 1.0;
  for (const auto& r : seg.ratios) ymax = std::max({ymax, r.r10, r.r50, r.r90});
  fr.ymax = ymax * 1.15;

  svg.text(fr.x0, 24, "Relative characteristic diameters vs section", 14);
  svg.line(fr.x0, fr.y1, fr.x1, fr.y1, "stroke:black;stroke-width:1");
  svg.line(fr.x0, fr.y0, fr.x0, fr.y1, "stroke:black;stroke-width:1");
  const double y1line = fr.py(1.0);
  svg.line(fr.x0, y1line, fr.x1, y1line, "stroke:#888;stroke-width:0.8;stroke-dasharray:4,3");
  svg.text(fr.x1 - 30, y1line - 4, "1.0", 10);

  const LineFit* fits[3] = {&seg.fit10, &seg.fit50, &seg.fit90};
  const char* names[3] = {"d10/d'10", "d50/d'50", "d90/d'90"};
  for (int k = 0; k < 3; ++k) {
    std::ostringstream pts;
    for (std::size_t i = 0; i < seg.ratios.size(); ++i) {
      const double r = k == 0 ? seg.ratios[i].r10 : k == 1 ? seg.ratios[i].r50 : seg.ratios[i].r90;
      svg.circle(fr.px(i + 1), fr.py(r), 3, std::string("fill:") + kSeriesColor[k]);
    }
    const double xa = 1, xb = static_cast<double>(seg.ratios.size());
    svg.line(fr.px(xa), fr.py(fits[k]->intercept + fits[k]->slope * xa), fr.px(xb),
             fr.py(fits[k]->intercept + fits[k]->slope * xb),
             std::string("stroke:") + kSeriesColor[k] + ";stroke-width:1.2");
    svg.text(fr.x0 + 8, fr.y0 + 12 + 14 * k,
             std::string(names[k]) + "  slope = " + fmt6(fits[k]->slope), 11,
             std::string("fill=\"") + kSeriesColor[k] + "\"");
  }
  for (std::size_t i = 0; i < seg.ratios.size(); ++i)
    svg.text(fr.px(i + 1) - 10, fr.y1 + 16, seg.ratios[i].section_id, 11);
  svg.text((fr.x0 + fr.x1) / 2 - 20, H - 14, "section", 12);
  svg.save(path);
}

}  // namespace fragscan
