#pragma once

#include <sstream>
#include <string>

namespace fragscan {

/// Minimal SVG writing surface for the report charts.
class SvgCanvas {
 public:
  SvgCanvas(double width, double height);

  void line(double x1, double y1, double x2, double y2, const std::string& style);
  void rect(double x, double y, double w, double h, const std::string& style);
  void circle(double cx, double cy, double r, const std::string& style);
  void polyline(const std::string& points, const std::string& style);
  void text(double x, double y, const std::string& content, double size,
            const std::string& extra = "");

  std::string str() const;
  void save(const std::string& path) const;

 private:
  double width_, height_;
  std::ostringstream body_;
};

std::string svg_escape(const std::string& text);

}  // namespace fragscan
