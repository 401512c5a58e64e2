#include "fragscan/svg.hpp"

#include <fstream>

#include "fragscan/csv.hpp"
#include "fragscan/png_io.hpp"

namespace fragscan {

SvgCanvas::SvgCanvas(double width, double height) : width_(width), height_(height) {}

void SvgCanvas::line(double x1, double y1, double x2, double y2, const std::string& style) {
  body_ << "<line x1=\"" << fmt6(x1) << "\" y1=\"" << fmt6(y1) << "\" x2=\"" << fmt6(x2)
        << "\" y2=\"" << fmt6(y2) << "\" style=\"" << style << "\"/>\n";
}

void SvgCanvas::rect(double x, double y, double w, double h, const std::string& style) {
  body_ << "<rect x=\"" << fmt6(x) << "\" y=\"" << fmt6(y) << "\" width=\"" << fmt6(w)
        << "\" height=\"" << fmt6(h) << "\" style=\"" << style << "\"/>\n";
}

void SvgCanvas::circle(double cx, double cy, double r, const std::string& style) {
  body_ << "<circle cx=\"" << fmt6(cx) << "\" cy=\"" << fmt6(cy) << "\" r=\"" << fmt6(r)
        << "\" style=\"" << style << "\"/>\n";
}

void SvgCanvas::polyline(const std::string& points, const std::string& style) {
  body_ << "<polyline points=\"" << points << "\" style=\"" << style << "\"/>\n";
}

void SvgCanvas::text(double x, double y, const std::string& content, double size,
                     const std::string& extra) {
  body_ << "<text x=\"" << fmt6(x) << "\" y=\"" << fmt6(y) << "\" font-size=\"" << fmt6(size)
        << "\" font-family=\"sans-serif\"" << (extra.empty() ? "" : " ") << extra << ">"
        << svg_escape(content) << "</text>\n";
}

std::string SvgCanvas::str() const {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt6(width_) << "\" height=\""
      << fmt6(height_) << "\" viewBox=\"0 0 " << fmt6(width_) << ' ' << fmt6(height_) << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << fmt6(width_) << "\" height=\"" << fmt6(height_)
      << "\" fill=\"white\"/>\n"
      << body_.str() << "</svg>\n";
  return out.str();
}

void SvgCanvas::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot create " + path);
  out << str();
  if (!out) throw IoError("failed writing " + path);
}

std::string svg_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace fragscan
