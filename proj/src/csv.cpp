#include "fragscan/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "fragscan/png_io.hpp"

namespace fragscan {

namespace {

constexpr const char* kHeader =
    "image_id,fragment_id,pixel_area,centroid_x_px,centroid_y_px,a_cm,b_cm,orientation_rad,"
    "d_cm,volume_cm3,touches_border";

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

std::string fmt6(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

void write_fragment_csv(const std::string& path, const std::string& image_id,
                        const std::vector<Fragment>& fragments) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot create " + path);
  out << kHeader << '\n';
  for (const auto& f : fragments) {
    out << image_id << ',' << f.id << ',' << f.pixel_area << ',' << fmt6(f.centroid_x) << ','
        << fmt6(f.centroid_y) << ',' << fmt6(f.a) << ',' << fmt6(f.b) << ','
        << fmt6(f.orientation) << ',' << fmt6(f.d) << ',' << fmt6(f.volume) << ','
        << (f.touches_border ? 1 : 0) << '\n';
  }
  if (!out) throw IoError("failed writing " + path);
}

std::vector<FragmentRecord> read_fragment_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kHeader)
    throw IoError(path + ": missing or unexpected fragment CSV header");

  std::vector<FragmentRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cols = split_commas(line);
    if (cols.size() != 11)
      throw IoError(path + ":" + std::to_string(line_no) + ": expected 11 columns");
    try {
      FragmentRecord rec;
      rec.image_id = cols[0];
      rec.fragment.id = std::stoi(cols[1]);
      rec.fragment.pixel_area = std::stoll(cols[2]);
      rec.fragment.centroid_x = std::stod(cols[3]);
      rec.fragment.centroid_y = std::stod(cols[4]);
      rec.fragment.a = std::stod(cols[5]);
      rec.fragment.b = std::stod(cols[6]);
      rec.fragment.orientation = std::stod(cols[7]);
      rec.fragment.d = std::stod(cols[8]);
      rec.fragment.volume = std::stod(cols[9]);
      rec.fragment.touches_border = std::stoi(cols[10]) != 0;
      records.push_back(std::move(rec));
    } catch (const std::exception&) {
      throw IoError(path + ":" + std::to_string(line_no) + ": malformed fragment row");
    }
  }
  return records;
}

}  // namespace fragscan
