#include "fragscan/weights.hpp"

#include <fstream>
#include <sstream>

#include "fragscan/csv.hpp"
#include "fragscan/png_io.hpp"

namespace fragscan {

std::size_t WeightArray::count() const {
  std::size_t n = 1;
  for (int d : shape) n *= static_cast<std::size_t>(d);
  return shape.empty() ? 0 : n;
}

WeightArray read_weight_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string magic;
  int rank = 0;
  if (!(in >> magic >> rank) || magic != "fsw" || rank < 1 || rank > 8)
    throw IoError(path + ": not a weight file (expected 'fsw <rank> <dims...>')");
  WeightArray w;
  w.shape.resize(rank);
  for (int& d : w.shape)
    if (!(in >> d) || d < 1) throw IoError(path + ": bad dimension in weight header");
  w.values.resize(w.count());
  for (double& v : w.values)
    if (!(in >> v)) throw IoError(path + ": truncated weight data");
  double extra;
  if (in >> extra) throw IoError(path + ": trailing data after declared shape");
  return w;
}

void write_weight_file(const std::string& path, const WeightArray& weights) {
  if (weights.shape.empty() || weights.values.size() != weights.count())
    throw IoError("write_weight_file: shape does not match value count");
  std::ofstream out(path);
  if (!out) throw IoError("cannot create " + path);
  out << "fsw " << weights.shape.size();
  for (int d : weights.shape) out << ' ' << d;
  out << '\n';
  for (std::size_t i = 0; i < weights.values.size(); ++i)
    out << fmt6(weights.values[i]) << ((i + 1) % 8 == 0 ? '\n' : ' ');
  out << '\n';
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace fragscan
