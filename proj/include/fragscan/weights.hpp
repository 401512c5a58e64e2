#pragma once

#include <string>
#include <vector>

namespace fragscan {

/// Flat numeric array with its shape, as stored in weight files. The text
/// format is one header line "fsw <rank> <dim0> <dim1> ..." followed by the
/// values in row-major order, whitespace separated.
struct WeightArray {
  std::vector<int> shape;
  std::vector<double> values;

  std::size_t count() const;
};

WeightArray read_weight_file(const std::string& path);
void write_weight_file(const std::string& path, const WeightArray& weights);

}  // namespace fragscan
