#pragma once

#include <string>
#include <vector>

#include "fragscan/shape.hpp"

namespace fragscan {

/// Formats a value with 6 significant digits; all serialized floating-point
/// output goes through this to keep runs byte-identical.
std::string fmt6(double value);

struct FragmentRecord {
  std::string image_id;
  Fragment fragment;
};

void write_fragment_csv(const std::string& path, const std::string& image_id,
                        const std::vector<Fragment>& fragments);

std::vector<FragmentRecord> read_fragment_csv(const std::string& path);

}  // namespace fragscan
