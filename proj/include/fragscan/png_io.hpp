#pragma once

#include <stdexcept>
#include <string>

#include "fragscan/fusion.hpp"
#include "fragscan/grid.hpp"

namespace fragscan {

/// File and data-format failures; the CLI maps these to exit code 2.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// 8-bit single-channel PNG in/out. Mask readers reject any value outside
/// {0, 1, 2}.
GrayImage read_gray_png(const std::string& path);
void write_gray_png(const std::string& path, const GrayImage& img);

ClassMask read_mask_png(const std::string& path);
void write_mask_png(const std::string& path, const ClassMask& mask);

/// 16-bit single-channel PNG carrying instance ids (0 = background).
InstanceMap read_instance_png(const std::string& path);
void write_instance_png(const std::string& path, const InstanceMap& instances);

}  // namespace fragscan
