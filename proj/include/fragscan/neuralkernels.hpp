#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace fragscan {

/// Dense rank-3 feature tensor, channel-major (c, y, x).
struct Tensor {
  int c = 0, h = 0, w = 0;
  std::vector<double> v;

  Tensor() = default;
  Tensor(int c_, int h_, int w_, double fill = 0.0);

  std::size_t idx(int ci, int y, int x) const {
    return (static_cast<std::size_t>(ci) * h + y) * w + x;
  }
  double& at(int ci, int y, int x) { return v[idx(ci, y, x)]; }
  double at(int ci, int y, int x) const { return v[idx(ci, y, x)]; }
};

enum class KernelNormalizer { sigmoid, softmax };

struct CarafeConfig {
  int sigma = 2;        // upsample ratio
  int k_up = 5;         // reassembly kernel size, odd
  int k_encoder = 3;    // encoder kernel size, odd
  int c_m = 64;         // compressed channels
  KernelNormalizer normalizer = KernelNormalizer::sigmoid;

  int r() const { return k_up / 2; }
  void validate() const;
};

/// Predicted reassembly kernels: one k_up^2 weight vector per upsampled
/// position.
struct KernelField {
  int h = 0, w = 0, k2 = 0;
  std::vector<double> wts;

  KernelField() = default;
  KernelField(int h_, int w_, int k2_);
  double& at(int y, int x, int t) { return wts[(static_cast<std::size_t>(y) * w + x) * k2 + t]; }
  double at(int y, int x, int t) const {
    return wts[(static_cast<std::size_t>(y) * w + x) * k2 + t];
  }
};

/// Kernel prediction: 1x1 channel compression (weights c_m x C), k_encoder^2
/// content encoding to sigma^2*k_up^2 channels (weights laid out
/// [out][in][ky][kx], zero padded), pixel shuffle of the sigma^2 factor into
/// space, then sigmoid (default) or per-position softmax normalization.
/// Shuffle layout: encoder channel t*sigma^2 + dy*sigma + dx supplies kernel
/// element t at subpixel offset (dx, dy). Biases are off unless per-output
/// vectors are passed (reproducible parameter counting assumes none).
KernelField carafe_predict_kernels(const Tensor& x, const std::vector<double>& compressor_weights,
                                   const std::vector<double>& encoder_weights,
                                   const CarafeConfig& cfg,
                                   const std::vector<double>& compressor_bias = {},
                                   const std::vector<double>& encoder_bias = {});

/// Content-aware reassembly: output(c, i', j') is the predicted kernel dotted
/// with the k_up x k_up source neighborhood around (i'/sigma, j'/sigma),
/// zero outside the source, same weights for every channel.
Tensor carafe_reassemble(const Tensor& x, const KernelField& kf, const CarafeConfig& cfg);

/// Ghost block: 1x1 primary convolution to c_h channels followed by a cheap
/// depthwise 3x3 transform (stride 1, pad 1), both rectified by default;
/// output is the concatenation [primary, cheap] with 2*c_h channels.
/// primary_weights: c_h x C_in. cheap_weights: c_h x 3 x 3. Per-channel
/// biases are optional and off by default.
Tensor ghost_conv(const Tensor& x, const std::vector<double>& primary_weights,
                  const std::vector<double>& cheap_weights, bool rectify = true,
                  const std::vector<double>& primary_bias = {},
                  const std::vector<double>& cheap_bias = {});

/// Efficient channel attention: global average pool per channel, length-3
/// 1-D convolution across channels (zero padded, no bias), sigmoid gate.
Tensor eca(const Tensor& x, const std::array<double, 3>& conv1d_weights);

Tensor ghost_eca(const Tensor& x, const std::vector<double>& primary_weights,
                 const std::vector<double>& cheap_weights,
                 const std::array<double, 3>& conv1d_weights, bool rectify = true);

struct ParamSpec {
  enum class Kind { standard3x3, ghost, eca, carafe };
  Kind kind = Kind::standard3x3;
  int c_in = 0;
  int c_out = 0;
  CarafeConfig carafe;  // used for Kind::carafe (channel count taken from c_in)
};

/// Bias-free weight counts per operator.
std::int64_t count_params(const ParamSpec& spec);

struct SelftestResult {
  std::string name;
  bool pass = false;
};

/// Closed-form and oracle checks over the kernel operators.
std::vector<SelftestResult> kernels_selftest(std::uint64_t seed = 20240101);

}  // namespace fragscan
