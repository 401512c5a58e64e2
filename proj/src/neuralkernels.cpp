#include "fragscan/neuralkernels.hpp"

#include <cmath>
#include <stdexcept>

namespace fragscan {

Tensor::Tensor(int c_, int h_, int w_, double fill) {
  if (c_ < 1 || h_ < 1 || w_ < 1) throw std::invalid_argument("Tensor: dimensions must be >= 1");
  c = c_;
  h = h_;
  w = w_;
  v.assign(static_cast<std::size_t>(c) * h * w, fill);
}

KernelField::KernelField(int h_, int w_, int k2_) : h(h_), w(w_), k2(k2_) {
  wts.assign(static_cast<std::size_t>(h) * w * k2, 0.0);
}

void CarafeConfig::validate() const {
  if (sigma < 1) throw std::invalid_argument("CarafeConfig: sigma must be >= 1");
  if (k_up < 1 || k_up % 2 == 0) throw std::invalid_argument("CarafeConfig: k_up must be odd");
  if (k_encoder < 1 || k_encoder % 2 == 0)
    throw std::invalid_argument("CarafeConfig: k_encoder must be odd");
  if (c_m < 1) throw std::invalid_argument("CarafeConfig: c_m must be >= 1");
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double relu(double z) { return z > 0.0 ? z : 0.0; }

}  // namespace

KernelField carafe_predict_kernels(const Tensor& x, const std::vector<double>& compressor_weights,
                                   const std::vector<double>& encoder_weights,
                                   const CarafeConfig& cfg,
                                   const std::vector<double>& compressor_bias,
                                   const std::vector<double>& encoder_bias) {
  cfg.validate();
  const int k2 = cfg.k_up * cfg.k_up;
  const int enc_out = cfg.sigma * cfg.sigma * k2;
  if (compressor_weights.size() != static_cast<std::size_t>(cfg.c_m) * x.c)
    throw std::invalid_argument("carafe_predict_kernels: compressor weight shape mismatch");
  if (encoder_weights.size() !=
      static_cast<std::size_t>(enc_out) * cfg.c_m * cfg.k_encoder * cfg.k_encoder)
    throw std::invalid_argument("carafe_predict_kernels: encoder weight shape mismatch");
  if (!compressor_bias.empty() && compressor_bias.size() != static_cast<std::size_t>(cfg.c_m))
    throw std::invalid_argument("carafe_predict_kernels: compressor bias shape mismatch");
  if (!encoder_bias.empty() && encoder_bias.size() != static_cast<std::size_t>(enc_out))
    throw std::invalid_argument("carafe_predict_kernels: encoder bias shape mismatch");

  // Channel compressor: 1x1 conv C -> c_m.
  Tensor comp(cfg.c_m, x.h, x.w);
  if (!compressor_bias.empty())
    for (int m = 0; m < cfg.c_m; ++m)
      for (int y = 0; y < x.h; ++y)
        for (int xx = 0; xx < x.w; ++xx) comp.at(m, y, xx) = compressor_bias[m];
  for (int m = 0; m < cfg.c_m; ++m)
    for (int ci = 0; ci < x.c; ++ci) {
      const double wgt = compressor_weights[static_cast<std::size_t>(m) * x.c + ci];
      if (wgt == 0.0) continue;
      for (int y = 0; y < x.h; ++y)
        for (int xx = 0; xx < x.w; ++xx) comp.at(m, y, xx) += wgt * x.at(ci, y, xx);
    }

  // Content encoder: k_encoder^2 conv c_m -> sigma^2*k_up^2, zero padded.
  const int re = cfg.k_encoder / 2;
  Tensor enc(enc_out, x.h, x.w);
  if (!encoder_bias.empty())
    for (int o = 0; o < enc_out; ++o)
      for (int y = 0; y < x.h; ++y)
        for (int xx = 0; xx < x.w; ++xx) enc.at(o, y, xx) = encoder_bias[o];
  for (int o = 0; o < enc_out; ++o)
    for (int m = 0; m < cfg.c_m; ++m)
      for (int ky = 0; ky < cfg.k_encoder; ++ky)
        for (int kx = 0; kx < cfg.k_encoder; ++kx) {
          const double wgt =
              encoder_weights[((static_cast<std::size_t>(o) * cfg.c_m + m) * cfg.k_encoder + ky) *
                                  cfg.k_encoder +
                              kx];
          if (wgt == 0.0) continue;
          for (int y = 0; y < x.h; ++y) {
            const int sy = y + ky - re;
            if (sy < 0 || sy >= x.h) continue;
            for (int xx = 0; xx < x.w; ++xx) {
              const int sx = xx + kx - re;
              if (sx < 0 || sx >= x.w) continue;
              enc.at(o, y, xx) += wgt * comp.at(m, sy, sx);
            }
          }
        }

  // Pixel shuffle into the upsampled grid, then normalize.
  KernelField kf(cfg.sigma * x.h, cfg.sigma * x.w, k2);
  for (int y = 0; y < x.h; ++y)
    for (int xx = 0; xx < x.w; ++xx)
      for (int dy = 0; dy < cfg.sigma; ++dy)
        for (int dx = 0; dx < cfg.sigma; ++dx) {
          const int oy = cfg.sigma * y + dy, ox = cfg.sigma * xx + dx;
          if (cfg.normalizer == KernelNormalizer::sigmoid) {
            for (int t = 0; t < k2; ++t)
              kf.at(oy, ox, t) =
                  sigmoid(enc.at(t * cfg.sigma * cfg.sigma + dy * cfg.sigma + dx, y, xx));
          } else {
            double mx = -1e300;
            for (int t = 0; t < k2; ++t)
              mx = std::max(mx, enc.at(t * cfg.sigma * cfg.sigma + dy * cfg.sigma + dx, y, xx));
            double denom = 0.0;
            for (int t = 0; t < k2; ++t) {
              const double e =
                  std::exp(enc.at(t * cfg.sigma * cfg.sigma + dy * cfg.sigma + dx, y, xx) - mx);
              kf.at(oy, ox, t) = e;
              denom += e;
            }
            for (int t = 0; t < k2; ++t) kf.at(oy, ox, t) /= denom;
          }
        }
  return kf;
}

Tensor carafe_reassemble(const Tensor& x, const KernelField& kf, const CarafeConfig& cfg) {
  cfg.validate();
  const int k2 = cfg.k_up * cfg.k_up;
  if (kf.h != cfg.sigma * x.h || kf.w != cfg.sigma * x.w || kf.k2 != k2)
    throw std::invalid_argument("carafe_reassemble: kernel field shape mismatch");

  const int r = cfg.r();
  Tensor out(x.c, kf.h, kf.w);
  for (int oy = 0; oy < kf.h; ++oy) {
    const int i = oy / cfg.sigma;
    for (int ox = 0; ox < kf.w; ++ox) {
      const int j = ox / cfg.sigma;
      for (int n = -r; n <= r; ++n) {
        const int sy = i + n;
        if (sy < 0 || sy >= x.h) continue;
        for (int m = -r; m <= r; ++m) {
          const int sx = j + m;
          if (sx < 0 || sx >= x.w) continue;
          const double wgt = kf.at(oy, ox, (n + r) * cfg.k_up + (m + r));
          if (wgt == 0.0) continue;
          for (int ci = 0; ci < x.c; ++ci) out.at(ci, oy, ox) += wgt * x.at(ci, sy, sx);
        }
      }
    }
  }
  return out;
}

Tensor ghost_conv(const Tensor& x, const std::vector<double>& primary_weights,
                  const std::vector<double>& cheap_weights, bool rectify,
                  const std::vector<double>& primary_bias, const std::vector<double>& cheap_bias) {
  if (primary_weights.empty() || primary_weights.size() % x.c != 0)
    throw std::invalid_argument("ghost_conv: primary weight shape mismatch");
  const int c_h = static_cast<int>(primary_weights.size() / x.c);
  if (cheap_weights.size() != static_cast<std::size_t>(c_h) * 9)
    throw std::invalid_argument("ghost_conv: cheap weight shape mismatch");
  if (!primary_bias.empty() && primary_bias.size() != static_cast<std::size_t>(c_h))
    throw std::invalid_argument("ghost_conv: primary bias shape mismatch");
  if (!cheap_bias.empty() && cheap_bias.size() != static_cast<std::size_t>(c_h))
    throw std::invalid_argument("ghost_conv: cheap bias shape mismatch");

  Tensor out(2 * c_h, x.h, x.w);
  for (int ch = 0; ch < c_h; ++ch)
    for (int y = 0; y < x.h; ++y)
      for (int xx = 0; xx < x.w; ++xx) {
        double acc = primary_bias.empty() ? 0.0 : primary_bias[ch];
        for (int ci = 0; ci < x.c; ++ci)
          acc += primary_weights[static_cast<std::size_t>(ch) * x.c + ci] * x.at(ci, y, xx);
        out.at(ch, y, xx) = rectify ? relu(acc) : acc;
      }

  // Cheap branch: depthwise 3x3 over the primary output.
  for (int ch = 0; ch < c_h; ++ch)
    for (int y = 0; y < x.h; ++y)
      for (int xx = 0; xx < x.w; ++xx) {
        double acc = cheap_bias.empty() ? 0.0 : cheap_bias[ch];
        for (int ky = -1; ky <= 1; ++ky) {
          const int sy = y + ky;
          if (sy < 0 || sy >= x.h) continue;
          for (int kx = -1; kx <= 1; ++kx) {
            const int sx = xx + kx;
            if (sx < 0 || sx >= x.w) continue;
            acc += cheap_weights[(static_cast<std::size_t>(ch) * 3 + ky + 1) * 3 + kx + 1] *
                   out.at(ch, sy, sx);
          }
        }
        out.at(c_h + ch, y, xx) = rectify ? relu(acc) : acc;
      }
  return out;
}

Tensor eca(const Tensor& x, const std::array<double, 3>& conv1d_weights) {
  std::vector<double> pooled(x.c, 0.0);
  const double inv_area = 1.0 / (static_cast<double>(x.h) * x.w);
  for (int ci = 0; ci < x.c; ++ci) {
    double acc = 0.0;
    for (int y = 0; y < x.h; ++y)
      for (int xx = 0; xx < x.w; ++xx) acc += x.at(ci, y, xx);
    pooled[ci] = acc * inv_area;
  }

  Tensor out(x.c, x.h, x.w);
  for (int ci = 0; ci < x.c; ++ci) {
    double z = conv1d_weights[1] * pooled[ci];
    if (ci > 0) z += conv1d_weights[0] * pooled[ci - 1];
    if (ci + 1 < x.c) z += conv1d_weights[2] * pooled[ci + 1];
    const double gate = sigmoid(z);
    for (int y = 0; y < x.h; ++y)
      for (int xx = 0; xx < x.w; ++xx) out.at(ci, y, xx) = gate * x.at(ci, y, xx);
  }
  return out;
}

Tensor ghost_eca(const Tensor& x, const std::vector<double>& primary_weights,
                 const std::vector<double>& cheap_weights,
                 const std::array<double, 3>& conv1d_weights, bool rectify) {
  return eca(ghost_conv(x, primary_weights, cheap_weights, rectify), conv1d_weights);
}

std::int64_t count_params(const ParamSpec& spec) {
  using Kind = ParamSpec::Kind;
  switch (spec.kind) {
    case Kind::standard3x3:
      if (spec.c_in < 1 || spec.c_out < 1)
        throw std::invalid_argument("count_params: channel sizes must be >= 1");
      return 9LL * spec.c_in * spec.c_out;
    case Kind::ghost: {
      if (spec.c_in < 1 || spec.c_out < 1)
        throw std::invalid_argument("count_params: channel sizes must be >= 1");
      if (spec.c_out % 2 != 0)
        throw std::invalid_argument("count_params: ghost output channels must be even");
      const std::int64_t c_h = spec.c_out / 2;
      return static_cast<std::int64_t>(spec.c_in) * c_h + 9LL * c_h;
    }
    case Kind::eca:
      return 3;
    case Kind::carafe: {
      spec.carafe.validate();
      if (spec.c_in < 1) throw std::invalid_argument("count_params: channel sizes must be >= 1");
      const auto& c = spec.carafe;
      return static_cast<std::int64_t>(spec.c_in) * c.c_m +
             static_cast<std::int64_t>(c.k_encoder) * c.k_encoder * c.c_m * c.sigma * c.sigma *
                 c.k_up * c.k_up;
    }
  }
  throw std::invalid_argument("count_params: unknown op kind");
}

}  // namespace fragscan
