#include <cmath>
#include <cstdint>

#include "fragscan/neuralkernels.hpp"

namespace fragscan {

namespace {

// splitmix64; deterministic across platforms.
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(next() >> 11) * 0x1.0p-53);
  }
};

Tensor random_tensor(Rng& rng, int c, int h, int w) {
  Tensor t(c, h, w);
  for (auto& x : t.v) x = rng.uniform(-1.0, 1.0);
  return t;
}

std::vector<double> random_weights(Rng& rng, std::size_t n) {
  std::vector<double> w(n);
  for (auto& x : w) x = rng.uniform(-1.0, 1.0);
  return w;
}

// Flat quadruple-loop reassembly, written independently of carafe_reassemble.
Tensor reassemble_oracle(const Tensor& x, const KernelField& kf, const CarafeConfig& cfg) {
  Tensor out(x.c, kf.h, kf.w);
  const int r = cfg.k_up / 2;
  for (int ci = 0; ci < x.c; ++ci)
    for (int oy = 0; oy < kf.h; ++oy)
      for (int ox = 0; ox < kf.w; ++ox) {
        double acc = 0.0;
        for (int t = 0; t < kf.k2; ++t) {
          const int n = t / cfg.k_up - r, m = t % cfg.k_up - r;
          const int sy = oy / cfg.sigma + n, sx = ox / cfg.sigma + m;
          if (sy < 0 || sy >= x.h || sx < 0 || sx >= x.w) continue;
          acc += kf.at(oy, ox, t) * x.at(ci, sy, sx);
        }
        out.at(ci, oy, ox) = acc;
      }
  return out;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.v.size(); ++i) m = std::max(m, std::fabs(a.v[i] - b.v[i]));
  return m;
}

}  // namespace

std::vector<SelftestResult> kernels_selftest(std::uint64_t seed) {
  std::vector<SelftestResult> results;
  auto check = [&](const std::string& name, bool ok) { results.push_back({name, ok}); };
  Rng rng(seed);

  {
    CarafeConfig cfg;  // sigma 2, k_up 5, k_encoder 3
    cfg.c_m = 4;
    const Tensor x = random_tensor(rng, 8, 4, 4);
    const auto comp = random_weights(rng, static_cast<std::size_t>(cfg.c_m) * x.c);
    const auto enc = random_weights(
        rng, static_cast<std::size_t>(cfg.sigma * cfg.sigma * 25) * cfg.c_m * 9);
    const auto kf = carafe_predict_kernels(x, comp, enc, cfg);
    check("carafe kernel field shape (8x8x25)", kf.h == 8 && kf.w == 8 && kf.k2 == 25);

    bool in_range = true;
    for (double v : kf.wts) in_range &= v > 0.0 && v < 1.0;
    check("carafe sigmoid weights in (0,1)", in_range);

    const auto zero_kf = carafe_predict_kernels(
        x, comp, std::vector<double>(enc.size(), 0.0), cfg);
    bool all_half = true;
    for (double v : zero_kf.wts) all_half &= std::fabs(v - 0.5) < 1e-15;
    check("carafe zero encoder => all weights 0.5", all_half);

    CarafeConfig soft = cfg;
    soft.normalizer = KernelNormalizer::softmax;
    const auto skf = carafe_predict_kernels(x, comp, enc, soft);
    bool sums_ok = true;
    for (int y = 0; y < skf.h && sums_ok; ++y)
      for (int xx = 0; xx < skf.w; ++xx) {
        double s = 0.0;
        for (int t = 0; t < skf.k2; ++t) s += skf.at(y, xx, t);
        if (std::fabs(s - 1.0) > 1e-9) {
          sums_ok = false;
          break;
        }
      }
    check("carafe softmax weights sum to 1", sums_ok);
  }

  {
    CarafeConfig cfg;
    cfg.k_up = 3;
    const Tensor x = random_tensor(rng, 3, 5, 4);
    KernelField delta(cfg.sigma * x.h, cfg.sigma * x.w, 9);
    for (int y = 0; y < delta.h; ++y)
      for (int xx = 0; xx < delta.w; ++xx) delta.at(y, xx, 4) = 1.0;  // center tap
    const auto up = carafe_reassemble(x, delta, cfg);
    bool nn_ok = true;
    for (int ci = 0; ci < x.c && nn_ok; ++ci)
      for (int oy = 0; oy < up.h && nn_ok; ++oy)
        for (int ox = 0; ox < up.w; ++ox)
          if (up.at(ci, oy, ox) != x.at(ci, oy / cfg.sigma, ox / cfg.sigma)) {
            nn_ok = false;
            break;
          }
    check("carafe delta kernel == nearest-neighbor upsample", nn_ok);

    const Tensor cst(2, 6, 6, 3.0);
    KernelField half(cfg.sigma * 6, cfg.sigma * 6, 9);
    for (auto& v : half.wts) v = 0.5;
    const auto blur = carafe_reassemble(cst, half, cfg);
    // Interior positions see all 9 neighbors.
    check("carafe constant input, 0.5 weights => 4.5x interior",
          std::fabs(blur.at(0, 6, 6) - 4.5 * 3.0) < 1e-12);

    CarafeConfig ident;
    ident.sigma = 1;
    ident.k_up = 1;
    ident.c_m = 2;
    ident.normalizer = KernelNormalizer::softmax;
    const auto comp = random_weights(rng, static_cast<std::size_t>(ident.c_m) * x.c);
    const auto enc = random_weights(rng, static_cast<std::size_t>(1) * ident.c_m * 9);
    const auto kf1 = carafe_predict_kernels(x, comp, enc, ident);
    const auto same = carafe_reassemble(x, kf1, ident);
    check("carafe softmax sigma=1 k_up=1 is identity", max_abs_diff(same, x) == 0.0);

    // Linearity of reassembly.
    const Tensor y = random_tensor(rng, 3, 5, 4);
    KernelField rkf(cfg.sigma * 5, cfg.sigma * 4, 9);
    for (auto& v : rkf.wts) v = rng.uniform(0.0, 1.0);
    Tensor combo(3, 5, 4);
    for (std::size_t i = 0; i < combo.v.size(); ++i) combo.v[i] = 2.0 * x.v[i] - 0.5 * y.v[i];
    const auto lhs = carafe_reassemble(combo, rkf, cfg);
    const auto ux = carafe_reassemble(x, rkf, cfg);
    const auto uy = carafe_reassemble(y, rkf, cfg);
    Tensor rhs(3, lhs.h, lhs.w);
    for (std::size_t i = 0; i < rhs.v.size(); ++i) rhs.v[i] = 2.0 * ux.v[i] - 0.5 * uy.v[i];
    check("carafe reassembly is linear", max_abs_diff(lhs, rhs) < 1e-9);
  }

  {
    CarafeConfig cfg;
    cfg.c_m = 3;
    cfg.k_up = 3;
    bool oracle_ok = true;
    for (int it = 0; it < 20 && oracle_ok; ++it) {
      const Tensor x = random_tensor(rng, 1 + static_cast<int>(rng.next() % 4), 3, 4);
      KernelField kf(cfg.sigma * x.h, cfg.sigma * x.w, 9);
      for (auto& v : kf.wts) v = rng.uniform(-1.0, 1.0);
      oracle_ok = max_abs_diff(carafe_reassemble(x, kf, cfg), reassemble_oracle(x, kf, cfg)) < 1e-9;
    }
    check("carafe reassemble matches loop oracle", oracle_ok);
  }

  {
    const Tensor x = random_tensor(rng, 3, 5, 5);
    const auto primary = random_weights(rng, 2 * 3);
    const auto zero_cheap = std::vector<double>(2 * 9, 0.0);
    const auto g = ghost_conv(x, primary, zero_cheap);
    check("ghost output shape (2*c_h, H, W)", g.c == 4 && g.h == 5 && g.w == 5);
    bool second_zero = true;
    for (int ch = 2; ch < 4; ++ch)
      for (int y = 0; y < 5; ++y)
        for (int xx = 0; xx < 5; ++xx) second_zero &= g.at(ch, y, xx) == 0.0;
    check("ghost zero cheap weights => second half zero", second_zero);
  }

  {
    const Tensor x = random_tensor(rng, 6, 4, 4);
    const auto halved = eca(x, {0.0, 0.0, 0.0});
    bool half_ok = true;
    for (std::size_t i = 0; i < x.v.size(); ++i) half_ok &= halved.v[i] == 0.5 * x.v[i];
    check("eca zero kernel halves the input", half_ok);
    check("eca preserves shape", halved.c == x.c && halved.h == x.h && halved.w == x.w);

    Tensor cpc(3, 2, 2);
    const double means[3] = {-1.5, 0.25, 2.0};
    for (int ci = 0; ci < 3; ++ci)
      for (int y = 0; y < 2; ++y)
        for (int xx = 0; xx < 2; ++xx) cpc.at(ci, y, xx) = means[ci];
    const auto gated = eca(cpc, {0.0, 1.0, 0.0});
    bool gate_ok = true;
    for (int ci = 0; ci < 3; ++ci) {
      const double expect = means[ci] / (1.0 + std::exp(-means[ci]));
      gate_ok &= std::fabs(gated.at(ci, 0, 0) - expect) < 1e-12;
    }
    check("eca identity kernel gates by sigmoid(channel mean)", gate_ok);

    const auto primary = random_weights(rng, 2 * 6);
    const auto cheap = random_weights(rng, 2 * 9);
    const std::array<double, 3> k1d = {0.3, -0.2, 0.7};
    const auto composed = ghost_eca(x, primary, cheap, k1d);
    const auto manual = eca(ghost_conv(x, primary, cheap), k1d);
    check("ghost_eca == eca(ghost_conv(x))", max_abs_diff(composed, manual) == 0.0);
  }

  {
    ParamSpec std64{ParamSpec::Kind::standard3x3, 64, 64, {}};
    ParamSpec ghost64{ParamSpec::Kind::ghost, 64, 64, {}};
    ParamSpec eca_spec{ParamSpec::Kind::eca, 64, 64, {}};
    check("standard 3x3 64->64 params == 36864", count_params(std64) == 36864);
    check("ghost 64->64 params == 2336", count_params(ghost64) == 2336);
    check("eca params == 3", count_params(eca_spec) == 3);
    bool ghost_smaller = true;
    for (int cin = 2; cin <= 512 && ghost_smaller; cin *= 2)
      for (int cout = 2; cout <= 512; cout *= 2) {
        ParamSpec s{ParamSpec::Kind::standard3x3, cin, cout, {}};
        ParamSpec g{ParamSpec::Kind::ghost, cin, cout, {}};
        if (count_params(g) >= count_params(s)) {
          ghost_smaller = false;
          break;
        }
      }
    check("ghost params < standard params across channel sweep", ghost_smaller);
  }

  return results;
}

}  // namespace fragscan
