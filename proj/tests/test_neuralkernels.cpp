#include <doctest.h>

#include <cmath>
#include <vector>

#include "fragscan/neuralkernels.hpp"
#include "helpers.hpp"

using namespace fragscan;
using testutil::Rng;

namespace {

Tensor random_tensor(Rng& rng, int c, int h, int w) {
  Tensor t(c, h, w);
  for (auto& v : t.v) v = rng.uniform(-2.0, 2.0);
  return t;
}

std::vector<double> random_weights(Rng& rng, std::size_t n) {
  std::vector<double> w(n);
  for (auto& v : w) v = rng.uniform(-1.0, 1.0);
  return w;
}

double sig(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Direct evaluation of one predicted kernel weight: compress + encode at the
// source position, no intermediate tensors.
double predict_oracle(const Tensor& x, const std::vector<double>& comp,
                      const std::vector<double>& enc, const CarafeConfig& cfg, int oy, int ox,
                      int t) {
  const int sy = oy / cfg.sigma, sx = ox / cfg.sigma;
  const int dy = oy % cfg.sigma, dx = ox % cfg.sigma;
  const int channel = t * cfg.sigma * cfg.sigma + dy * cfg.sigma + dx;
  const int re = cfg.k_encoder / 2;
  double acc = 0.0;
  for (int m = 0; m < cfg.c_m; ++m)
    for (int ky = 0; ky < cfg.k_encoder; ++ky)
      for (int kx = 0; kx < cfg.k_encoder; ++kx) {
        const int py = sy + ky - re, px = sx + kx - re;
        if (py < 0 || py >= x.h || px < 0 || px >= x.w) continue;
        double compressed = 0.0;
        for (int ci = 0; ci < x.c; ++ci)
          compressed += comp[static_cast<std::size_t>(m) * x.c + ci] * x.at(ci, py, px);
        acc += enc[((static_cast<std::size_t>(channel) * cfg.c_m + m) * cfg.k_encoder + ky) *
                       cfg.k_encoder +
                   kx] *
               compressed;
      }
  return sig(acc);
}

Tensor reassemble_oracle(const Tensor& x, const KernelField& kf, const CarafeConfig& cfg) {
  Tensor out(x.c, kf.h, kf.w);
  const int r = cfg.k_up / 2;
  for (int ci = 0; ci < x.c; ++ci)
    for (int oy = 0; oy < kf.h; ++oy)
      for (int ox = 0; ox < kf.w; ++ox) {
        double acc = 0.0;
        for (int n = -r; n <= r; ++n)
          for (int m = -r; m <= r; ++m) {
            const int sy = oy / cfg.sigma + n, sx = ox / cfg.sigma + m;
            if (sy < 0 || sy >= x.h || sx < 0 || sx >= x.w) continue;
            acc += kf.at(oy, ox, (n + r) * cfg.k_up + (m + r)) * x.at(ci, sy, sx);
          }
        out.at(ci, oy, ox) = acc;
      }
  return out;
}

Tensor ghost_oracle(const Tensor& x, const std::vector<double>& primary,
                    const std::vector<double>& cheap, int c_h) {
  Tensor out(2 * c_h, x.h, x.w);
  for (int ch = 0; ch < c_h; ++ch)
    for (int y = 0; y < x.h; ++y)
      for (int xx = 0; xx < x.w; ++xx) {
        double acc = 0.0;
        for (int ci = 0; ci < x.c; ++ci)
          acc += primary[static_cast<std::size_t>(ch) * x.c + ci] * x.at(ci, y, xx);
        out.at(ch, y, xx) = std::max(0.0, acc);
      }
  for (int ch = 0; ch < c_h; ++ch)
    for (int y = 0; y < x.h; ++y)
      for (int xx = 0; xx < x.w; ++xx) {
        double acc = 0.0;
        for (int ky = -1; ky <= 1; ++ky)
          for (int kx = -1; kx <= 1; ++kx) {
            const int sy = y + ky, sx = xx + kx;
            if (sy < 0 || sy >= x.h || sx < 0 || sx >= x.w) continue;
            acc += cheap[(static_cast<std::size_t>(ch) * 3 + ky + 1) * 3 + kx + 1] *
                   out.at(ch, sy, sx);
          }
        out.at(c_h + ch, y, xx) = std::max(0.0, acc);
      }
  return out;
}

}  // namespace

TEST_CASE("kernel prediction shape and sigmoid baseline") {
  Rng rng(301);
  CarafeConfig cfg;
  cfg.c_m = 4;
  const Tensor x = random_tensor(rng, 8, 4, 4);
  const auto comp = random_weights(rng, 4 * 8);
  const auto enc = random_weights(rng, static_cast<std::size_t>(4 * 25) * 4 * 9);
  const auto kf = carafe_predict_kernels(x, comp, enc, cfg);
  CHECK(kf.h == 8);
  CHECK(kf.w == 8);
  CHECK(kf.k2 == 25);

  const auto flat = carafe_predict_kernels(x, comp, std::vector<double>(enc.size(), 0.0), cfg);
  for (double w : flat.wts) REQUIRE(w == 0.5);

  CHECK_THROWS_AS(carafe_predict_kernels(x, random_weights(rng, 7), enc, cfg),
                  std::invalid_argument);
  CarafeConfig bad = cfg;
  bad.k_up = 4;
  CHECK_THROWS_AS(carafe_predict_kernels(x, comp, enc, bad), std::invalid_argument);
}

TEST_CASE("kernel prediction matches the direct per-position oracle") {
  Rng rng(307);
  for (int it = 0; it < 10; ++it) {
    CarafeConfig cfg;
    cfg.sigma = 1 + rng.below(2);
    cfg.k_up = 3;
    cfg.c_m = 2 + rng.below(3);
    const Tensor x = random_tensor(rng, 1 + rng.below(4), 2 + rng.below(4), 2 + rng.below(4));
    const auto comp = random_weights(rng, static_cast<std::size_t>(cfg.c_m) * x.c);
    const auto enc = random_weights(
        rng, static_cast<std::size_t>(cfg.sigma * cfg.sigma * 9) * cfg.c_m * cfg.k_encoder *
                 cfg.k_encoder);
    const auto kf = carafe_predict_kernels(x, comp, enc, cfg);
    for (int oy = 0; oy < kf.h; ++oy)
      for (int ox = 0; ox < kf.w; ++ox)
        for (int t = 0; t < kf.k2; ++t)
          REQUIRE(kf.at(oy, ox, t) ==
                  doctest::Approx(predict_oracle(x, comp, enc, cfg, oy, ox, t)).epsilon(1e-6));
  }
}

TEST_CASE("softmax normalization sums to one per position") {
  Rng rng(311);
  CarafeConfig cfg;
  cfg.c_m = 3;
  cfg.normalizer = KernelNormalizer::softmax;
  const Tensor x = random_tensor(rng, 5, 3, 3);
  const auto comp = random_weights(rng, 3 * 5);
  const auto enc = random_weights(rng, static_cast<std::size_t>(4 * 25) * 3 * 9);
  const auto kf = carafe_predict_kernels(x, comp, enc, cfg);
  for (int oy = 0; oy < kf.h; ++oy)
    for (int ox = 0; ox < kf.w; ++ox) {
      double sum = 0.0;
      for (int t = 0; t < kf.k2; ++t) sum += kf.at(oy, ox, t);
      REQUIRE(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("delta kernels reproduce nearest-neighbor upsampling") {
  Rng rng(313);
  CarafeConfig cfg;
  cfg.k_up = 5;
  const Tensor x = random_tensor(rng, 3, 4, 5);
  KernelField delta(2 * 4, 2 * 5, 25);
  for (int oy = 0; oy < delta.h; ++oy)
    for (int ox = 0; ox < delta.w; ++ox) delta.at(oy, ox, 12) = 1.0;  // (n, m) = (0, 0)
  const auto up = carafe_reassemble(x, delta, cfg);
  for (int ci = 0; ci < 3; ++ci)
    for (int oy = 0; oy < up.h; ++oy)
      for (int ox = 0; ox < up.w; ++ox) REQUIRE(up.at(ci, oy, ox) == x.at(ci, oy / 2, ox / 2));
}

TEST_CASE("constant input with half weights sums the interior neighborhood") {
  CarafeConfig cfg;
  cfg.k_up = 3;
  const Tensor x(2, 6, 6, 2.0);
  KernelField half(12, 12, 9);
  for (auto& w : half.wts) w = 0.5;
  const auto out = carafe_reassemble(x, half, cfg);
  CHECK(out.at(0, 6, 6) == doctest::Approx(0.5 * 9 * 2.0).epsilon(1e-12));
  CHECK(out.at(1, 0, 0) == doctest::Approx(0.5 * 4 * 2.0).epsilon(1e-12));  // corner: 4 neighbors
}

TEST_CASE("reassembly matches the quadruple-loop oracle and is linear") {
  Rng rng(317);
  for (int it = 0; it < 30; ++it) {
    CarafeConfig cfg;
    cfg.sigma = 1 + rng.below(3);
    cfg.k_up = 1 + 2 * rng.below(3);
    const Tensor x = random_tensor(rng, 1 + rng.below(4), 1 + rng.below(6), 1 + rng.below(6));
    KernelField kf(cfg.sigma * x.h, cfg.sigma * x.w, cfg.k_up * cfg.k_up);
    for (auto& w : kf.wts) w = rng.uniform(-1.0, 1.0);
    const auto got = carafe_reassemble(x, kf, cfg);
    const auto want = reassemble_oracle(x, kf, cfg);
    for (std::size_t i = 0; i < got.v.size(); ++i)
      REQUIRE(got.v[i] == doctest::Approx(want.v[i]).epsilon(1e-9));

    const Tensor y = random_tensor(rng, x.c, x.h, x.w);
    Tensor combo(x.c, x.h, x.w);
    for (std::size_t i = 0; i < combo.v.size(); ++i) combo.v[i] = 1.5 * x.v[i] - 2.5 * y.v[i];
    const auto lhs = carafe_reassemble(combo, kf, cfg);
    const auto ux = carafe_reassemble(x, kf, cfg);
    const auto uy = carafe_reassemble(y, kf, cfg);
    for (std::size_t i = 0; i < lhs.v.size(); ++i)
      REQUIRE(lhs.v[i] == doctest::Approx(1.5 * ux.v[i] - 2.5 * uy.v[i]).epsilon(1e-9));
  }

  const Tensor x = random_tensor(rng, 2, 3, 3);
  CarafeConfig cfg;
  CHECK_THROWS_AS(carafe_reassemble(x, KernelField(5, 6, 25), cfg), std::invalid_argument);
}

TEST_CASE("softmax identity configuration is exactly the identity") {
  Rng rng(331);
  CarafeConfig cfg;
  cfg.sigma = 1;
  cfg.k_up = 1;
  cfg.c_m = 3;
  cfg.normalizer = KernelNormalizer::softmax;
  const Tensor x = random_tensor(rng, 4, 5, 5);
  const auto comp = random_weights(rng, 3 * 4);
  const auto enc = random_weights(rng, static_cast<std::size_t>(1) * 3 * 9);
  const auto kf = carafe_predict_kernels(x, comp, enc, cfg);
  const auto out = carafe_reassemble(x, kf, cfg);
  for (std::size_t i = 0; i < x.v.size(); ++i) REQUIRE(out.v[i] == x.v[i]);
}

TEST_CASE("ghost block shapes, zero cheap branch, oracle equivalence") {
  Rng rng(337);
  const Tensor x = random_tensor(rng, 3, 5, 5);
  const auto primary = random_weights(rng, 2 * 3);
  const auto g0 = ghost_conv(x, primary, std::vector<double>(2 * 9, 0.0));
  CHECK(g0.c == 4);
  CHECK(g0.h == 5);
  CHECK(g0.w == 5);
  for (int ch = 2; ch < 4; ++ch)
    for (int y = 0; y < 5; ++y)
      for (int xx = 0; xx < 5; ++xx) REQUIRE(g0.at(ch, y, xx) == 0.0);

  for (int it = 0; it < 20; ++it) {
    const int c_in = 1 + rng.below(4), c_h = 1 + rng.below(4);
    const Tensor t = random_tensor(rng, c_in, 1 + rng.below(6), 1 + rng.below(6));
    const auto w1 = random_weights(rng, static_cast<std::size_t>(c_h) * c_in);
    const auto w2 = random_weights(rng, static_cast<std::size_t>(c_h) * 9);
    const auto got = ghost_conv(t, w1, w2);
    const auto want = ghost_oracle(t, w1, w2, c_h);
    REQUIRE(got.c == want.c);
    for (std::size_t i = 0; i < got.v.size(); ++i)
      REQUIRE(got.v[i] == doctest::Approx(want.v[i]).epsilon(1e-6));
  }

  CHECK_THROWS_AS(ghost_conv(x, random_weights(rng, 4), random_weights(rng, 9)),
                  std::invalid_argument);  // 4 % 3 != 0
  CHECK_THROWS_AS(ghost_conv(x, primary, random_weights(rng, 17)), std::invalid_argument);
}

TEST_CASE("eca gating: closed forms and the attenuation bound") {
  Rng rng(347);
  const Tensor x = random_tensor(rng, 6, 4, 4);
  const auto halved = eca(x, {0.0, 0.0, 0.0});
  for (std::size_t i = 0; i < x.v.size(); ++i) REQUIRE(halved.v[i] == 0.5 * x.v[i]);
  CHECK(halved.c == x.c);
  CHECK(halved.h == x.h);
  CHECK(halved.w == x.w);

  Tensor cpc(4, 3, 3);
  const double means[4] = {-2.0, -0.5, 0.75, 3.0};
  for (int ci = 0; ci < 4; ++ci)
    for (int y = 0; y < 3; ++y)
      for (int xx = 0; xx < 3; ++xx) cpc.at(ci, y, xx) = means[ci];
  const auto gated = eca(cpc, {0.0, 1.0, 0.0});
  for (int ci = 0; ci < 4; ++ci)
    REQUIRE(gated.at(ci, 1, 1) == doctest::Approx(means[ci] * sig(means[ci])).epsilon(1e-12));

  // Neighbor taps read adjacent channel means with zero padding at the ends.
  const auto shifted = eca(cpc, {1.0, 0.0, 0.0});
  CHECK(shifted.at(0, 0, 0) == doctest::Approx(means[0] * sig(0.0)).epsilon(1e-12));
  CHECK(shifted.at(1, 0, 0) == doctest::Approx(means[1] * sig(means[0])).epsilon(1e-12));

  const auto attn = eca(x, {0.4, -0.3, 0.9});
  for (std::size_t i = 0; i < x.v.size(); ++i) REQUIRE(std::fabs(attn.v[i]) <= std::fabs(x.v[i]));
}

TEST_CASE("ghost-eca is the composition of its stages") {
  Rng rng(353);
  const Tensor x = random_tensor(rng, 3, 4, 4);
  const auto primary = random_weights(rng, 2 * 3);
  const auto cheap = random_weights(rng, 2 * 9);
  const std::array<double, 3> k1d = {0.2, 0.5, -0.4};
  const auto composed = ghost_eca(x, primary, cheap, k1d);
  const auto manual = eca(ghost_conv(x, primary, cheap), k1d);
  CHECK(composed.c == 4);
  REQUIRE(composed.v == manual.v);

  const auto halved = ghost_eca(x, primary, cheap, {0.0, 0.0, 0.0});
  const auto g = ghost_conv(x, primary, cheap);
  for (std::size_t i = 0; i < g.v.size(); ++i) REQUIRE(halved.v[i] == 0.5 * g.v[i]);
}

TEST_CASE("optional biases shift the pre-activation values") {
  Rng rng(359);
  const Tensor x = random_tensor(rng, 3, 4, 4);
  const auto primary = random_weights(rng, 2 * 3);
  const auto cheap = random_weights(rng, 2 * 9);
  const std::vector<double> pbias = {0.7, -0.4};
  const auto plain = ghost_conv(x, primary, cheap, /*rectify=*/false);
  const auto biased = ghost_conv(x, primary, cheap, /*rectify=*/false, pbias);
  for (int ch = 0; ch < 2; ++ch)
    for (int y = 0; y < 4; ++y)
      for (int xx = 0; xx < 4; ++xx)
        REQUIRE(biased.at(ch, y, xx) ==
                doctest::Approx(plain.at(ch, y, xx) + pbias[ch]).epsilon(1e-12));
  CHECK_THROWS_AS(ghost_conv(x, primary, cheap, true, {1.0, 2.0, 3.0}), std::invalid_argument);

  CarafeConfig cfg;
  cfg.sigma = 1;
  cfg.k_up = 1;
  cfg.c_m = 2;
  const auto comp = random_weights(rng, 2 * 3);
  const std::vector<double> enc(2 * 9, 0.0);
  // Zero encoder weights with bias z on the single output channel: every
  // kernel weight becomes sigmoid(z).
  const auto kf = carafe_predict_kernels(x, comp, enc, cfg, {}, {0.3});
  for (double w : kf.wts) REQUIRE(w == doctest::Approx(sig(0.3)).epsilon(1e-12));
  CHECK_THROWS_AS(carafe_predict_kernels(x, comp, enc, cfg, {1.0}, {}), std::invalid_argument);
}

TEST_CASE("parameter counts") {
  CHECK(count_params({ParamSpec::Kind::standard3x3, 64, 64, {}}) == 36864);
  CHECK(count_params({ParamSpec::Kind::ghost, 64, 64, {}}) == 2336);
  CHECK(count_params({ParamSpec::Kind::eca, 1, 1, {}}) == 3);

  CarafeConfig cfg;  // sigma 2, k_up 5, k_encoder 3, c_m 64
  CHECK(count_params({ParamSpec::Kind::carafe, 64, 0, cfg}) == 64 * 64 + 9 * 64 * 4 * 25);

  CHECK_THROWS_AS(count_params({ParamSpec::Kind::ghost, 64, 63, {}}), std::invalid_argument);
  CHECK_THROWS_AS(count_params({ParamSpec::Kind::standard3x3, 0, 8, {}}), std::invalid_argument);

  for (int cin = 2; cin <= 512; cin *= 2)
    for (int cout = 2; cout <= 512; cout *= 2)
      REQUIRE(count_params({ParamSpec::Kind::ghost, cin, cout, {}}) <
              count_params({ParamSpec::Kind::standard3x3, cin, cout, {}}));
}

TEST_CASE("the packaged selftest passes") {
  for (const auto& r : kernels_selftest()) {
    INFO(r.name);
    REQUIRE(r.pass);
  }
}
