#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "rtw/loss.hpp"
#include "rtw/manifold.hpp"
#include "test_util.hpp"

using namespace rtw;

namespace {

double loss_on_tape(const Manifold& m, const std::vector<Signal>& warped, const Signal& mean, const LossConfig& cfg) {
  ad::Tape tape;
  std::vector<ad::Var> vars;
  for (const auto& s : warped) vars.push_back(tape.leaf(Mat(s)));
  return tape.scalar(alignment_loss(m, vars, mean, cfg));
}

Signal random_s1(std::mt19937_64& rng, int len) {
  Signal s(len, 2);
  for (int z = 0; z < len; ++z) {
    const double a = rtw::testing::uniform(rng, -1.0, 1.0);
    s(z, 0) = std::cos(a);
    s(z, 1) = std::sin(a);
  }
  return s;
}

}  // namespace

TEST_CASE("segment weights") {
  LossConfig point;
  point.window = 0;
  const auto w0 = gaussian_segment_weights(7, 20, point);
  REQUIRE(w0.size() == 1);
  CHECK(w0[0].index == 7);
  CHECK(w0[0].weight == 1.0);

  LossConfig unit;
  unit.window = 1;
  unit.step = 1;
  const auto w1 = gaussian_segment_weights(10, 20, unit);
  REQUIRE(w1.size() == 3);
  const double sigma = 1.0 / 3.0 + 1e-6;
  const double g1 = std::exp(-1.0 / (2 * sigma * sigma));
  CHECK(std::abs(w1[1].weight - 1.0 / (1 + 2 * g1)) < 1e-15);
  CHECK(std::abs(w1[0].weight - g1 / (1 + 2 * g1)) < 1e-15);
  CHECK(std::abs(w1[0].weight + w1[1].weight + w1[2].weight - 1.0) < 1e-15);

  LossConfig fig;
  fig.window = 4;
  fig.step = 5;
  const auto w4 = gaussian_segment_weights(49, 100, fig);
  REQUIRE(w4.size() == 9);
  const double s4 = 20.0 / 3.0 + 1e-6;
  double denom = 0.0;
  for (int k = -4; k <= 4; ++k) denom += std::exp(-(25.0 * k * k) / (2 * s4 * s4));
  for (int k = -4; k <= 4; ++k) {
    const auto& e = w4[static_cast<size_t>(k + 4)];
    CHECK(e.index == 49 + 5 * k);
    CHECK(std::abs(e.weight - std::exp(-(25.0 * k * k) / (2 * s4 * s4)) / denom) < 1e-15);
  }
}

TEST_CASE("weight normalization and clamping") {
  for (int w = 0; w <= 6; ++w) {
    for (int s = 1; s <= 6; ++s) {
      LossConfig cfg;
      cfg.window = w;
      cfg.step = s;
      const int z_len = 80;
      for (int z = 0; z < z_len; ++z) {
        const auto ws = gaussian_segment_weights(z, z_len, cfg);
        double total = 0.0;
        for (const auto& e : ws) {
          CHECK((e.index >= 0 && e.index < z_len));
          total += e.weight;
        }
        if (z - w * s >= 0 && z + w * s < z_len) CHECK(std::abs(total - 1.0) < 1e-12);
      }
    }
  }
}

TEST_CASE("loss examples") {
  std::mt19937_64 rng(1);
  const Manifold s1 = Manifold::sphere(1);
  const Signal mu = random_s1(rng, 30);
  const std::vector<Signal> same{mu, mu, mu};
  CHECK(loss_on_tape(s1, same, mu, LossConfig{}) < 1e-12);
  CHECK(alignment_loss_value(s1, same, mu, LossConfig{}) < 1e-12);

  LossConfig point;
  point.window = 0;
  const Manifold e3 = Manifold::euclidean(3);
  Signal m3(12, 3);
  for (Eigen::Index k = 0; k < m3.size(); ++k) m3.data()[k] = std::normal_distribution<double>()(rng);
  Signal shifted = m3;
  shifted.col(0).array() += 1.0;
  const std::vector<Signal> one{shifted};
  CHECK(std::abs(loss_on_tape(e3, one, m3, point) - 1.0) < 1e-15);
}

TEST_CASE("random S1 instance matches a triple-loop oracle") {
  std::mt19937_64 rng(2);
  const Manifold s1 = Manifold::sphere(1);
  LossConfig cfg;
  cfg.window = 2;
  cfg.step = 3;
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3, z_len = 12;
    std::vector<Signal> warped;
    for (int i = 0; i < n; ++i) warped.push_back(random_s1(rng, z_len));
    const Signal mu = random_s1(rng, z_len);
    const double sigma = cfg.window * cfg.step / 3.0 + cfg.epsilon;
    double oracle = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int z = 0; z < z_len; ++z) {
        double denom = 0.0;
        for (int k = -cfg.window; k <= cfg.window; ++k) {
          const double off = k * cfg.step;
          denom += std::exp(-off * off / (2 * sigma * sigma));
        }
        for (int k = -cfg.window; k <= cfg.window; ++k) {
          const int v = std::clamp(z + k * cfg.step, 0, z_len - 1);
          const double off = v - z;
          const double lam = std::exp(-off * off / (2 * sigma * sigma)) / denom;
          const double d = std::acos(std::clamp(warped[i].row(v).dot(mu.row(v)), -1.0, 1.0));
          oracle += lam * d;
        }
      }
    }
    oracle /= n * z_len;
    CHECK(std::abs(loss_on_tape(s1, warped, mu, cfg) - oracle) < 1e-10);
    CHECK(std::abs(alignment_loss_value(s1, warped, mu, cfg) - oracle) < 1e-10);
  }
}

TEST_CASE("point-to-point reduction") {
  std::mt19937_64 rng(3);
  const Manifold m = Manifold::spd(2);
  LossConfig point;
  point.window = 0;
  std::vector<Signal> warped;
  Signal mu(10, 4);
  for (int z = 0; z < 10; ++z) mu.row(z) = rtw::testing::random_point(m, rng).transpose();
  for (int i = 0; i < 4; ++i) {
    Signal s(10, 4);
    for (int z = 0; z < 10; ++z) s.row(z) = rtw::testing::random_point(m, rng).transpose();
    warped.push_back(s);
  }
  double plain = 0.0;
  for (const auto& s : warped)
    for (int z = 0; z < 10; ++z) plain += m.distance(s.row(z).transpose(), mu.row(z).transpose());
  plain /= 40.0;
  CHECK(std::abs(loss_on_tape(m, warped, mu, point) - plain) < 1e-12);
}

TEST_CASE("loss is non-negative and positive off the mean") {
  std::mt19937_64 rng(4);
  const Manifold s1 = Manifold::sphere(1);
  for (int trial = 0; trial < 20; ++trial) {
    const Signal mu = random_s1(rng, 25);
    Signal off = mu;
    const int z = trial % 25;
    off.row(z) << std::cos(2.0), std::sin(2.0);
    const std::vector<Signal> w{mu, off};
    const double l = loss_on_tape(s1, w, mu, LossConfig{});
    CHECK(l >= 0.0);
    if (mu.row(z).dot(off.row(z)) < 1.0 - 1e-9) CHECK(l > 0.0);
  }
}

TEST_CASE("aggregated weights reproduce the loss") {
  std::mt19937_64 rng(5);
  const Manifold s1 = Manifold::sphere(1);
  LossConfig cfg;
  const Vec wide = aggregated_index_weights(200, cfg);
  for (int v = 50; v < 150; ++v) CHECK(std::abs(wide[v] - 1.0) < 1e-12);
  const Vec c = aggregated_index_weights(40, cfg);
  std::vector<Signal> warped{random_s1(rng, 40), random_s1(rng, 40)};
  const Signal mu = random_s1(rng, 40);
  double direct = 0.0;
  for (const auto& s : warped)
    for (int v = 0; v < 40; ++v) direct += c[v] * s1.distance(s.row(v).transpose(), mu.row(v).transpose());
  CHECK(std::abs(direct / 80.0 - alignment_loss_value(s1, warped, mu, cfg)) < 1e-12);
}

TEST_CASE("cholesky loss distance") {
  std::mt19937_64 rng(6);
  const Manifold m = Manifold::spd(2);
  LossConfig cfg;
  cfg.window = 0;
  cfg.distance = LossDistance::kCholesky;
  Signal mu(6, 4), s(6, 4);
  for (int z = 0; z < 6; ++z) {
    mu.row(z) = rtw::testing::random_point(m, rng).transpose();
    s.row(z) = rtw::testing::random_point(m, rng).transpose();
  }
  double expected = 0.0;
  for (int z = 0; z < 6; ++z) expected += cholesky_distance(s.row(z).transpose(), mu.row(z).transpose(), 2);
  const std::vector<Signal> w{s};
  CHECK(std::abs(loss_on_tape(m, w, mu, cfg) - expected / 6.0) < 1e-12);
}
