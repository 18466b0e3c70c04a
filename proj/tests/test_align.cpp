#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "rtw/align.hpp"
#include "rtw/datasets.hpp"
#include "rtw/error.hpp"
#include "rtw/metrics.hpp"
#include "gradcheck.hpp"

using namespace rtw;

namespace {

Signal ramp(int t_len) {
  Signal x(t_len, 1);
  for (int t = 0; t < t_len; ++t) x(t, 0) = static_cast<double>(t) / t_len;
  return x;
}

// Ramp plus the same ramp pushed through a smooth warp.
std::vector<Signal> ramp_pair(int t_len) {
  const Signal base = ramp(t_len);
  Vec g(t_len);
  for (int t = 0; t < t_len; ++t) {
    const double u = static_cast<double>(t) / (t_len - 1);
    g[t] = u + 0.6 * u * (1 - u) * (u - 0.2);
  }
  return {base, warp_signal_euclidean(base, g)};
}

using rtw::testing::fd_check;
using rtw::testing::FdReport;

void check_fd(const Manifold& m, const std::vector<Signal>& signals, std::uint64_t seed) {
  const FdReport rep = fd_check(m, signals, seed);
  CAPTURE(m.to_string());
  CAPTURE(rep.kink_retries);
  CHECK(rep.worst < 1e-3);
  CHECK(rep.kink_retries * 50 <= rep.coords);
}

}  // namespace

TEST_CASE("z length resolution") {
  AlignConfig cfg;
  CHECK(resolve_z_len(cfg, 4, 100) == 400);
  CHECK(resolve_z_len(cfg, 30, 100) == 800);
  cfg.z_factor = 2;
  CHECK(resolve_z_len(cfg, 30, 100) == 200);
  cfg.z_len = 150;
  CHECK(resolve_z_len(cfg, 30, 100) == 150);
}

TEST_CASE("frozen objective gradient matches central differences") {
  const int t_len = 20;
  Signal e(t_len, 1);
  for (int t = 0; t < t_len; ++t) e(t, 0) = std::sin(0.4 * t);
  const auto euclid = inverted_warp_dataset(Manifold::euclidean(1), e, 2, 5).set.signals;
  const auto sphere = inverted_warp_dataset(Manifold::sphere(1), s1_base_signal(t_len), 2, 5).set.signals;
  for (std::uint64_t seed : {1, 2, 3}) {
    CAPTURE(seed);
    check_fd(Manifold::euclidean(1), euclid, seed);
    check_fd(Manifold::sphere(1), sphere, seed);
  }
}

TEST_CASE("frozen objective gradient on curved manifolds with three signals") {
  const auto s2 = inverted_warp_dataset(
      Manifold::sphere(2),
      lift_planar_to_sphere(
          [] {
            Signal xy(20, 2);
            for (int t = 0; t < 20; ++t) {
              xy(t, 0) = std::cos(0.3 * t);
              xy(t, 1) = std::sin(0.2 * t);
            }
            return xy;
          }(),
          0.5),
      3, 5);
  check_fd(Manifold::sphere(2), s2.set.signals, 4);
  const auto spd = robot_manipulability_dataset(3, 20, 3);
  check_fd(Manifold::spd(2), spd.set.signals, 4);
}

TEST_CASE("identical copies stay at the identity") {
  const Manifold m = Manifold::sphere(1);
  const Signal base = s1_base_signal(40);
  const std::vector<Signal> copies{base, base, base};
  AlignConfig cfg;
  cfg.epochs = 64;
  cfg.seed = 3;
  const AlignmentResult r = align(m, copies, cfg);
  CHECK(std::abs(r.best_objective - r.trace.front().objective) < 1e-6);
  const Vec grid = warp_grid(static_cast<int>(r.gamma.rows()));
  for (int n = 0; n < 3; ++n) CHECK((r.gamma.col(n) - grid).cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("ramp pair alignment improves fourfold") {
  const Manifold m = Manifold::euclidean(1);
  const auto pair = ramp_pair(50);
  const Signal before_mean = mean_signal(m, pair).mean;
  const double before = alignment_quality(m, pair, before_mean).per_step;
  AlignConfig cfg;
  cfg.seed = 1;
  const AlignmentResult r = align(m, pair, cfg);
  const double after = alignment_quality(m, r.warped, r.mean).per_step;
  MESSAGE("alignment quality before " << before << " after " << after);
  CHECK(after < 0.25 * before);

  const AlignmentResult t = align_ttw_mode(m, pair, cfg, 5);
  const double ttw = alignment_quality(m, t.warped, t.mean).per_step;
  MESSAGE("sine-basis alignment quality " << ttw);
  CHECK(ttw < before);
}

TEST_CASE("K = 0 keeps identity warps") {
  const Manifold m = Manifold::sphere(1);
  const auto d = inverted_warp_dataset(m, s1_base_signal(30), 3, 2);
  AlignConfig cfg;
  cfg.epochs = 8;
  const AlignmentResult r = align_ttw_mode(m, d.set.signals, cfg, 0);
  const Vec grid = warp_grid(static_cast<int>(r.gamma.rows()));
  for (int n = 0; n < 3; ++n) CHECK(r.gamma.col(n) == grid);
  CHECK(r.model.parameter_count() == 0);
}

TEST_CASE("determinism and best-objective tracking") {
  const Manifold m = Manifold::sphere(1);
  const auto d = inverted_warp_dataset(m, s1_base_signal(40), 3, 9);
  AlignConfig cfg;
  cfg.epochs = 40;
  cfg.seed = 17;
  const AlignmentResult a = align(m, d.set.signals, cfg);
  const AlignmentResult b = align(m, d.set.signals, cfg);
  REQUIRE(a.trace.size() == b.trace.size());
  for (size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].objective == b.trace[i].objective);
    CHECK(a.trace[i].penalty == b.trace[i].penalty);
  }
  CHECK(a.gamma == b.gamma);
  CHECK(a.mean == b.mean);
  CHECK(a.best_objective <= a.trace.front().objective);
  double min_obj = a.trace.front().objective;
  for (const auto& e : a.trace) min_obj = std::min(min_obj, e.objective);
  CHECK(a.best_objective == min_obj);
  CHECK(a.trace[static_cast<size_t>(a.best_epoch)].objective == a.best_objective);
}

TEST_CASE("outputs are feasible and on the manifold") {
  const Manifold m = Manifold::spd(2);
  const auto d = robot_manipulability_dataset(3, 25, 4);
  AlignConfig cfg;
  cfg.epochs = 30;
  const AlignmentResult r = align(m, d.set.signals, cfg);
  const Feasibility f = check_feasibility(r.gamma, 25);
  CHECK(f.boundary);
  CHECK(f.monotone);
  CHECK(f.continuity);
  for (const auto& s : r.warped)
    for (Eigen::Index z = 0; z < s.rows(); ++z) CHECK(m.contains(s.row(z).transpose()));
  for (Eigen::Index z = 0; z < r.mean.rows(); ++z) CHECK(m.contains(r.mean.row(z).transpose()));
}

TEST_CASE("repair produces feasible warps") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int z_len = 20 + trial;
    const int t_max = 5 + trial % (z_len - 5);
    Mat g(z_len, 3);
    const Vec grid = warp_grid(z_len);
    for (int n = 0; n < 3; ++n)
      for (int z = 0; z < z_len; ++z) g(z, n) = grid[z] + std::normal_distribution<double>(0.0, 0.05)(rng);
    repair_warp(g, t_max);
    const Feasibility f = check_feasibility(g, t_max);
    CHECK(f.boundary);
    CHECK(f.monotone);
    CHECK(f.max_step <= 1.0 / t_max + 1e-12);
    CHECK(g.minCoeff() >= 0.0);
    CHECK(g.maxCoeff() <= 1.0);
  }
  Mat ok = warp_grid(60).replicate(1, 2);
  const Mat copy = ok;
  repair_warp(ok, 30);
  CHECK(ok == copy);
}

TEST_CASE("config errors") {
  const Manifold m = Manifold::sphere(1);
  const std::vector<Signal> one{s1_base_signal(20)};
  AlignConfig cfg;
  try {
    align(m, one, cfg);
    FAIL("expected BadConfig");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kBadConfig);
  }
  const std::vector<Signal> mismatch{s1_base_signal(20), Signal::Ones(20, 3)};
  CHECK_THROWS_AS(align(m, mismatch, cfg), Error);
  cfg.epochs = 0;
  const std::vector<Signal> two{s1_base_signal(20), s1_base_signal(20)};
  CHECK_THROWS_AS(align(m, two, cfg), Error);
  cfg.epochs = 5;
  cfg.z_len = 10;
  CHECK_THROWS_AS(align(m, two, cfg), Error);
}
