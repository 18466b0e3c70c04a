#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "gradcheck.hpp"
#include "oracles.hpp"
#include "rtw/align.hpp"
#include "rtw/barycenter.hpp"
#include "rtw/datasets.hpp"
#include "rtw/dtw.hpp"
#include "rtw/metrics.hpp"
#include "rtw/spd.hpp"
#include "test_util.hpp"

using namespace rtw;
using namespace rtw::testing;

namespace {

constexpr double kPi = std::numbers::pi;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

int failures = 0;

void report(int id, bool pass, const std::string& detail, double seconds) {
  if (!pass) ++failures;
  std::printf("criterion %2d: %s  %s (%.1f s)\n", id, pass ? "PASS" : "FAIL", detail.c_str(), seconds);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

struct FeasibilityLog {
  int runs = 0;
  int bad = 0;
  double worst_ratio = 0.0;  // max_step * t_max

  void add(const Mat& gamma, int t_max) {
    const Feasibility f = check_feasibility(gamma, t_max);
    ++runs;
    if (!(f.boundary && f.monotone && f.continuity)) ++bad;
    worst_ratio = std::max(worst_ratio, f.max_step * t_max);
  }
};

FeasibilityLog feasibility;

Signal random_s1(std::mt19937_64& rng, int len) {
  Signal s(len, 2);
  for (int t = 0; t < len; ++t) {
    const double a = uniform(rng, -2.0, 2.0);
    s(t, 0) = std::cos(a);
    s(t, 1) = std::sin(a);
  }
  return s;
}

// 1. Geometry over 1000 random cases per family.
void criterion_geometry() {
  Stopwatch sw;
  struct Family {
    Manifold m;
    double radius;
  };
  const std::vector<Family> families{
      {Manifold::euclidean(3), 5.0},  {Manifold::sphere(1), 0.9 * kPi}, {Manifold::sphere(2), 0.9 * kPi},
      {Manifold::sphere(3), 0.9 * kPi}, {Manifold::spd(2), 2.0},       {Manifold::spd(3), 2.0},
      {Manifold::spd(5), 2.0},        {Manifold::pose3d(), 0.9 * kPi},
      {Manifold::product({Manifold::sphere(2), Manifold::spd(2), Manifold::euclidean(2)}), 0.9 * kPi},
  };
  double roundtrip = 0.0, norm_gap = 0.0, affine = 0.0;
  int non_tangent = 0;
  for (const auto& f : families) {
    std::mt19937_64 rng(101);
    for (int i = 0; i < 1000; ++i) {
      const Vec p = random_point(f.m, rng);
      const Vec x = f.m.exp_map(p, random_tangent(f.m, p, rng, f.radius));
      const Vec u = f.m.log_map(p, x);
      roundtrip = std::max(roundtrip, f.m.distance(f.m.exp_map(p, u), x));
      norm_gap = std::max(norm_gap, std::abs(f.m.tangent_norm(p, u) - f.m.distance(p, x)));
      if (!f.m.contains(x) || !f.m.is_tangent(p, u)) ++non_tangent;
    }
  }
  std::mt19937_64 rng(102);
  for (int dim : {2, 3, 4}) {
    const Manifold m = Manifold::spd(dim);
    for (int i = 0; i < 1000; ++i) {
      const Mat a = random_spd(rng, dim);
      const Mat b = random_spd(rng, dim);
      Mat w = random_sym(rng, dim) + 2.0 * Mat::Identity(dim, dim);
      w(0, dim - 1) += 0.5;
      const double d0 = m.distance(spd::to_flat(a), spd::to_flat(b));
      const double d1 = m.distance(spd::to_flat(spd::symmetrize(w.transpose() * a * w)),
                                   spd::to_flat(spd::symmetrize(w.transpose() * b * w)));
      affine = std::max(affine, std::abs(d0 - d1));
    }
  }
  const bool pass = roundtrip < 1e-8 && norm_gap < 1e-8 && affine < 1e-6 && non_tangent == 0;
  report(1, pass,
         "roundtrip " + fmt("%.2e", roundtrip) + ", |log| vs dist " + fmt("%.2e", norm_gap) + ", affine " +
             fmt("%.2e", affine) + ", invariant misses " + std::to_string(non_tangent),
         sw.seconds());
}

// 2. Autodiff and the frozen objective against central differences.
void criterion_gradients() {
  Stopwatch sw;
  double expr = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) expr = std::max(expr, random_expression_fd_error(seed));
  const int t_len = 20;
  Signal e(t_len, 1);
  for (int t = 0; t < t_len; ++t) e(t, 0) = std::sin(0.4 * t);
  const auto euclid = inverted_warp_dataset(Manifold::euclidean(1), e, 2, 5).set.signals;
  const auto sphere = inverted_warp_dataset(Manifold::sphere(1), s1_base_signal(t_len), 2, 5).set.signals;
  double objective = 0.0, objective_abs = 0.0;
  int retries = 0, coords = 0;
  for (std::uint64_t seed : {1, 2, 3}) {
    for (const auto& [m, sig] : {std::pair{Manifold::euclidean(1), euclid}, std::pair{Manifold::sphere(1), sphere}}) {
      const FdReport r = fd_check(m, sig, seed);
      objective = std::max(objective, r.worst);
      objective_abs = std::max(objective_abs, r.worst_abs);
      retries += r.kink_retries;
      coords += r.coords;
    }
  }
  const bool pass = expr < 1e-3 && objective < 1e-3 && retries * 50 <= coords;
  report(2, pass,
         "expressions " + fmt("%.2e", expr) + ", objective " + fmt("%.2e", objective) + " (abs " + fmt("%.1e", objective_abs) + "), kink re-checks " +
             std::to_string(retries) + "/" + std::to_string(coords),
         sw.seconds());
}

// 3. DTW and MMDDTW against exhaustive enumeration.
void criterion_dtw() {
  Stopwatch sw;
  std::mt19937_64 rng(103);
  const Manifold s1 = Manifold::sphere(1);
  const Manifold e2 = Manifold::euclidean(2);
  int exact_misses = 0;
  for (int inst = 0; inst < 200; ++inst) {
    const int la = 1 + static_cast<int>(rng() % 6);
    const int lb = 1 + static_cast<int>(rng() % 6);
    const bool sphere = inst % 2 == 0;
    Signal a = random_s1(rng, la), b = random_s1(rng, lb);
    if (!sphere) {
      a = Signal(la, 2);
      b = Signal(lb, 2);
      for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = std::normal_distribution<double>()(rng);
      for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = std::normal_distribution<double>()(rng);
    }
    const PointDistance d = geodesic_distance(sphere ? s1 : e2);
    if (dtw(a, b, d).cost != enumerate_paths(cost_matrix(a, b, d))) ++exact_misses;
  }
  double pair_gap = 0.0;
  for (int inst = 0; inst < 50; ++inst) {
    const std::vector<Signal> two{random_s1(rng, 2 + inst % 9), random_s1(rng, 2 + inst % 6)};
    pair_gap = std::max(pair_gap, std::abs(mmddtw(s1, two).cost - dtw(two[0], two[1], geodesic_distance(s1)).cost));
  }
  double lattice_gap = 0.0;
  for (int inst = 0; inst < 3; ++inst) {
    const std::vector<Signal> three{random_s1(rng, 5), random_s1(rng, 5), random_s1(rng, 5)};
    lattice_gap = std::max(lattice_gap, std::abs(mmddtw(s1, three).cost -
                                                 enumerate_lattice(s1, three, NodeCost::kGeodesic).best));
  }
  const bool pass = exact_misses == 0 && pair_gap < 1e-12 && lattice_gap < 1e-12;
  report(3, pass,
         "path misses " + std::to_string(exact_misses) + "/200, N=2 gap " + fmt("%.1e", pair_gap) +
             ", lattice gap " + fmt("%.1e", lattice_gap),
         sw.seconds());
}

// 4. Frechet means: stationarity on generated data and the S^2 grid oracle.
void criterion_frechet() {
  Stopwatch sw;
  Signal xy(60, 2);
  for (int t = 0; t < 60; ++t) {
    xy(t, 0) = std::cos(0.1 * t) * (0.5 + 0.01 * t);
    xy(t, 1) = std::sin(0.13 * t);
  }
  const std::vector<std::pair<Manifold, std::vector<Signal>>> cases{
      {Manifold::sphere(1), inverted_warp_dataset(Manifold::sphere(1), s1_base_signal(100), 30, 3).set.signals},
      {Manifold::sphere(2), inverted_warp_dataset(Manifold::sphere(2), lift_planar_to_sphere(xy, 0.8), 10, 4).set.signals},
      {Manifold::spd(2), robot_manipulability_dataset(5, 50, 5).set.signals},
  };
  double residual = 0.0;
  for (const auto& [m, signals] : cases) {
    const SignalMean sm = mean_signal(m, signals);
    for (Eigen::Index z = 0; z < sm.mean.rows(); ++z) {
      std::vector<Vec> pts;
      for (const auto& s : signals) pts.push_back(s.row(z).transpose());
      residual = std::max(residual, stationarity_residual(m, pts, sm.mean.row(z).transpose()));
    }
  }
  const Manifold s2 = Manifold::sphere(2);
  std::mt19937_64 rng(104);
  double oracle_gap = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    const Vec c = random_sphere_point(rng, 2);
    std::vector<Vec> pts;
    for (int i = 0; i < 5; ++i) pts.push_back(s2.exp_map(c, random_tangent(s2, c, rng, 0.5)));
    oracle_gap = std::max(oracle_gap, s2.distance(frechet_mean(s2, pts, pts[0]).point, grid_search_mean(pts, c)));
  }
  report(4, residual < 1e-8 && oracle_gap < 1e-4,
         "max residual " + fmt("%.2e", residual) + ", S2 oracle gap " + fmt("%.2e", oracle_gap), sw.seconds());
}

struct Outcome {
  bool pass = false;
  std::string detail;
  std::vector<double> values;  // every metric value, for the determinism rerun
};

// 5. S^1 inverted warping, N=4, T=100, 20 seeds: RTW vs the sine-basis aligner.
Outcome experiment_s1_n4(bool log_feasibility) {
  const Manifold m = Manifold::sphere(1);
  const int t_len = 100;
  const Signal base = s1_base_signal(t_len);
  Outcome out;
  int joint_wins = 0;
  double restoration = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto d = inverted_warp_dataset(m, base, 4, seed);
    AlignConfig cfg;
    cfg.seed = seed;
    cfg.epochs = 1024;
    const AlignmentResult r = align(m, d.set.signals, cfg);
    const AlignmentResult t = align_ttw_mode(m, d.set.signals, cfg, 5);
    if (log_feasibility) {
      feasibility.add(r.gamma, t_len);
      feasibility.add(t.gamma, t_len);
    }
    const double ra = restoration_accuracy(m, r.warped, base).per_step;
    const double ta = restoration_accuracy(m, t.warped, base).per_step;
    const double rb = barycenter_loss(m, d.set.signals, r.mean).per_step;
    const double tb = barycenter_loss(m, d.set.signals, t.mean).per_step;
    const double rq = alignment_quality(m, r.warped, r.mean).per_step;
    const double tq = alignment_quality(m, t.warped, t.mean).per_step;
    joint_wins += ra < ta && rb < tb && rq < tq;
    restoration += ra;
    out.values.insert(out.values.end(), {ra, ta, rb, tb, rq, tq, r.best_objective, t.best_objective});
  }
  restoration /= 20.0;
  out.pass = restoration < 0.05 && joint_wins >= 15;
  out.detail = "mean restoration " + fmt("%.4f", restoration) + " (< 0.05), RTW wins all three metrics on " +
               std::to_string(joint_wins) + "/20 seeds (>= 15)";
  return out;
}

// 6. S^1 inverted warping, N=30, T=100, 5 seeds: RTW vs p-DTW alignment quality.
Outcome experiment_s1_n30(bool log_feasibility) {
  const Manifold m = Manifold::sphere(1);
  const int t_len = 100;
  const Signal base = s1_base_signal(t_len);
  Outcome out;
  int wins = 0;
  std::string pairs;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto d = inverted_warp_dataset(m, base, 30, seed);
    AlignConfig cfg;
    cfg.seed = seed;
    const AlignmentResult r = align(m, d.set.signals, cfg);
    if (log_feasibility) feasibility.add(r.gamma, t_len);
    const MultiAlignment p = pairwise_pdtw(m, d.set.signals);
    const double rq = alignment_quality(m, r.warped, r.mean).per_step;
    const double pq = alignment_quality(m, p.aligned, p.mean).per_step;
    wins += rq < pq;
    pairs += (seed ? ", " : "") + fmt("%.4f", rq) + "/" + fmt("%.4f", pq);
    out.values.insert(out.values.end(), {rq, pq, r.best_objective});
  }
  out.pass = wins == 5;
  out.detail = "RTW below p-DTW on " + std::to_string(wins) + "/5 seeds (RTW/p-DTW: " + pairs + ")";
  return out;
}

// 7. SPD(2) manipulability, N=3, T=50, 5 seeds: RTW vs both MMDDTW variants.
Outcome experiment_spd(bool log_feasibility) {
  const Manifold m = Manifold::spd(2);
  const int t_len = 50;
  Outcome out;
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto d = robot_manipulability_dataset(3, t_len, seed);
    AlignConfig cfg;
    cfg.seed = seed;
    const AlignmentResult r = align(m, d.set.signals, cfg);
    if (log_feasibility) feasibility.add(r.gamma, t_len);
    const MultiAlignment g = mmddtw_align(m, d.set.signals, NodeCost::kGeodesic);
    const MultiAlignment c = mmddtw_align(m, d.set.signals, NodeCost::kCholesky);
    const double rq = alignment_quality(m, r.warped, r.mean).per_step;
    const double gq = alignment_quality(m, g.aligned, g.mean).per_step;
    const double cq = alignment_quality(m, c.aligned, c.mean).per_step;
    const double rb = barycenter_loss(m, d.set.signals, r.mean).per_step;
    const double gb = barycenter_loss(m, d.set.signals, g.mean).per_step;
    const double cb = barycenter_loss(m, d.set.signals, c.mean).per_step;
    wins += rq < gq && rq < cq && rb < gb && rb < cb;
    out.values.insert(out.values.end(), {rq, gq, cq, rb, gb, cb, r.best_objective});
  }
  out.pass = wins >= 4;
  out.detail = "RTW below both MMDDTW variants on both metrics on " + std::to_string(wins) + "/5 seeds (>= 4)";
  return out;
}

// 9. Nearest-centroid classification with RTW centroids vs per-index means.
void criterion_classification() {
  Stopwatch sw;
  const Manifold m = Manifold::euclidean(1);
  const int t_len = 80;
  const ClassificationData d = two_class_dataset(t_len, 10, 10, 1);
  std::vector<Signal> rtw_centroids, naive_centroids;
  for (int c = 0; c < 2; ++c) {
    std::vector<Signal> members;
    for (size_t i = 0; i < d.train.signals.size(); ++i)
      if (d.train.labels[i] == c) members.push_back(d.train.signals[i]);
    naive_centroids.push_back(mean_signal(m, members).mean);
    AlignConfig cfg;
    cfg.seed = 1;
    const AlignmentResult r = align(m, members, cfg);
    feasibility.add(r.gamma, t_len);
    rtw_centroids.push_back(resample_length(m, r.mean, t_len));
  }
  const double rtw_acc = nearest_centroid_classify(m, d.test.signals, d.test.labels, rtw_centroids).accuracy;
  const double naive_acc = nearest_centroid_classify(m, d.test.signals, d.test.labels, naive_centroids).accuracy;
  report(9, rtw_acc >= naive_acc && rtw_acc >= 0.9,
         "RTW centroids " + fmt("%.3f", rtw_acc) + ", per-index means " + fmt("%.3f", naive_acc) + " on " +
             std::to_string(d.test.signals.size()) + " test signals",
         sw.seconds());
}

}  // namespace

int main() {
  criterion_geometry();
  criterion_gradients();
  criterion_dtw();
  criterion_frechet();

  Stopwatch sw5;
  const Outcome o5 = experiment_s1_n4(true);
  report(5, o5.pass, o5.detail, sw5.seconds());
  Stopwatch sw6;
  const Outcome o6 = experiment_s1_n30(true);
  report(6, o6.pass, o6.detail, sw6.seconds());
  Stopwatch sw7;
  const Outcome o7 = experiment_spd(true);
  report(7, o7.pass, o7.detail, sw7.seconds());

  // Criterion 8 also covers the classification runs, so 9 goes first.
  Stopwatch sw9;
  criterion_classification();
  report(8, feasibility.bad == 0,
         std::to_string(feasibility.runs - feasibility.bad) + "/" + std::to_string(feasibility.runs) +
             " warp matrices feasible, max step " + fmt("%.4f", feasibility.worst_ratio) + "/T_max",
         sw9.seconds());

  Stopwatch sw10;
  const Outcome r5 = experiment_s1_n4(false);
  const Outcome r6 = experiment_s1_n30(false);
  const Outcome r7 = experiment_spd(false);
  const bool same = r5.values == o5.values && r6.values == o6.values && r7.values == o7.values;
  report(10, same,
         std::to_string(o5.values.size() + o6.values.size() + o7.values.size()) + " metric values " +
             (same ? "bit-identical" : "differ") + " on rerun",
         sw10.seconds());

  std::printf("%d of 10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
