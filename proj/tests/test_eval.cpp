#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "rtw/barycenter.hpp"
#include "rtw/datasets.hpp"
#include "rtw/dtw.hpp"
#include "rtw/error.hpp"
#include "rtw/metrics.hpp"
#include "rtw/stats.hpp"

using namespace rtw;

namespace {

Signal random_s1(std::mt19937_64& rng, int len) {
  Signal s(len, 2);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int t = 0; t < len; ++t) {
    const double a = u(rng);
    s(t, 0) = std::cos(a);
    s(t, 1) = std::sin(a);
  }
  return s;
}

}  // namespace

TEST_CASE("metrics vanish on degenerate inputs") {
  const Manifold m = Manifold::sphere(1);
  const Signal base = s1_base_signal(60);
  const std::vector<Signal> one{base};
  const Metric r = restoration_accuracy(m, one, base);
  CHECK(r.raw < 1e-10);
  CHECK(r.per_signal < 1e-10);
  CHECK(r.per_step < 1e-10);
  const std::vector<Signal> three{base, base, base};
  CHECK(alignment_quality(m, three, base).raw < 1e-10);
  CHECK(barycenter_loss(m, one, mean_signal(m, one).mean).raw < 1e-10);
}

TEST_CASE("metrics match direct dtw recomputation") {
  std::mt19937_64 rng(1);
  const Manifold m = Manifold::sphere(1);
  const PointDistance d = geodesic_distance(m);
  for (int trial = 0; trial < 20; ++trial) {
    const Signal ref = random_s1(rng, 15);
    std::vector<Signal> sig;
    for (int n = 0; n < 4; ++n) sig.push_back(random_s1(rng, 15));
    const Metric met = dtw_metric(m, sig, ref);
    double raw = 0.0, per_step = 0.0;
    for (size_t n = 0; n < sig.size(); ++n) {
      const DtwResult r = dtw(sig[n], ref, d);
      CHECK(met.costs[n] == r.cost);
      CHECK(met.path_lengths[n] == static_cast<int>(r.path.size()));
      raw += r.cost;
      per_step += r.cost / static_cast<double>(r.path.size());
    }
    CHECK(std::abs(met.raw - raw) < 1e-12);
    CHECK(std::abs(met.per_signal - raw / 4.0) < 1e-12);
    CHECK(std::abs(met.per_step - per_step / 4.0) < 1e-12);

    const std::vector<Signal> single{sig[0]};
    CHECK(restoration_accuracy(m, single, ref).raw == dtw(sig[0], ref, d).cost);

    std::vector<Signal> perm = sig;
    std::reverse(perm.begin(), perm.end());
    CHECK(std::abs(dtw_metric(m, perm, ref).raw - met.raw) < 1e-12);
  }
}

TEST_CASE("common-length resampling") {
  const Manifold m = Manifold::sphere(1);
  const Signal long_ref = s1_base_signal(100);
  const std::vector<Signal> short_sig{s1_base_signal(50)};
  MetricOptions raw_lengths;
  raw_lengths.common_length = false;
  const Metric plain = dtw_metric(m, short_sig, long_ref, raw_lengths);
  CHECK(plain.path_lengths[0] >= 100);
  const Metric common = dtw_metric(m, short_sig, long_ref);
  const Signal up = resample_length(m, short_sig[0], 100);
  CHECK(up.rows() == 100);
  CHECK(common.costs[0] == dtw_cost(up, long_ref, geodesic_distance(m)).cost);
  CHECK(resample_length(m, long_ref, 100) == long_ref);
}

TEST_CASE("nearest centroid classification") {
  const Manifold e1 = Manifold::euclidean(1);
  std::mt19937_64 rng(2);
  std::vector<Signal> centroids;
  for (int c = 0; c < 3; ++c) {
    Signal s(20, 1);
    for (int t = 0; t < 20; ++t) s(t, 0) = std::normal_distribution<double>()(rng);
    centroids.push_back(s);
  }
  const std::vector<int> labels{2, 0, 1};
  const std::vector<Signal> test{centroids[2], centroids[0], centroids[1]};
  const Classification exact = nearest_centroid_classify(e1, test, labels, centroids);
  CHECK(exact.predicted == labels);
  CHECK(exact.accuracy == 1.0);

  const std::vector<Signal> lone{centroids[0]};
  const std::vector<int> zeros{0, 0, 0};
  CHECK(nearest_centroid_classify(e1, test, zeros, lone).accuracy == 1.0);

  const std::vector<Signal> twins{centroids[1], centroids[1]};
  const std::vector<Signal> probe{centroids[0]};
  CHECK(nearest_centroid_classify(e1, probe, {}, twins).predicted == std::vector<int>{0});

  CHECK_THROWS_AS(nearest_centroid_classify(e1, test, labels, std::vector<Signal>{}), Error);
}

TEST_CASE("two-class synthetic set is separable with per-index means") {
  const Manifold e1 = Manifold::euclidean(1);
  const ClassificationData d = two_class_dataset(80, 10, 10, 3);
  std::vector<Signal> centroids;
  for (int c = 0; c < 2; ++c) {
    std::vector<Signal> members;
    for (size_t i = 0; i < d.train.signals.size(); ++i)
      if (d.train.labels[i] == c) members.push_back(d.train.signals[i]);
    centroids.push_back(mean_signal(e1, members).mean);
  }
  const Classification r = nearest_centroid_classify(e1, d.test.signals, d.test.labels, centroids);
  MESSAGE("accuracy " << r.accuracy);
  CHECK(r.accuracy >= 0.9);
}

TEST_CASE("paired t-test") {
  const std::vector<double> a{0.81, 0.64, 0.92, 0.77, 0.85, 0.70, 0.88, 0.79, 0.91, 0.66};
  const std::vector<double> b{0.72, 0.66, 0.80, 0.69, 0.71, 0.68, 0.80, 0.73, 0.83, 0.69};
  // 50-digit reference values for these vectors.
  const double t_ref = 3.505069380716502113269;
  const double p_ref = 0.006670125521353665796725;
  const TTestResult r = paired_t_test(a, b);
  CHECK(std::abs(r.t - t_ref) < 1e-9);
  CHECK(std::abs(r.p - p_ref) < 1e-9);
  CHECK(r.df == 9);
  CHECK(r.significant);
  CHECK(r.direction == 1);
  CHECK(!r.degenerate);

  const TTestResult s = paired_t_test(b, a);
  CHECK(std::abs(s.t + r.t) < 1e-12);
  CHECK(std::abs(s.p - r.p) < 1e-12);
  CHECK(s.direction == -1);

  const TTestResult same = paired_t_test(a, a);
  CHECK(same.p == 1.0);
  CHECK(!same.significant);
  CHECK(same.degenerate);

  std::vector<double> shifted = b;
  for (double& x : shifted) x += 1.0;
  const TTestResult c = paired_t_test(shifted, b);
  CHECK(c.degenerate);
  CHECK(c.significant);
  CHECK(c.p == 0.0);
  CHECK(std::isinf(c.t));
  CHECK(c.t > 0);

  CHECK_THROWS_AS(paired_t_test(std::vector<double>{1.0}, std::vector<double>{2.0}), Error);
  CHECK_THROWS_AS(paired_t_test(a, std::vector<double>{1.0, 2.0}), Error);
}

TEST_CASE("student t tail") {
  CHECK(std::abs(student_t_two_sided_p(0.0, 5) - 1.0) < 1e-15);
  // df = 1 is Cauchy: p = 1 - 2 atan(t) / pi.
  for (double t : {0.5, 1.0, 3.0, 20.0})
    CHECK(std::abs(student_t_two_sided_p(t, 1) - (1.0 - 2.0 * std::atan(t) / std::numbers::pi)) < 1e-13);
  // df = 2: p = 1 - t / sqrt(2 + t^2).
  for (double t : {0.5, 1.0, 3.0}) CHECK(std::abs(student_t_two_sided_p(t, 2) - (1.0 - t / std::sqrt(2 + t * t))) < 1e-13);
}
