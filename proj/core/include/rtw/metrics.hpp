#pragma once

#include <span>
#include <vector>

#include "rtw/dtw.hpp"
#include "rtw/manifold.hpp"
#include "rtw/types.hpp"

namespace rtw {

// One DTW-based metric over N signals.
//   raw:        sum_n D_dtw
//   per_signal: raw / N
//   per_step:   mean_n D_dtw / path_length_n
struct Metric {
  double raw = 0.0;
  double per_signal = 0.0;
  double per_step = 0.0;
  std::vector<double> costs;
  std::vector<int> path_lengths;
};

struct MetricOptions {
  // Sinc-resample the shorter of each (signal, reference) pair to the longer
  // length before DTW.
  bool common_length = true;
};

// Each signal against one reference with geodesic per-point cost.
Metric dtw_metric(const Manifold& m, std::span<const Signal> signals, const Signal& reference,
                  const MetricOptions& opts = {});

inline Metric restoration_accuracy(const Manifold& m, std::span<const Signal> warped, const Signal& original,
                                   const MetricOptions& opts = {}) {
  return dtw_metric(m, warped, original, opts);
}
inline Metric barycenter_loss(const Manifold& m, std::span<const Signal> originals, const Signal& mean,
                              const MetricOptions& opts = {}) {
  return dtw_metric(m, originals, mean, opts);
}
inline Metric alignment_quality(const Manifold& m, std::span<const Signal> warped, const Signal& mean,
                                const MetricOptions& opts = {}) {
  return dtw_metric(m, warped, mean, opts);
}

// Identity-warp sinc resampling of x to length len.
Signal resample_length(const Manifold& m, const Signal& x, int len);

struct MetricsReport {
  Metric restoration;  // empty when no ground-truth original exists
  Metric barycenter;
  Metric alignment;
  double runtime_seconds = 0.0;
};

struct Classification {
  std::vector<int> predicted;
  double accuracy = 0.0;
};

// argmin_c D_dtw(x, centroid_c); ties go to the lowest class id. Centroid c
// has class id c.
Classification nearest_centroid_classify(const Manifold& m, std::span<const Signal> test,
                                         std::span<const int> labels, std::span<const Signal> centroids);

}  // namespace rtw
