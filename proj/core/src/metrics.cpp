#include "rtw/metrics.hpp"

#include "rtw/error.hpp"
#include "rtw/resample.hpp"
#include "rtw/warpnet.hpp"

namespace rtw {

Signal resample_length(const Manifold& m, const Signal& x, int len) {
  if (x.rows() == len) return x;
  return warp_signal_riemannian(m, x, warp_grid(len));
}

Metric dtw_metric(const Manifold& m, std::span<const Signal> signals, const Signal& reference,
                  const MetricOptions& opts) {
  Metric r;
  if (signals.empty()) return r;
  const PointDistance dist = geodesic_distance(m);
  Signal up_ref;
  for (const auto& s : signals) {
    DtwCost c;
    if (!opts.common_length || s.rows() == reference.rows()) {
      c = dtw_cost(s, reference, dist);
    } else if (s.rows() < reference.rows()) {
      c = dtw_cost(resample_length(m, s, static_cast<int>(reference.rows())), reference, dist);
    } else {
      if (up_ref.rows() != s.rows()) up_ref = resample_length(m, reference, static_cast<int>(s.rows()));
      c = dtw_cost(s, up_ref, dist);
    }
    r.costs.push_back(c.cost);
    r.path_lengths.push_back(c.path_length);
    r.raw += c.cost;
    r.per_step += c.cost / c.path_length;
  }
  const double n = static_cast<double>(signals.size());
  r.per_signal = r.raw / n;
  r.per_step /= n;
  return r;
}

Classification nearest_centroid_classify(const Manifold& m, std::span<const Signal> test,
                                         std::span<const int> labels, std::span<const Signal> centroids) {
  if (centroids.empty()) throw Error(ErrorCode::kBadConfig, "classification needs at least one centroid");
  if (!labels.empty() && labels.size() != test.size()) {
    throw Error(ErrorCode::kShapeMismatch, "label count differs from test signal count");
  }
  const PointDistance dist = geodesic_distance(m);
  Classification out;
  int correct = 0;
  for (size_t i = 0; i < test.size(); ++i) {
    int best = 0;
    double best_cost = dtw_cost(test[i], centroids[0], dist).cost;
    for (size_t c = 1; c < centroids.size(); ++c) {
      const double cost = dtw_cost(test[i], centroids[c], dist).cost;
      if (cost < best_cost) {
        best_cost = cost;
        best = static_cast<int>(c);
      }
    }
    out.predicted.push_back(best);
    if (!labels.empty() && labels[i] == best) ++correct;
  }
  if (!labels.empty() && !test.empty()) out.accuracy = static_cast<double>(correct) / static_cast<double>(test.size());
  return out;
}

}  // namespace rtw
