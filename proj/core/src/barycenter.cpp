#include "rtw/barycenter.hpp"

#include "rtw/error.hpp"

namespace rtw {

Vec euclidean_mean(std::span<const Vec> points) {
  if (points.empty()) throw Error(ErrorCode::kBadConfig, "mean of zero points");
  Vec acc = Vec::Zero(points.front().size());
  for (const auto& p : points) acc += p;
  return acc / static_cast<double>(points.size());
}

double stationarity_residual(const Manifold& m, std::span<const Vec> points, const Vec& mu) {
  Vec acc = Vec::Zero(m.ambient_dim());
  Vec tmp(m.ambient_dim());
  for (const auto& p : points) {
    m.log_map(mu, p, tmp);
    acc += tmp;
  }
  acc /= static_cast<double>(points.size());
  return m.tangent_norm(mu, acc);
}

MeanResult frechet_mean(const Manifold& m, std::span<const Vec> points, const Vec& init, const MeanConfig& cfg) {
  if (points.empty()) throw Error(ErrorCode::kBadConfig, "mean of zero points");
  if (cfg.max_iters < 1) throw Error(ErrorCode::kBadConfig, "max_iters must be >= 1");
  MeanResult res;
  if (m.is_flat()) {
    res.point = euclidean_mean(points);
    res.iterations = 1;
    return res;
  }
  const auto n = static_cast<double>(points.size());
  Vec mu = init;
  Vec acc(m.ambient_dim());
  Vec tmp(m.ambient_dim());
  for (int it = 0; it < cfg.max_iters; ++it) {
    acc.setZero();
    for (const auto& p : points) {
      m.log_map(mu, p, tmp);
      acc += tmp;
    }
    acc /= n;
    res.residual = m.tangent_norm(mu, acc);
    res.iterations = it + 1;
    if (res.residual < cfg.tol) {
      res.point = res.residual > 0.0 ? m.exp_map(mu, acc) : mu;
      return res;
    }
    mu = m.exp_map(mu, acc);
  }
  res.residual = stationarity_residual(m, points, mu);
  res.point = mu;
  if (res.residual >= cfg.tol) {
    if (res.residual > 100.0 * cfg.tol) {
      throw Error(ErrorCode::kNoConvergence,
                  "Frechet mean did not converge (residual " + std::to_string(res.residual) + ")");
    }
    res.stalled = true;
  }
  return res;
}

SignalMean mean_signal(const Manifold& m, std::span<const Signal> signals, const MeanConfig& cfg) {
  if (signals.empty()) throw Error(ErrorCode::kBadConfig, "mean of zero signals");
  const auto z_len = signals.front().rows();
  for (const auto& s : signals) {
    if (s.rows() != z_len || s.cols() != m.ambient_dim()) {
      throw Error(ErrorCode::kShapeMismatch, "mean_signal expects equal-length signals on one manifold");
    }
  }
  SignalMean out;
  out.mean.resize(z_len, m.ambient_dim());
  std::vector<Vec> pts(signals.size());
  Vec init;
  for (Eigen::Index z = 0; z < z_len; ++z) {
    for (size_t n = 0; n < signals.size(); ++n) pts[n] = signals[n].row(z).transpose();
    if (z == 0 || !cfg.warm_start) init = pts.front();
    const MeanResult r = frechet_mean(m, pts, init, cfg);
    out.mean.row(z) = r.point.transpose();
    out.max_iterations = std::max(out.max_iterations, r.iterations);
    out.max_residual = std::max(out.max_residual, r.residual);
    out.stalled += r.stalled ? 1 : 0;
    init = r.point;
  }
  return out;
}

}  // namespace rtw
