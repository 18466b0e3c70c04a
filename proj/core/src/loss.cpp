#include "rtw/loss.hpp"

#include <algorithm>
#include <cmath>

#include "rtw/error.hpp"
#include "rtw/manifold_ad.hpp"

namespace rtw {

namespace {

void check_config(const LossConfig& cfg) {
  if (cfg.window < 0) throw Error(ErrorCode::kBadConfig, "loss window must be >= 0");
  if (cfg.step < 1) throw Error(ErrorCode::kBadConfig, "loss step must be >= 1");
  if (!(cfg.sigma() > 0.0)) throw Error(ErrorCode::kBadConfig, "loss sigma must be positive");
}

int cholesky_dim(const Manifold& m) {
  if (m.kind() != Manifold::Kind::kSpd) {
    throw Error(ErrorCode::kBadConfig, "Cholesky distance is only defined on SPD manifolds");
  }
  return m.dim();
}

}  // namespace

std::vector<SegmentWeight> gaussian_segment_weights(int z, int z_len, const LossConfig& cfg) {
  check_config(cfg);
  if (z < 0 || z >= z_len) throw Error(ErrorCode::kBadConfig, "segment center out of range");
  const double two_sigma2 = 2.0 * cfg.sigma() * cfg.sigma();
  const auto gauss = [two_sigma2](double offset) { return std::exp(-offset * offset / two_sigma2); };
  double denom = 0.0;
  for (int i = -cfg.window; i <= cfg.window; ++i) denom += gauss(static_cast<double>(i * cfg.step));
  std::vector<SegmentWeight> out;
  out.reserve(static_cast<size_t>(2 * cfg.window + 1));
  for (int k = -cfg.window; k <= cfg.window; ++k) {
    const int v = std::clamp(z + k * cfg.step, 0, z_len - 1);
    out.push_back({v, gauss(static_cast<double>(v - z)) / denom});
  }
  return out;
}

Vec aggregated_index_weights(int z_len, const LossConfig& cfg) {
  Vec c = Vec::Zero(z_len);
  for (int z = 0; z < z_len; ++z) {
    for (const auto& sw : gaussian_segment_weights(z, z_len, cfg)) c[sw.index] += sw.weight;
  }
  return c;
}

ad::Var alignment_loss(const Manifold& m, std::span<const ad::Var> warped, const Signal& mean, const LossConfig& cfg) {
  if (warped.empty()) throw Error(ErrorCode::kBadConfig, "loss of zero signals");
  const auto z_len = static_cast<int>(mean.rows());
  ad::Tape& tape = *warped.front().tape();
  const ad::Var weights = tape.constant(aggregated_index_weights(z_len, cfg));
  const Mat targets = mean;
  ad::Var total;
  for (const auto& x : warped) {
    const ad::Var d = cfg.distance == LossDistance::kCholesky
                          ? ad::cholesky_distance_rows(cholesky_dim(m), x, targets)
                          : ad::distance_rows(m, x, targets);
    const ad::Var term = ad::sum(ad::mul(d, weights));
    total = total.valid() ? ad::add(total, term) : term;
  }
  return ad::scale(total, 1.0 / (static_cast<double>(warped.size()) * z_len));
}

double alignment_loss_value(const Manifold& m, std::span<const Signal> warped, const Signal& mean,
                            const LossConfig& cfg) {
  if (warped.empty()) throw Error(ErrorCode::kBadConfig, "loss of zero signals");
  const auto z_len = static_cast<int>(mean.rows());
  const Vec c = aggregated_index_weights(z_len, cfg);
  double total = 0.0;
  for (const auto& x : warped) {
    for (int v = 0; v < z_len; ++v) {
      const double d = cfg.distance == LossDistance::kCholesky
                           ? cholesky_distance(x.row(v).transpose(), mean.row(v).transpose(), cholesky_dim(m))
                           : m.distance(x.row(v).transpose(), mean.row(v).transpose());
      total += c[v] * d;
    }
  }
  return total / (static_cast<double>(warped.size()) * z_len);
}

}  // namespace rtw
