#pragma once

#include <span>
#include <vector>

#include "rtw/autodiff.hpp"
#include "rtw/manifold.hpp"
#include "rtw/types.hpp"

namespace rtw {

enum class LossDistance { kGeodesic, kCholesky };

struct LossConfig {
  int window = 5;  // W: extra indices on each side of z
  int step = 5;    // s: spacing between segment indices
  double epsilon = 1e-6;
  LossDistance distance = LossDistance::kGeodesic;

  double sigma() const { return window * step / 3.0 + epsilon; }
};

struct SegmentWeight {
  int index;  // 0-based, clamped to [0, Z-1]
  double weight;
};

// The 2W+1 (index, weight) pairs of the segment around 0-based index z. The
// Gaussian is centered at z and normalized over the unclamped offsets, so the
// weights sum to one away from the boundaries.
std::vector<SegmentWeight> gaussian_segment_weights(int z, int z_len, const LossConfig& cfg);

// c[v] = sum over z and k of the weight that segment z assigns to index v.
// The window loss equals sum_n sum_v c[v] dist(x_n[v], mu[v]) / (N Z).
Vec aggregated_index_weights(int z_len, const LossConfig& cfg);

// Window loss with the mean held fixed; warped are Z x A tape variables.
ad::Var alignment_loss(const Manifold& m, std::span<const ad::Var> warped, const Signal& mean, const LossConfig& cfg);

double alignment_loss_value(const Manifold& m, std::span<const Signal> warped, const Signal& mean,
                            const LossConfig& cfg);

}  // namespace rtw
