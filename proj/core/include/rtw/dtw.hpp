#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "rtw/barycenter.hpp"
#include "rtw/manifold.hpp"
#include "rtw/types.hpp"

namespace rtw {

using PointDistance = std::function<double(ConstVecRef, ConstVecRef)>;

PointDistance geodesic_distance(const Manifold& m);
PointDistance cholesky_point_distance(int dim);

struct DtwResult {
  double cost = 0.0;
  // 0-based index tuples, first (0,...,0), last (T_1-1,...).
  std::vector<std::vector<int>> path;

  double normalized_cost() const { return path.empty() ? 0.0 : cost / static_cast<double>(path.size()); }
};

// Accumulated-cost DTW with steps (1,0), (0,1), (1,1).
DtwResult dtw(const Signal& a, const Signal& b, const PointDistance& dist);

// Cost and path length only, O(T_b) memory.
struct DtwCost {
  double cost = 0.0;
  int path_length = 0;
};
DtwCost dtw_cost(const Signal& a, const Signal& b, const PointDistance& dist);

enum class NodeCost { kGeodesic, kCholesky };

inline constexpr int kMmdMaxSignals = 4;
inline constexpr double kMmdMaxNodes = 1e7;

// DTW over the N-dimensional lattice with moves {0,1}^N \ {0}. The node cost
// is the sum of distances to the node mean (Frechet mean, or the mean of
// Cholesky factors); for N = 2 it is the pairwise distance.
DtwResult mmddtw(const Manifold& m, std::span<const Signal> signals, NodeCost cost = NodeCost::kGeodesic,
                 const MeanConfig& mean_cfg = {});

// Node cost used by mmddtw at one lattice node.
double mmd_node_cost(const Manifold& m, std::span<const Vec> points, NodeCost cost, const MeanConfig& mean_cfg = {});

struct MultiAlignment {
  std::vector<Signal> aligned;  // common length
  Signal mean;
  double cost = 0.0;
};

// Repeats samples so that aligned[n] row k is signals[n] at path[k][n].
std::vector<Signal> expand_along_path(std::span<const Signal> signals, const std::vector<std::vector<int>>& path);

// MMDDTW alignment with the node means as barycenter.
MultiAlignment mmddtw_align(const Manifold& m, std::span<const Signal> signals, NodeCost cost = NodeCost::kGeodesic,
                            const MeanConfig& mean_cfg = {});

// Iterative pairwise DTW: fold the signals into a running reference.
MultiAlignment pairwise_pdtw(const Manifold& m, std::span<const Signal> signals,
                             std::optional<std::uint64_t> shuffle_seed = std::nullopt, const MeanConfig& mean_cfg = {});

}  // namespace rtw
