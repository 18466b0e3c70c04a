#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rtw/autodiff.hpp"
#include "rtw/barycenter.hpp"
#include "rtw/loss.hpp"
#include "rtw/manifold.hpp"
#include "rtw/resample.hpp"
#include "rtw/warpnet.hpp"

namespace rtw {

struct AlignConfig {
  int epochs = 256;
  double lr = 0.01;
  double lambda = 100.0;  // monotonicity penalty weight
  int z_factor = 0;       // Z = z_factor * T_max; 0 means min(N, z_factor_cap)
  int z_factor_cap = 8;
  int z_len = 0;          // explicit Z, overrides z_factor when > 0
  std::uint64_t seed = 0;
  WarpKind warp = WarpKind::kMlp;
  WarpModelOptions model;
  SincConfig sinc;
  LossConfig loss;
  MeanConfig mean;
};

struct EpochRecord {
  double data_loss = 0.0;
  double penalty = 0.0;
  double objective = 0.0;  // data_loss + lambda * penalty
};

struct AlignmentResult {
  std::vector<Signal> warped;  // N signals of length Z
  Signal mean;                 // length Z
  Mat gamma;                   // Z x N, column n is gamma_n
  std::vector<EpochRecord> trace;
  int best_epoch = 0;
  double best_objective = 0.0;
  WarpModel model;
  std::map<std::string, double> metrics;
};

int resolve_z_len(const AlignConfig& cfg, int n_signals, int t_max);

AlignmentResult align(const Manifold& m, std::span<const Signal> signals, const AlignConfig& cfg);

// Same pipeline with the sine-basis warp parameterization (N*K parameters).
AlignmentResult align_ttw_mode(const Manifold& m, std::span<const Signal> signals, AlignConfig cfg, int k);

// Statistics recomputed every epoch and treated as constants by the gradient.
struct FrozenState {
  std::vector<WarpStats> stats;
  Signal mean;
};

FrozenState freeze_statistics(const Manifold& m, std::span<const Signal> signals, const WarpModel& model,
                              const Mat& basis, const AlignConfig& cfg);

struct ObjectiveEval {
  double data_loss = 0.0;
  double penalty = 0.0;
  double objective = 0.0;
  std::vector<ad::Tensor> grads;  // one per model parameter tensor
};

// Objective of model.params with the given frozen statistics.
ObjectiveEval evaluate_frozen(const Manifold& m, const WarpModel& model, const Mat& basis, const FrozenState& frozen,
                              const AlignConfig& cfg, bool with_grad);

struct Feasibility {
  bool boundary = false;
  bool monotone = false;
  double max_step = 0.0;   // max forward difference over all rows
  bool continuity = false; // max_step <= (1 + 0.01) / t_max
};

Feasibility check_feasibility(const Mat& gamma, int t_max);

// Clamps to [0,1], enforces monotonicity with a running max and caps forward
// differences at 1/t_max by moving the excess onto steps with slack.
void repair_warp(Mat& gamma, int t_max);

}  // namespace rtw
