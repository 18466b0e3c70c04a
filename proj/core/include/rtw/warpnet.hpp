#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rtw/autodiff.hpp"
#include "rtw/types.hpp"

namespace rtw {

enum class WarpKind { kMlp, kSineBasis };

// How the MLP feeds its output layer.
//   kDenseConcat: output layer reads [z, h1, ..., hk] (1-512-512-1025 layout)
//   kNone:        output layer reads the last hidden layer only
enum class SkipMode { kDenseConcat, kNone };

struct WarpModelOptions {
  std::vector<int> hidden = {32, 32};
  SkipMode skip = SkipMode::kDenseConcat;
  int sine_k = 5;
  int t_max = 0;  // longest input signal; 0 skips the Z >= T_max check
  // Hidden weights are Xavier-uniform; first-layer biases put each ReLU kink
  // at a uniform point of [0,1]. A zero output layer starts every warp at the
  // identity.
  bool zero_output = true;
};

// Parameters of all N warping functions, evaluated on the grid
// z_hat = (z - 1) / (Z - 1), z = 1..Z.
struct WarpModel {
  WarpKind kind = WarpKind::kMlp;
  int n_signals = 0;
  int z_len = 0;
  std::uint64_t seed = 0;
  std::vector<int> hidden;
  SkipMode skip = SkipMode::kDenseConcat;
  int sine_k = 0;

  // kMlp: W1, b1, ..., Wk, bk, Wout, bout with row-vector convention
  //       (h = x W + b). kSineBasis: alpha with shape K x N.
  std::vector<ad::Tensor> params;

  // Widths from input to output, e.g. 1-32-32-65-(N-1).
  std::vector<int> layer_sizes() const;
  size_t parameter_count() const;
  Vec flat_params() const;
  void set_flat_params(const Vec& flat);
};

// Orthonormal basis of R^N as columns, first column (1,...,1)/sqrt(N). The
// remaining columns come from Gram-Schmidt on the standard basis with the
// first nonzero entry of each vector made positive.
Mat make_basis(int n);

WarpModel init_model(WarpKind kind, int n_signals, int z_len, std::uint64_t seed,
                     const WarpModelOptions& options = {});

// Normalized grid (z-1)/(Z-1) as a Z x 1 column.
Vec warp_grid(int z_len);

// Records the warp evaluation on the tape. params must be tape variables
// holding model.params (leaves when gradients are wanted). Returns a Z x N
// matrix whose column n is gamma_n.
ad::Var eval_warp(const WarpModel& model, const Mat& basis, ad::Tape& tape, std::span<const ad::Var> params);

// Convenience evaluation without gradients.
Mat eval_warp_values(const WarpModel& model, const Mat& basis);

// Sum over signals and z of max(gamma[z] - gamma[z+1], 0) for a Z x N warp.
ad::Var monotonicity_penalty(ad::Var gamma);
double monotonicity_penalty_value(const Mat& gamma);

std::string to_string(WarpKind kind);

// JSON checkpoint: {kind, N, Z, layer_sizes, seed, params}.
std::string model_to_json(const WarpModel& model);
WarpModel model_from_json(const std::string& text);

}  // namespace rtw
