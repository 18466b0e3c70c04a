#pragma once

#include <vector>

#include "rtw/autodiff.hpp"
#include "rtw/manifold.hpp"
#include "rtw/types.hpp"

namespace rtw {

struct SincConfig {
  int window = 10;        // half-width L; 2L+1 taps
  int refine_iters = 2;   // tangent-base refinements
  double refine_tol = 1e-9;
};

// Taps of one windowed-sinc evaluation. The continuous source position is
// gamma * (T - 1) in 0-based sample units; taps are floor(position) + j for
// j in [-L, L], data indices are the taps clamped to [0, T-1].
struct SincTaps {
  double position = 0.0;
  std::vector<long> taps;
  std::vector<int> indices;
  std::vector<double> weights;
};

SincTaps sinc_weights(double gamma, int t_len, int window);

// Plain windowed sinc interpolation of a Euclidean signal at the warp values
// gamma (clamped to [0,1]). Returns gamma.size() rows.
Signal warp_signal_euclidean(const Signal& x, const Vec& gamma, const SincConfig& cfg = {});

// Quantities held fixed while differentiating one warped signal with respect
// to its warp values: tap positions, tangent bases and the per-tap window
// values (raw coordinates for Euclidean blocks, tangent coordinates at the
// base for curved blocks).
struct WarpStats {
  int source_len = 0;
  Mat taps;                        // Z x (2L+1), unclamped tap positions
  Signal bases;                    // Z x A tangent bases (curved blocks)
  std::vector<Mat> window_values;  // one Z x (2L+1) matrix per ambient column
  Signal warped;                   // Z x A result
  int refinement_violations = 0;   // base displacement grew after iteration 1
  double max_base_step = 0.0;      // last refinement displacement, max over z
};

// Tangent-space windowed sinc interpolation on a manifold with base-point
// refinement. Euclidean blocks use the linear formula directly.
WarpStats prepare_warp(const Manifold& m, const Signal& x, const Vec& gamma, const SincConfig& cfg = {});

Signal warp_signal_riemannian(const Manifold& m, const Signal& x, const Vec& gamma, const SincConfig& cfg = {});

// Re-evaluates the final interpolation pass of prepare_warp on the tape as a
// function of the warp column (Z x 1, clamped to [0,1] inside).
ad::Var warp_on_tape(const Manifold& m, const WarpStats& stats, ad::Var gamma);

}  // namespace rtw
