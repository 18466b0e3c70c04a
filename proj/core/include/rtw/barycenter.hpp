#pragma once

#include <span>
#include <vector>

#include "rtw/manifold.hpp"
#include "rtw/types.hpp"

namespace rtw {

struct MeanConfig {
  int max_iters = 20;
  double tol = 1e-9;       // Riemannian norm of the tangent update
  bool warm_start = true;  // initialize index z from the mean at z-1
};

struct MeanResult {
  Vec point;
  int iterations = 0;
  double residual = 0.0;  // norm of the final averaged tangent
  bool stalled = false;   // max_iters hit with residual in (tol, 100 tol]
};

Vec euclidean_mean(std::span<const Vec> points);

// Gauss-Newton Frechet mean: mu <- exp_mu(mean_n log_mu(x_n)).
MeanResult frechet_mean(const Manifold& m, std::span<const Vec> points, const Vec& init, const MeanConfig& cfg = {});

struct SignalMean {
  Signal mean;
  int max_iterations = 0;
  double max_residual = 0.0;
  int stalled = 0;
};

// Per-index mean of equal-length signals.
SignalMean mean_signal(const Manifold& m, std::span<const Signal> signals, const MeanConfig& cfg = {});

// Norm of mean_n log_mu(x_n) under the metric at mu.
double stationarity_residual(const Manifold& m, std::span<const Vec> points, const Vec& mu);

}  // namespace rtw
