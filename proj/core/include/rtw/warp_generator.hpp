#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "rtw/types.hpp"

namespace rtw {

enum class WarpFamily {
  kNtw,     // z + c z (1 - z), c ~ U[-2, 2]
  kTtw,     // z + sum_k alpha_k sin(pi k z), K ~ U{1..5}, alpha ~ U[-0.1, 0.1]
  kSpline,  // clamped B-spline through 4-8 sorted control values, degree 2-3
  kMixed,   // one of the above, chosen uniformly per draw
};

WarpFamily parse_warp_family(std::string_view text);
std::string to_string(WarpFamily family);

inline constexpr int kMaxWarpAttempts = 10000;

// Random warp on the grid z_hat = (z-1)/(Z-1) satisfying boundary, monotone
// and max-step <= 1/t_max constraints. Throws RejectionExhausted.
Vec generate_random_warp(int z_len, int t_max, std::uint64_t seed, WarpFamily family);

// Value of a clamped B-spline with the given control values and degree.
double clamped_bspline(const Vec& control, int degree, double u);

// Deterministic stream splitting for per-signal seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace rtw
