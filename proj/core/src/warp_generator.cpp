#include "rtw/warp_generator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "rtw/error.hpp"
#include "rtw/warpnet.hpp"

namespace rtw {

namespace {

bool feasible(const Vec& g, int t_max) {
  const Eigen::Index z_len = g.size();
  if (g[0] != 0.0 || g[z_len - 1] != 1.0) return false;
  const double cap = 1.0 / t_max;
  for (Eigen::Index z = 0; z + 1 < z_len; ++z) {
    const double d = g[z + 1] - g[z];
    if (!(d >= 0.0) || d > cap) return false;
  }
  return true;
}

Vec draw(WarpFamily family, const Vec& grid, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Eigen::Index z_len = grid.size();
  Vec g(z_len);
  switch (family) {
    case WarpFamily::kNtw: {
      const double c = -2.0 + 4.0 * unit(rng);
      for (Eigen::Index z = 0; z < z_len; ++z) g[z] = grid[z] + c * grid[z] * (1.0 - grid[z]);
      break;
    }
    case WarpFamily::kTtw: {
      const int k = std::uniform_int_distribution<int>(1, 5)(rng);
      Vec alpha(k);
      for (int i = 0; i < k; ++i) alpha[i] = -0.1 + 0.2 * unit(rng);
      for (Eigen::Index z = 0; z < z_len; ++z) {
        double v = grid[z];
        for (int i = 0; i < k; ++i) v += alpha[i] * std::sin(std::numbers::pi * (i + 1) * grid[z]);
        g[z] = v;
      }
      break;
    }
    case WarpFamily::kSpline: {
      const int n_ctrl = std::uniform_int_distribution<int>(4, 8)(rng);
      const int degree = std::uniform_int_distribution<int>(2, 3)(rng);
      Vec ctrl(n_ctrl);
      ctrl[0] = 0.0;
      ctrl[n_ctrl - 1] = 1.0;
      for (int i = 1; i + 1 < n_ctrl; ++i) ctrl[i] = unit(rng);
      std::sort(ctrl.data() + 1, ctrl.data() + n_ctrl - 1);
      for (Eigen::Index z = 0; z < z_len; ++z) g[z] = clamped_bspline(ctrl, degree, grid[z]);
      break;
    }
    case WarpFamily::kMixed:
      break;
  }
  g[0] = 0.0;
  g[z_len - 1] = 1.0;
  return g;
}

}  // namespace

WarpFamily parse_warp_family(std::string_view text) {
  if (text == "ntw") return WarpFamily::kNtw;
  if (text == "ttw") return WarpFamily::kTtw;
  if (text == "spline") return WarpFamily::kSpline;
  if (text == "mixed") return WarpFamily::kMixed;
  throw Error(ErrorCode::kBadConfig, "unknown warp family '" + std::string(text) + "'");
}

std::string to_string(WarpFamily family) {
  switch (family) {
    case WarpFamily::kNtw: return "ntw";
    case WarpFamily::kTtw: return "ttw";
    case WarpFamily::kSpline: return "spline";
    case WarpFamily::kMixed: return "mixed";
  }
  return "?";
}

double clamped_bspline(const Vec& control, int degree, double u) {
  const int n = static_cast<int>(control.size());
  if (degree < 1 || n < degree + 1) throw Error(ErrorCode::kBadConfig, "B-spline needs at least degree+1 controls");
  u = std::clamp(u, 0.0, 1.0);
  if (u >= 1.0) return control[n - 1];
  // Clamped uniform knot vector of length n + degree + 1.
  const int spans = n - degree;
  std::vector<double> knots(static_cast<size_t>(n + degree + 1));
  for (int i = 0; i < n + degree + 1; ++i) {
    const int k = std::clamp(i - degree, 0, spans);
    knots[static_cast<size_t>(i)] = static_cast<double>(k) / spans;
  }
  int span = degree + std::min(static_cast<int>(u * spans), spans - 1);
  // de Boor
  std::vector<double> d(static_cast<size_t>(degree + 1));
  for (int j = 0; j <= degree; ++j) d[static_cast<size_t>(j)] = control[j + span - degree];
  for (int r = 1; r <= degree; ++r) {
    for (int j = degree; j >= r; --j) {
      const int i = j + span - degree;
      const double lo = knots[static_cast<size_t>(i)];
      const double hi = knots[static_cast<size_t>(i + degree + 1 - r)];
      const double a = (u - lo) / (hi - lo);
      d[static_cast<size_t>(j)] = (1.0 - a) * d[static_cast<size_t>(j - 1)] + a * d[static_cast<size_t>(j)];
    }
  }
  return d[static_cast<size_t>(degree)];
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Vec generate_random_warp(int z_len, int t_max, std::uint64_t seed, WarpFamily family) {
  if (t_max < 1 || z_len < 2) throw Error(ErrorCode::kBadConfig, "warp generator needs Z >= 2 and T_max >= 1");
  if (z_len < t_max) throw Error(ErrorCode::kBadConfig, "warp generator needs Z >= T_max");
  const Vec grid = warp_grid(z_len);
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < kMaxWarpAttempts; ++attempt) {
    WarpFamily f = family;
    if (f == WarpFamily::kMixed) f = static_cast<WarpFamily>(std::uniform_int_distribution<int>(0, 2)(rng));
    Vec g = draw(f, grid, rng);
    if (feasible(g, t_max)) return g;
  }
  throw Error(ErrorCode::kRejectionExhausted, "no feasible " + to_string(family) + " warp after " +
                                                  std::to_string(kMaxWarpAttempts) + " attempts (Z=" +
                                                  std::to_string(z_len) + ", T_max=" + std::to_string(t_max) + ")");
}

}  // namespace rtw
