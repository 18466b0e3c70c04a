#include "rtw/resample.hpp"

#include <algorithm>
#include <cmath>

#include "rtw/error.hpp"
#include "rtw/manifold_ad.hpp"
#include "rtw/spd.hpp"

namespace rtw {

namespace {

using Index = Eigen::Index;
using Kind = Manifold::Kind;

double source_position(double gamma, int t_len) {
  return std::clamp(gamma, 0.0, 1.0) * static_cast<double>(t_len - 1);
}

long floor_index(double position) { return static_cast<long>(std::floor(position)); }

int clamp_index(long m, int t_len) { return static_cast<int>(std::clamp<long>(m, 0, t_len - 1)); }

void check_inputs(const Signal& x, const Vec& gamma, const SincConfig& cfg) {
  if (x.rows() < 1) throw Error(ErrorCode::kBadConfig, "cannot resample an empty signal");
  if (cfg.window < 0) throw Error(ErrorCode::kBadConfig, "sinc window must be >= 0");
  if (cfg.refine_iters < 0 || cfg.refine_iters > 10) throw Error(ErrorCode::kBadConfig, "refine_iters must be in [0, 10]");
  if (!gamma.allFinite()) throw Error(ErrorCode::kNonFinite, "warp values are not finite");
  if (!x.allFinite()) throw Error(ErrorCode::kNonFinite, "signal has non-finite samples");
}

double block_distance(const Manifold::Block& b, ConstVecRef a, ConstVecRef c) {
  if (b.kind == Kind::kSphere) return sphere::distance(a, c);
  return spd::distance(spd::from_flat(a, b.dim), spd::from_flat(c, b.dim));
}

}  // namespace

SincTaps sinc_weights(double gamma, int t_len, int window) {
  SincTaps out;
  out.position = source_position(gamma, t_len);
  const long f = floor_index(out.position);
  for (long m = f - window; m <= f + window; ++m) {
    out.taps.push_back(m);
    out.indices.push_back(clamp_index(m, t_len));
    out.weights.push_back(ad::sinc_value(static_cast<double>(m) - out.position));
  }
  return out;
}

Signal warp_signal_euclidean(const Signal& x, const Vec& gamma, const SincConfig& cfg) {
  check_inputs(x, gamma, cfg);
  const int t_len = static_cast<int>(x.rows());
  Signal out = Signal::Zero(gamma.size(), x.cols());
  for (Index z = 0; z < gamma.size(); ++z) {
    const double p = source_position(gamma[z], t_len);
    const long f = floor_index(p);
    for (long m = f - cfg.window; m <= f + cfg.window; ++m) {
      out.row(z) += ad::sinc_value(static_cast<double>(m) - p) * x.row(clamp_index(m, t_len));
    }
  }
  return out;
}

WarpStats prepare_warp(const Manifold& m, const Signal& x, const Vec& gamma, const SincConfig& cfg) {
  check_inputs(x, gamma, cfg);
  if (x.cols() != m.ambient_dim()) {
    throw Error(ErrorCode::kManifestMismatch, "signal width does not match the manifold");
  }
  const int t_len = static_cast<int>(x.rows());
  const Index z_len = gamma.size();
  const int k = 2 * cfg.window + 1;
  const int amb = m.ambient_dim();

  WarpStats st;
  st.source_len = t_len;
  st.taps.resize(z_len, k);
  st.bases = Signal::Zero(z_len, amb);
  st.window_values.assign(static_cast<size_t>(amb), Mat(z_len, k));
  st.warped = Signal::Zero(z_len, amb);

  std::vector<double> w(static_cast<size_t>(k));
  std::vector<int> idx(static_cast<size_t>(k));
  Vec base, u, xhat, y;
  std::vector<double> steps;

  for (Index z = 0; z < z_len; ++z) {
    const double p = source_position(gamma[z], t_len);
    const long f = floor_index(p);
    for (int j = 0; j < k; ++j) {
      const long tap = f - cfg.window + j;
      st.taps(z, j) = static_cast<double>(tap);
      idx[static_cast<size_t>(j)] = clamp_index(tap, t_len);
      w[static_cast<size_t>(j)] = ad::sinc_value(static_cast<double>(tap) - p);
    }

    for (const auto& b : m.blocks()) {
      if (b.kind == Kind::kEuclidean) {
        for (int c = 0; c < b.width; ++c) {
          const int col = b.offset + c;
          double acc = 0.0;
          for (int j = 0; j < k; ++j) {
            const double v = x(idx[static_cast<size_t>(j)], col);
            st.window_values[static_cast<size_t>(col)](z, j) = v;
            acc += w[static_cast<size_t>(j)] * v;
          }
          st.warped(z, col) = acc;
        }
        continue;
      }

      base = x.row(clamp_index(f, t_len)).segment(b.offset, b.width).transpose();
      Mat window(k, b.width);
      steps.clear();
      for (int iter = 0;; ++iter) {
        u.setZero(b.width);
        if (b.kind == Kind::kSphere) {
          y.resize(b.width);
          for (int j = 0; j < k; ++j) {
            sphere::log_map(base, x.row(idx[static_cast<size_t>(j)]).segment(b.offset, b.width).transpose(), y);
            window.row(j) = y.transpose();
            u += w[static_cast<size_t>(j)] * y;
          }
          xhat.resize(b.width);
          sphere::exp_map(base, u, xhat);
        } else {
          const spd::Chart chart(spd::from_flat(base, b.dim));
          for (int j = 0; j < k; ++j) {
            const Vec pt = x.row(idx[static_cast<size_t>(j)]).segment(b.offset, b.width).transpose();
            y = spd::to_flat(chart.log(spd::from_flat(pt, b.dim)));
            window.row(j) = y.transpose();
            u += w[static_cast<size_t>(j)] * y;
          }
          xhat = spd::to_flat(chart.exp(spd::from_flat(u, b.dim)));
        }
        if (iter == cfg.refine_iters) break;
        const double moved = block_distance(b, base, xhat);
        steps.push_back(moved);
        if (moved < cfg.refine_tol) break;
        base = xhat;
      }
      for (size_t s = 1; s < steps.size(); ++s) {
        if (steps[s] > steps[s - 1] * (1.0 + 1e-9) + 1e-15) ++st.refinement_violations;
      }
      if (!steps.empty()) st.max_base_step = std::max(st.max_base_step, steps.back());
      st.bases.row(z).segment(b.offset, b.width) = base.transpose();
      for (int c = 0; c < b.width; ++c) {
        st.window_values[static_cast<size_t>(b.offset + c)].row(z) = window.col(c).transpose();
      }
      st.warped.row(z).segment(b.offset, b.width) = xhat.transpose();
    }
  }
  if (!st.warped.allFinite()) throw Error(ErrorCode::kNonFinite, "interpolated signal is not finite");
  return st;
}

Signal warp_signal_riemannian(const Manifold& m, const Signal& x, const Vec& gamma, const SincConfig& cfg) {
  return prepare_warp(m, x, gamma, cfg).warped;
}

ad::Var warp_on_tape(const Manifold& m, const WarpStats& stats, ad::Var gamma) {
  ad::Tape& tape = *gamma.tape();
  if (gamma.cols() != 1 || gamma.rows() != stats.taps.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "warp_on_tape expects a Z x 1 warp column");
  }
  const ad::Var pos = ad::scale(ad::clamp(gamma, 0.0, 1.0), static_cast<double>(stats.source_len - 1));
  const ad::Var weights = ad::sinc(ad::sub(tape.constant(stats.taps), pos));

  std::vector<ad::Var> blocks;
  for (const auto& b : m.blocks()) {
    std::vector<ad::Var> cols;
    for (int c = 0; c < b.width; ++c) {
      const ad::Var vals = tape.constant(stats.window_values[static_cast<size_t>(b.offset + c)]);
      cols.push_back(ad::row_sum(ad::mul(weights, vals)));
    }
    const ad::Var u = cols.size() == 1 ? cols.front() : ad::concat_cols(cols);
    const Mat base = stats.bases.middleCols(b.offset, b.width);
    switch (b.kind) {
      case Kind::kEuclidean: blocks.push_back(u); break;
      case Kind::kSphere: blocks.push_back(ad::sphere_exp_rows(base, u)); break;
      case Kind::kSpd: blocks.push_back(ad::spd_exp_rows(b.dim, base, u)); break;
      case Kind::kProduct: break;
    }
  }
  return blocks.size() == 1 ? blocks.front() : ad::concat_cols(blocks);
}

}  // namespace rtw
