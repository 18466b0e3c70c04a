#include "rtw/dtw.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Cholesky>

#include "rtw/error.hpp"
#include "rtw/spd.hpp"

namespace rtw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Mat cost_matrix(const Signal& a, const Signal& b, const PointDistance& dist) {
  Mat c(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const Vec ai = a.row(i).transpose();
    for (Eigen::Index j = 0; j < b.rows(); ++j) c(i, j) = dist(ai, b.row(j).transpose());
  }
  return c;
}

void require_nonempty(const Signal& s) {
  if (s.rows() < 1) throw Error(ErrorCode::kBadConfig, "dtw: empty signal");
}

Mat lower_factor(const Vec& p, int dim) {
  const Mat a = spd::from_flat(p, dim);
  Eigen::LLT<Mat> llt(a);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::kNotSpd, "Cholesky factorization failed");
  return llt.matrixL();
}

Vec cholesky_mean(std::span<const Vec> points, int dim, std::vector<Mat>* factors) {
  Mat acc = Mat::Zero(dim, dim);
  for (const auto& p : points) {
    Mat l = lower_factor(p, dim);
    acc += l;
    if (factors) factors->push_back(std::move(l));
  }
  acc /= static_cast<double>(points.size());
  return spd::to_flat(acc * acc.transpose());
}

void check_cholesky(const Manifold& m) {
  if (m.kind() != Manifold::Kind::kSpd) throw Error(ErrorCode::kBadConfig, "Cholesky node cost needs an SPD manifold");
}

}  // namespace

PointDistance geodesic_distance(const Manifold& m) {
  return [m](ConstVecRef a, ConstVecRef b) { return m.distance(a, b); };
}

PointDistance cholesky_point_distance(int dim) {
  return [dim](ConstVecRef a, ConstVecRef b) { return cholesky_distance(a, b, dim); };
}

DtwResult dtw(const Signal& a, const Signal& b, const PointDistance& dist) {
  require_nonempty(a);
  require_nonempty(b);
  const Eigen::Index ta = a.rows();
  const Eigen::Index tb = b.rows();
  const Mat c = cost_matrix(a, b, dist);
  Mat d(ta, tb);
  for (Eigen::Index i = 0; i < ta; ++i) {
    for (Eigen::Index j = 0; j < tb; ++j) {
      double best = 0.0;
      if (i > 0 || j > 0) {
        best = kInf;
        if (i > 0 && j > 0) best = d(i - 1, j - 1);
        if (i > 0) best = std::min(best, d(i - 1, j));
        if (j > 0) best = std::min(best, d(i, j - 1));
      }
      d(i, j) = c(i, j) + best;
    }
  }
  DtwResult r;
  r.cost = d(ta - 1, tb - 1);
  Eigen::Index i = ta - 1;
  Eigen::Index j = tb - 1;
  r.path.push_back({static_cast<int>(i), static_cast<int>(j)});
  while (i > 0 || j > 0) {
    if (i == 0) {
      --j;
    } else if (j == 0) {
      --i;
    } else {
      const double diag = d(i - 1, j - 1);
      const double up = d(i - 1, j);
      const double left = d(i, j - 1);
      if (diag <= up && diag <= left) {
        --i;
        --j;
      } else if (up <= left) {
        --i;
      } else {
        --j;
      }
    }
    r.path.push_back({static_cast<int>(i), static_cast<int>(j)});
  }
  std::reverse(r.path.begin(), r.path.end());
  return r;
}

DtwCost dtw_cost(const Signal& a, const Signal& b, const PointDistance& dist) {
  require_nonempty(a);
  require_nonempty(b);
  const Eigen::Index tb = b.rows();
  std::vector<double> prev(static_cast<size_t>(tb)), cur(static_cast<size_t>(tb));
  std::vector<int> prev_len(static_cast<size_t>(tb)), cur_len(static_cast<size_t>(tb));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const Vec ai = a.row(i).transpose();
    for (Eigen::Index j = 0; j < tb; ++j) {
      const auto uj = static_cast<size_t>(j);
      const double c = dist(ai, b.row(j).transpose());
      if (i == 0 && j == 0) {
        cur[uj] = c;
        cur_len[uj] = 1;
        continue;
      }
      // Same preference order as the path backtrack in dtw().
      double best = kInf;
      int len = 0;
      if (i > 0 && j > 0) {
        best = prev[uj - 1];
        len = prev_len[uj - 1];
      }
      if (i > 0 && prev[uj] < best) {
        best = prev[uj];
        len = prev_len[uj];
      }
      if (j > 0 && cur[uj - 1] < best) {
        best = cur[uj - 1];
        len = cur_len[uj - 1];
      }
      cur[uj] = c + best;
      cur_len[uj] = len + 1;
    }
    std::swap(prev, cur);
    std::swap(prev_len, cur_len);
  }
  return {prev.back(), prev_len.back()};
}

double mmd_node_cost(const Manifold& m, std::span<const Vec> points, NodeCost cost, const MeanConfig& mean_cfg) {
  if (cost == NodeCost::kCholesky) {
    check_cholesky(m);
    if (points.size() == 2) return cholesky_distance(points[0], points[1], m.dim());
    std::vector<Mat> factors;
    const Vec mu = cholesky_mean(points, m.dim(), &factors);
    const Mat lbar = lower_factor(mu, m.dim());
    double s = 0.0;
    for (const auto& l : factors) s += (l - lbar).norm();
    return s;
  }
  if (points.size() == 2) return m.distance(points[0], points[1]);
  const MeanResult mu = frechet_mean(m, points, points[0], mean_cfg);
  double s = 0.0;
  for (const auto& p : points) s += m.distance(p, mu.point);
  return s;
}

DtwResult mmddtw(const Manifold& m, std::span<const Signal> signals, NodeCost cost, const MeanConfig& mean_cfg) {
  const int n = static_cast<int>(signals.size());
  if (n < 2) throw Error(ErrorCode::kBadConfig, "mmddtw needs at least two signals");
  if (n > kMmdMaxSignals) {
    throw Error(ErrorCode::kTooLarge, "mmddtw supports at most " + std::to_string(kMmdMaxSignals) + " signals, got " +
                                          std::to_string(n));
  }
  if (cost == NodeCost::kCholesky) check_cholesky(m);
  double nodes = 1.0;
  for (const auto& s : signals) {
    require_nonempty(s);
    nodes *= static_cast<double>(s.rows());
  }
  if (nodes > kMmdMaxNodes) {
    throw Error(ErrorCode::kTooLarge, "mmddtw lattice has " + std::to_string(static_cast<long long>(nodes)) +
                                          " nodes (limit 1e7)");
  }
  const auto total = static_cast<size_t>(nodes);
  std::vector<size_t> len(static_cast<size_t>(n)), stride(static_cast<size_t>(n));
  size_t acc = 1;
  for (int k = n - 1; k >= 0; --k) {
    const auto uk = static_cast<size_t>(k);
    len[uk] = static_cast<size_t>(signals[uk].rows());
    stride[uk] = acc;
    acc *= len[uk];
  }
  const int moves = (1 << n) - 1;

  std::vector<double> d(total, kInf);
  std::vector<std::uint8_t> from(total, 0);
  std::vector<size_t> idx(static_cast<size_t>(n), 0);
  std::vector<Vec> pts(static_cast<size_t>(n));
  for (size_t lin = 0; lin < total; ++lin) {
    for (int k = 0; k < n; ++k) {
      const auto uk = static_cast<size_t>(k);
      pts[uk] = signals[uk].row(static_cast<Eigen::Index>(idx[uk])).transpose();
    }
    const double c = mmd_node_cost(m, pts, cost, mean_cfg);
    if (lin == 0) {
      d[0] = c;
    } else {
      // Move bits: bit k set means index k advanced by one. Full move first so
      // that N = 2 ties resolve like dtw().
      double best = kInf;
      std::uint8_t arg = 0;
      for (int mv = moves; mv >= 1; --mv) {
        size_t prev = lin;
        bool ok = true;
        for (int k = 0; k < n && ok; ++k) {
          if (mv & (1 << k)) {
            const auto uk = static_cast<size_t>(k);
            if (idx[uk] == 0) ok = false;
            else prev -= stride[uk];
          }
        }
        if (ok && d[prev] < best) {
          best = d[prev];
          arg = static_cast<std::uint8_t>(mv);
        }
      }
      d[lin] = c + best;
      from[lin] = arg;
    }
    for (int k = n - 1; k >= 0; --k) {
      const auto uk = static_cast<size_t>(k);
      if (++idx[uk] < len[uk]) break;
      idx[uk] = 0;
    }
  }

  DtwResult r;
  r.cost = d[total - 1];
  std::vector<int> cur(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) cur[static_cast<size_t>(k)] = static_cast<int>(len[static_cast<size_t>(k)]) - 1;
  size_t lin = total - 1;
  r.path.push_back(cur);
  while (lin != 0) {
    const int mv = from[lin];
    for (int k = 0; k < n; ++k) {
      if (mv & (1 << k)) {
        --cur[static_cast<size_t>(k)];
        lin -= stride[static_cast<size_t>(k)];
      }
    }
    r.path.push_back(cur);
  }
  std::reverse(r.path.begin(), r.path.end());
  return r;
}

std::vector<Signal> expand_along_path(std::span<const Signal> signals, const std::vector<std::vector<int>>& path) {
  std::vector<Signal> out;
  out.reserve(signals.size());
  for (size_t n = 0; n < signals.size(); ++n) {
    Signal s(static_cast<Eigen::Index>(path.size()), signals[n].cols());
    for (size_t k = 0; k < path.size(); ++k) {
      s.row(static_cast<Eigen::Index>(k)) = signals[n].row(path[k][n]);
    }
    out.push_back(std::move(s));
  }
  return out;
}

MultiAlignment mmddtw_align(const Manifold& m, std::span<const Signal> signals, NodeCost cost,
                            const MeanConfig& mean_cfg) {
  const DtwResult r = mmddtw(m, signals, cost, mean_cfg);
  MultiAlignment out;
  out.cost = r.cost;
  out.aligned = expand_along_path(signals, r.path);
  if (cost == NodeCost::kCholesky) {
    out.mean.resize(static_cast<Eigen::Index>(r.path.size()), m.ambient_dim());
    std::vector<Vec> pts(signals.size());
    for (Eigen::Index k = 0; k < out.mean.rows(); ++k) {
      for (size_t n = 0; n < signals.size(); ++n) pts[n] = out.aligned[n].row(k).transpose();
      out.mean.row(k) = cholesky_mean(pts, m.dim(), nullptr).transpose();
    }
  } else {
    out.mean = mean_signal(m, out.aligned, mean_cfg).mean;
  }
  return out;
}

MultiAlignment pairwise_pdtw(const Manifold& m, std::span<const Signal> signals,
                             std::optional<std::uint64_t> shuffle_seed, const MeanConfig& mean_cfg) {
  const size_t n = signals.size();
  if (n < 2) throw Error(ErrorCode::kBadConfig, "p-DTW needs at least two signals");
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  if (shuffle_seed) {
    std::mt19937_64 rng(*shuffle_seed);
    for (size_t i = n - 1; i > 0; --i) {
      std::uniform_int_distribution<size_t> pick(0, i);
      std::swap(order[i], order[pick(rng)]);
    }
  }
  const PointDistance dist = geodesic_distance(m);
  std::vector<Signal> aligned(n);
  std::vector<size_t> done{order[0]};
  aligned[order[0]] = signals[order[0]];
  Signal ref = signals[order[0]];
  MultiAlignment out;
  Vec u(m.ambient_dim());
  Vec p(m.ambient_dim());
  for (size_t k = 1; k < n; ++k) {
    const Signal& x = signals[order[k]];
    const DtwResult r = dtw(ref, x, dist);
    out.cost += r.cost;
    const auto len = static_cast<Eigen::Index>(r.path.size());
    for (size_t prev : done) {
      Signal s(len, aligned[prev].cols());
      for (Eigen::Index q = 0; q < len; ++q) s.row(q) = aligned[prev].row(r.path[static_cast<size_t>(q)][0]);
      aligned[prev] = std::move(s);
    }
    Signal xs(len, x.cols());
    Signal next(len, ref.cols());
    const double w = 1.0 / static_cast<double>(k + 1);
    for (Eigen::Index q = 0; q < len; ++q) {
      const auto& step = r.path[static_cast<size_t>(q)];
      xs.row(q) = x.row(step[1]);
      const Vec base = ref.row(step[0]).transpose();
      m.log_map(base, xs.row(q).transpose(), u);
      m.exp_map(base, w * u, p);
      next.row(q) = p.transpose();
    }
    aligned[order[k]] = std::move(xs);
    done.push_back(order[k]);
    ref = std::move(next);
  }
  out.aligned = std::move(aligned);
  out.mean = mean_signal(m, out.aligned, mean_cfg).mean;
  return out;
}

}  // namespace rtw
