#include "rtw/manifold_ad.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "rtw/error.hpp"
#include "rtw/spd.hpp"

namespace rtw::ad {

namespace {

using Index = Eigen::Index;

void check_rows(const Mat& frozen, Var v, const char* what) {
  if (frozen.rows() != v.rows() || frozen.cols() != v.cols()) {
    throw Error(ErrorCode::kShapeMismatch, std::string(what) + ": frozen operand shape differs");
  }
}

Mat row_as_matrix(const Tensor& t, Index r, int dim) {
  Mat m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = t(r, i * dim + j);
  return m;
}

void store_row(Tensor& t, Index r, const Mat& m) {
  const auto dim = m.rows();
  for (Index i = 0; i < dim; ++i)
    for (Index j = 0; j < dim; ++j) t(r, i * dim + j) = m(i, j);
}

Var euclidean_distance_rows(Var x, const Mat& targets) {
  Tensor diff = x.value() - targets;
  Tensor d = diff.rowwise().norm();
  Tensor dd = d;
  return x.tape()->record(std::move(d), {x}, [diff, dd](const Tensor& g, std::span<Tensor* const> gin) {
    if (!gin[0]) return;
    for (Index r = 0; r < diff.rows(); ++r) {
      if (dd(r, 0) > 0.0) gin[0]->row(r) += diff.row(r) * (g(r, 0) / dd(r, 0));
    }
  });
}

Var sphere_distance_rows(Var x, const Mat& targets) {
  const Tensor& xv = x.value();
  const Index n = xv.rows();
  Tensor d(n, 1);
  Tensor grads(n, xv.cols());
  for (Index r = 0; r < n; ++r) {
    const Vec xr = xv.row(r).transpose();
    const Vec t = targets.row(r).transpose();
    const double a = xr.dot(t);
    const Vec w = xr - a * t;
    const double b = w.norm();
    d(r, 0) = std::atan2(b, a);
    if (b > 0.0) {
      grads.row(r) = ((-b * t + (a / b) * w) / (a * a + b * b)).transpose();
    } else {
      grads.row(r).setZero();
    }
  }
  return x.tape()->record(std::move(d), {x}, [grads](const Tensor& g, std::span<Tensor* const> gin) {
    if (gin[0]) gin[0]->array() += grads.array().colwise() * g.col(0).array();
  });
}

Var spd_distance_rows(int dim, Var x, const Mat& targets) {
  const Tensor& xv = x.value();
  const Index n = xv.rows();
  Tensor d(n, 1);
  Tensor grads(n, xv.cols());
  for (Index r = 0; r < n; ++r) {
    const spd::Roots roots = spd::roots(row_as_matrix(targets, r, dim));
    const Mat a = spd::symmetrize(roots.inv_sqrt * row_as_matrix(xv, r, dim) * roots.inv_sqrt);
    const spd::SymEig e = spd::eig(a);
    Vec logs(dim);
    for (int i = 0; i < dim; ++i) logs[i] = std::log(std::max(e.values[i], spd::kEigenFloor));
    const double dist = logs.norm();
    d(r, 0) = dist;
    if (dist > 0.0) {
      Vec coef(dim);
      for (int i = 0; i < dim; ++i) coef[i] = logs[i] / std::max(e.values[i], spd::kEigenFloor) / dist;
      const Mat ga = e.vectors * coef.asDiagonal() * e.vectors.transpose();
      Tensor row(1, xv.cols());
      store_row(row, 0, spd::symmetrize(roots.inv_sqrt * ga * roots.inv_sqrt));
      grads.row(r) = row;
    } else {
      grads.row(r).setZero();
    }
  }
  return x.tape()->record(std::move(d), {x}, [grads](const Tensor& g, std::span<Tensor* const> gin) {
    if (gin[0]) gin[0]->array() += grads.array().colwise() * g.col(0).array();
  });
}

Var block_distance_rows(const Manifold::Block& b, Var x, const Mat& targets) {
  switch (b.kind) {
    case Manifold::Kind::kEuclidean: return euclidean_distance_rows(x, targets);
    case Manifold::Kind::kSphere: return sphere_distance_rows(x, targets);
    case Manifold::Kind::kSpd: return spd_distance_rows(b.dim, x, targets);
    case Manifold::Kind::kProduct: break;
  }
  throw Error(ErrorCode::kBadConfig, "nested product block");
}

}  // namespace

Var sphere_exp_rows(const Mat& bases, Var u) {
  check_rows(bases, u, "sphere_exp_rows");
  const Tensor& uv = u.value();
  const Index n = uv.rows();
  Tensor out(n, uv.cols());
  for (Index r = 0; r < n; ++r) {
    const double rad = uv.row(r).norm();
    if (rad == 0.0) {
      out.row(r) = bases.row(r);
    } else {
      out.row(r) = bases.row(r) * std::cos(rad) + uv.row(r) * (std::sin(rad) / rad);
      out.row(r) /= out.row(r).norm();
    }
  }
  return u.tape()->record(std::move(out), {u}, [bases, u](const Tensor& g, std::span<Tensor* const> gin) {
    if (!gin[0]) return;
    const Tensor& uv = u.value();
    for (Index r = 0; r < uv.rows(); ++r) {
      const auto ur = uv.row(r);
      const auto gr = g.row(r);
      const double rad = ur.norm();
      double s, ds_over_r, sin_over_r;
      if (rad < 1e-4) {
        const double r2 = rad * rad;
        s = 1.0 - r2 / 6.0;
        ds_over_r = -1.0 / 3.0 + r2 / 30.0;
        sin_over_r = s;
      } else {
        s = std::sin(rad) / rad;
        ds_over_r = (rad * std::cos(rad) - std::sin(rad)) / (rad * rad * rad);
        sin_over_r = s;
      }
      const double gp = gr.dot(bases.row(r));
      const double gu = gr.dot(ur);
      gin[0]->row(r) += s * gr + (gu * ds_over_r - gp * sin_over_r) * ur;
    }
  });
}

Var spd_exp_rows(int dim, const Mat& bases, Var u) {
  check_rows(bases, u, "spd_exp_rows");
  struct RowCache {
    Mat sqrt;
    Mat inv_sqrt;
    Mat vectors;
    Mat phi;
  };
  const Tensor& uv = u.value();
  const Index n = uv.rows();
  Tensor out(n, uv.cols());
  std::vector<RowCache> cache(static_cast<size_t>(n));
  const auto f = [](double l) { return std::exp(l); };
  for (Index r = 0; r < n; ++r) {
    auto& c = cache[static_cast<size_t>(r)];
    const spd::Roots roots = spd::roots(row_as_matrix(bases, r, dim));
    const Mat inner = spd::symmetrize(roots.inv_sqrt * row_as_matrix(uv, r, dim) * roots.inv_sqrt);
    const spd::SymEig e = spd::eig(inner);
    const Mat expm = spd::apply(e, f);
    store_row(out, r, spd::symmetrize(roots.sqrt * expm * roots.sqrt));
    c.sqrt = roots.sqrt;
    c.inv_sqrt = roots.inv_sqrt;
    c.vectors = e.vectors;
    c.phi = spd::divided_differences(e.values, f, f);
  }
  return u.tape()->record(std::move(out), {u}, [cache, dim](const Tensor& g, std::span<Tensor* const> gin) {
    if (!gin[0]) return;
    for (Index r = 0; r < g.rows(); ++r) {
      const auto& c = cache[static_cast<size_t>(r)];
      const Mat gx = spd::symmetrize(row_as_matrix(g, r, dim));
      const Mat ge = c.sqrt * gx * c.sqrt;
      const Mat gb = c.vectors * c.phi.cwiseProduct(c.vectors.transpose() * ge * c.vectors) * c.vectors.transpose();
      const Mat gu = c.inv_sqrt * gb * c.inv_sqrt;
      Tensor row(1, g.cols());
      store_row(row, 0, gu);
      gin[0]->row(r) += row;
    }
  });
}

Var distance_rows(const Manifold& m, Var x, const Mat& targets) {
  check_rows(targets, x, "distance_rows");
  const auto blocks = m.blocks();
  if (blocks.size() == 1) return block_distance_rows(blocks.front(), x, targets);
  std::vector<Var> parts;
  parts.reserve(blocks.size());
  for (const auto& b : blocks) {
    parts.push_back(block_distance_rows(b, slice_cols(x, b.offset, b.width), targets.middleCols(b.offset, b.width)));
  }
  return row_norms(concat_cols(parts));
}

Var cholesky_distance_rows(int dim, Var x, const Mat& targets) {
  check_rows(targets, x, "cholesky_distance_rows");
  const Tensor& xv = x.value();
  const Index n = xv.rows();
  Tensor d(n, 1);
  Tensor grads(n, xv.cols());
  for (Index r = 0; r < n; ++r) {
    Eigen::LLT<Mat> lx(spd::symmetrize(row_as_matrix(xv, r, dim)));
    Eigen::LLT<Mat> lt(spd::symmetrize(row_as_matrix(targets, r, dim)));
    if (lx.info() != Eigen::Success || lt.info() != Eigen::Success) {
      throw Error(ErrorCode::kNotSpd, "Cholesky factorization failed");
    }
    const Mat l = lx.matrixL();
    const Mat diff = l - Mat(lt.matrixL());
    const double dist = diff.norm();
    d(r, 0) = dist;
    if (dist > 0.0) {
      Mat p = (l.transpose() * (diff / dist)).triangularView<Eigen::Lower>();
      p.diagonal() *= 0.5;
      const Mat linv = l.triangularView<Eigen::Lower>().solve(Mat::Identity(dim, dim));
      Tensor row(1, xv.cols());
      store_row(row, 0, spd::symmetrize(linv.transpose() * p * linv));
      grads.row(r) = row;
    } else {
      grads.row(r).setZero();
    }
  }
  return x.tape()->record(std::move(d), {x}, [grads](const Tensor& g, std::span<Tensor* const> gin) {
    if (gin[0]) gin[0]->array() += grads.array().colwise() * g.col(0).array();
  });
}

}  // namespace rtw::ad
