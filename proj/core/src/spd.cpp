#include "rtw/spd.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "rtw/error.hpp"

namespace rtw::spd {

SymEig eig(const Mat& sym) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kNotSpd, "symmetric eigendecomposition failed");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Mat apply(const SymEig& e, const std::function<double(double)>& f) {
  Vec fl(e.values.size());
  for (Eigen::Index i = 0; i < fl.size(); ++i) fl[i] = f(e.values[i]);
  return e.vectors * fl.asDiagonal() * e.vectors.transpose();
}

Mat symmetrize(const Mat& a) { return 0.5 * (a + a.transpose()); }

Mat expm(const Mat& sym) {
  return apply(eig(sym), [](double l) { return std::exp(l); });
}

Mat logm(const Mat& spd) {
  return apply(eig(spd), [](double l) { return std::log(std::max(l, kEigenFloor)); });
}

Roots roots(const Mat& p) {
  if (!p.allFinite()) throw Error(ErrorCode::kNonFinite, "SPD matrix has non-finite entries");
  const SymEig e = eig(symmetrize(p));
  if (e.values.minCoeff() <= 0.0) {
    throw Error(ErrorCode::kNotSpd, "matrix square root of a non positive-definite matrix");
  }
  Vec s = e.values.array().sqrt();
  Vec is = s.cwiseInverse();
  return {e.vectors * s.asDiagonal() * e.vectors.transpose(),
          e.vectors * is.asDiagonal() * e.vectors.transpose()};
}

Mat exp_map(const Mat& base, const Mat& u) {
  const Roots r = roots(base);
  const Mat inner = symmetrize(r.inv_sqrt * u * r.inv_sqrt);
  return symmetrize(r.sqrt * expm(inner) * r.sqrt);
}

Mat log_map(const Mat& base, const Mat& x) {
  const Roots r = roots(base);
  const Mat inner = symmetrize(r.inv_sqrt * x * r.inv_sqrt);
  return symmetrize(r.sqrt * logm(inner) * r.sqrt);
}

double distance(const Mat& a, const Mat& b) {
  const Roots r = roots(b);
  const SymEig e = eig(symmetrize(r.inv_sqrt * a * r.inv_sqrt));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    const double l = std::log(std::max(e.values[i], kEigenFloor));
    acc += l * l;
  }
  return std::sqrt(acc);
}

Mat divided_differences(const Vec& lambda, const std::function<double(double)>& f,
                        const std::function<double(double)>& df) {
  const Eigen::Index n = lambda.size();
  Mat phi(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double d = lambda[i] - lambda[j];
      const double scale = std::max({1.0, std::abs(lambda[i]), std::abs(lambda[j])});
      if (std::abs(d) <= 1e-6 * scale) {
        phi(i, j) = df(0.5 * (lambda[i] + lambda[j]));
      } else {
        phi(i, j) = (f(lambda[i]) - f(lambda[j])) / d;
      }
    }
  }
  return phi;
}

Mat from_flat(ConstVecRef v, int dim) {
  Mat m(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) m(r, c) = v[r * dim + c];
  return m;
}

Vec to_flat(const Mat& m) {
  const auto dim = m.rows();
  Vec v(dim * dim);
  for (Eigen::Index r = 0; r < dim; ++r)
    for (Eigen::Index c = 0; c < dim; ++c) v[r * dim + c] = m(r, c);
  return v;
}

}  // namespace rtw::spd

namespace rtw::spd {

Chart::Chart(const Mat& base) : roots_(roots(base)) {}

Mat Chart::log(const Mat& x) const {
  const Mat inner = symmetrize(roots_.inv_sqrt * x * roots_.inv_sqrt);
  return symmetrize(roots_.sqrt * logm(inner) * roots_.sqrt);
}

Mat Chart::exp(const Mat& u) const {
  const Mat inner = symmetrize(roots_.inv_sqrt * u * roots_.inv_sqrt);
  return symmetrize(roots_.sqrt * expm(inner) * roots_.sqrt);
}

}  // namespace rtw::spd
