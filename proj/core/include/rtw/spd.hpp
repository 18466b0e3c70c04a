#pragma once

#include <functional>

#include "rtw/types.hpp"

// Matrix functions on symmetric matrices, all computed through a symmetric
// eigendecomposition.
namespace rtw::spd {

inline constexpr double kEigenFloor = 1e-12;

struct SymEig {
  Vec values;
  Mat vectors;
};

SymEig eig(const Mat& sym);

// U f(L) U^T.
Mat apply(const SymEig& e, const std::function<double(double)>& f);

Mat expm(const Mat& sym);
Mat logm(const Mat& spd);  // eigenvalues floored at kEigenFloor

// Square root and inverse square root of an SPD matrix from one decomposition.
// Throws NotSpd if the smallest eigenvalue is not positive.
struct Roots {
  Mat sqrt;
  Mat inv_sqrt;
};
Roots roots(const Mat& p);

Mat exp_map(const Mat& base, const Mat& u);
Mat log_map(const Mat& base, const Mat& x);
double distance(const Mat& a, const Mat& b);

Mat symmetrize(const Mat& a);

// Daleckii-Krein divided differences of f at the eigenvalues of e, such that
// Df(A)[H] = U (Phi o (U^T H U)) U^T.
Mat divided_differences(const Vec& lambda, const std::function<double(double)>& f,
                        const std::function<double(double)>& df);

Mat from_flat(ConstVecRef v, int dim);
Vec to_flat(const Mat& m);

}  // namespace rtw::spd

namespace rtw::spd {

// Exp/log maps at one fixed base point, reusing its square roots.
class Chart {
 public:
  explicit Chart(const Mat& base);

  Mat log(const Mat& x) const;
  Mat exp(const Mat& u) const;

 private:
  Roots roots_;
};

}  // namespace rtw::spd
