#pragma once

#include "rtw/autodiff.hpp"
#include "rtw/manifold.hpp"

// Tape primitives for manifold maps evaluated row by row. Base points and
// targets are frozen (constants); gradients flow into the tangent / point
// argument only.
namespace rtw::ad {

// Rows of u are tangent vectors at the matching rows of bases (unit sphere
// points of the same width).
Var sphere_exp_rows(const Mat& bases, Var u);

// Rows are row-major flattened dim x dim symmetric matrices.
Var spd_exp_rows(int dim, const Mat& bases, Var u);

// Rx1 geodesic distances between rows of x and rows of targets.
Var distance_rows(const Manifold& m, Var x, const Mat& targets);

// Rx1 Frobenius distances between Cholesky factors (SPD manifolds only).
Var cholesky_distance_rows(int dim, Var x, const Mat& targets);

}  // namespace rtw::ad
