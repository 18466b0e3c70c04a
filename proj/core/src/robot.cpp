#include "rtw/robot.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "rtw/error.hpp"
#include "rtw/manifold.hpp"
#include "rtw/spd.hpp"

namespace rtw {

namespace {

void validate(const PlanarRobot& robot) {
  if (robot.link_lengths.empty()) throw Error(ErrorCode::kBadConfig, "robot needs at least one link");
  if (robot.link_masses.size() != robot.link_lengths.size()) {
    throw Error(ErrorCode::kBadConfig, "robot needs one mass per link");
  }
  for (size_t i = 0; i < robot.link_lengths.size(); ++i) {
    if (!(robot.link_lengths[i] > 0.0) || !(robot.link_masses[i] > 0.0)) {
      throw Error(ErrorCode::kBadConfig, "link lengths and masses must be positive");
    }
  }
}

Vec to_spd_point(const Mat& m) {
  const Mat s = spd::symmetrize(m);
  Eigen::LLT<Mat> llt(s);
  if (llt.info() == Eigen::Success && s.diagonal().minCoeff() > 0.0) return spd::to_flat(s);
  return Manifold::spd(static_cast<int>(m.rows())).project(spd::to_flat(s));
}

}  // namespace

PlanarRobot PlanarRobot::uniform(int links, double length, double mass) {
  PlanarRobot r;
  r.link_lengths.assign(static_cast<size_t>(links), length);
  r.link_masses.assign(static_cast<size_t>(links), mass);
  return r;
}

PlanarKinematics planar_fk_jacobian(const PlanarRobot& robot, const Vec& q, int upto) {
  validate(robot);
  const int n = robot.links();
  if (q.size() != n) throw Error(ErrorCode::kShapeMismatch, "joint vector length must equal the link count");
  if (upto < 0) upto = n - 1;
  PlanarKinematics k;
  k.position.setZero();
  k.jacobian = Mat::Zero(2, n);
  double angle = 0.0;
  for (int i = 0; i <= upto; ++i) {
    angle += q[i];
    const double l = robot.link_lengths[static_cast<size_t>(i)];
    const double dx = l * std::cos(angle);
    const double dy = l * std::sin(angle);
    k.position += Eigen::Vector2d(dx, dy);
    // Joint j <= i rotates this segment.
    for (int j = 0; j <= i; ++j) {
      k.jacobian(0, j) -= dy;
      k.jacobian(1, j) += dx;
    }
  }
  return k;
}

Vec manipulability(const Mat& jacobian) {
  if (jacobian.rows() != 2) throw Error(ErrorCode::kShapeMismatch, "manipulability expects a 2 x n Jacobian");
  const Mat m = jacobian * jacobian.transpose();
  return to_spd_point(m);
}

Vec mass_matrix(const PlanarRobot& robot, const Vec& q) {
  validate(robot);
  const int n = robot.links();
  Mat m = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const Mat j = planar_fk_jacobian(robot, q, i).jacobian;
    m += robot.link_masses[static_cast<size_t>(i)] * j.transpose() * j;
  }
  return to_spd_point(m);
}

}  // namespace rtw
