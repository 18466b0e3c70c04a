#pragma once

#include <vector>

#include "rtw/types.hpp"

namespace rtw {

struct PlanarRobot {
  std::vector<double> link_lengths;
  std::vector<double> link_masses;  // point mass at the end of each link

  static PlanarRobot uniform(int links, double length = 1.0, double mass = 1.0);
  int links() const { return static_cast<int>(link_lengths.size()); }
};

struct PlanarKinematics {
  Eigen::Vector2d position;
  Mat jacobian;  // 2 x n
};

// Forward kinematics of link end `upto` (0-based, default last link).
PlanarKinematics planar_fk_jacobian(const PlanarRobot& robot, const Vec& q, int upto = -1);

// J J^T as a flat SPD(2) point (eigenvalues clamped when J is rank deficient).
Vec manipulability(const Mat& jacobian);

// Sum_i m_i J_i^T J_i over the link-end point masses, as a flat SPD(n) point.
Vec mass_matrix(const PlanarRobot& robot, const Vec& q);

}  // namespace rtw
