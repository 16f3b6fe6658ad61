#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace anisodrop {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using Points2 = Eigen::Matrix2Xd;

/// Thrown when an operation does not support the given representation
/// (e.g. anisotropic perimeter of a grid mask, curvature of a crystalline
/// tension).
class UnsupportedError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an iterative routine exhausts its budget without reaching
/// its stopping tolerance and the caller asked for hard failure.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Vec2 rot_ccw(const Vec2& v) { return Vec2(-v.y(), v.x()); }
inline Vec2 rot_cw(const Vec2& v) { return Vec2(v.y(), -v.x()); }
inline double cross2(const Vec2& a, const Vec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

/// Volume of the unit ball in R^n.
double unit_ball_volume(int n);

}  // namespace anisodrop
