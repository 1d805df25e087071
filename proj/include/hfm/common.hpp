#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <stdexcept>
#include <string>

namespace hfm {

inline constexpr int kJoints = 7;

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using JointVector = Eigen::Matrix<double, kJoints, 1>;
using Jacobian = Eigen::Matrix<double, 3, kJoints>;
using JacobianPinv = Eigen::Matrix<double, kJoints, 3>;
using JointMatrix = Eigen::Matrix<double, kJoints, kJoints>;

// Error hierarchy. Every failure the library reports derives from hfm::Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularJacobian : public Error {
 public:
  using Error::Error;
};

class DegenerateQuery : public Error {
 public:
  using Error::Error;
};

class PathOffSurface : public Error {
 public:
  using Error::Error;
};

class ZeroVelocity : public Error {
 public:
  using Error::Error;
};

class NoContact : public Error {
 public:
  using Error::Error;
};

class DegenerateFrame : public Error {
 public:
  using Error::Error;
};

class NoContactReached : public Error {
 public:
  using Error::Error;
};

inline Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return s;
}

// Angle between two non-zero vectors, robust near 0 and pi.
inline double angle_between(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

}  // namespace hfm
