#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace refcalib {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

// Position in some robot or camera frame, meters.
using Point3 = Eigen::Vector3d;
// Image coordinates, pixels. May fall outside the image bounds.
using Pixel = Eigen::Vector2d;

// Rigid transform in SE(3). `Pose` named T^AB maps points expressed in frame
// B into frame A: p_A = T^AB * p_B.
class Pose {
 public:
  Pose() = default;
  // Accepts a rotation within 1e-6 of orthonormal and projects it back onto
  // SO(3) if it has drifted more than 1e-9. Throws InvalidArgument otherwise.
  Pose(const Mat3& rotation, const Vec3& translation);

  static Pose Identity() { return Pose(); }
  // `q` need not be normalized; a zero quaternion is rejected.
  static Pose FromQuaternion(const Eigen::Quaterniond& q, const Vec3& t);
  static Pose FromMatrix(const Mat4& m);

  const Mat3& rotation() const noexcept { return rotation_; }
  const Vec3& translation() const noexcept { return translation_; }

  // Unit quaternion with w >= 0.
  Eigen::Quaterniond quaternion() const;
  Mat4 matrix() const;

  Pose inverse() const;
  Point3 operator*(const Point3& p) const {
    return rotation_ * p + translation_;
  }
  // a * b applies b first, then a.
  Pose operator*(const Pose& b) const;

 private:
  Mat3 rotation_ = Mat3::Identity();
  Vec3 translation_ = Vec3::Zero();
};

inline Pose compose(const Pose& a, const Pose& b) { return a * b; }
inline Pose invert(const Pose& p) { return p.inverse(); }

// Largest elementwise deviation of R^T R from I, combined with |det R - 1|.
double orthonormality_drift(const Mat3& r);
// Closest rotation in the Frobenius sense (polar decomposition via SVD).
Mat3 nearest_rotation(const Mat3& m);

Mat3 skew(const Vec3& v);
Mat3 rot_x(double angle);
Mat3 rot_y(double angle);
Mat3 rot_z(double angle);
Mat3 exp_so3(const Vec3& omega);
Vec3 log_so3(const Mat3& r);

// Pinhole camera without distortion.
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  // Square pixels, principal point at the image center.
  static CameraIntrinsics FromHorizontalFov(double fov_rad, int width,
                                            int height);

  // Throws InvalidArgument when fx, fy or the principal point are invalid.
  void validate() const;
  Mat3 K() const;
  // Homogeneous 3x4 form [K | 0].
  Eigen::Matrix<double, 3, 4> K_hat() const;
  bool contains(const Pixel& px) const {
    return px.x() >= 0.0 && px.y() >= 0.0 && px.x() < width &&
           px.y() < height;
  }

  bool operator==(const CameraIntrinsics&) const = default;
};

// s * [u v 1]^T = K * p_cam with s = z. Throws NonPositiveDepth if z <= 1e-9.
Pixel project(const CameraIntrinsics& k, const Point3& p_cam);
Point3 unproject(const CameraIntrinsics& k, const Pixel& px, double depth);

// Geodesic angle between the two rotations, in [0, pi].
double rotation_error(const Pose& a, const Pose& b);
// Per-axis absolute translation difference, meters.
Vec3 translation_error(const Pose& a, const Pose& b);

}  // namespace refcalib
