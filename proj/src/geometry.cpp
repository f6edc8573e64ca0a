#include "refcalib/geometry.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "refcalib/errors.hpp"

namespace refcalib {
namespace {

constexpr double kDriftTolerance = 1e-9;
constexpr double kMaxAcceptedDrift = 1e-6;
constexpr double kMinDepth = 1e-9;

}  // namespace

double orthonormality_drift(const Mat3& r) {
  const double ortho = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
  return std::max(ortho, std::abs(r.determinant() - 1.0));
}

Mat3 nearest_rotation(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0 ? -1.0 : 1.0;
  return svd.matrixU() * d * svd.matrixV().transpose();
}

Pose::Pose(const Mat3& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {
  if (!rotation.allFinite() || !translation.allFinite()) {
    throw InvalidArgument("pose contains non-finite values");
  }
  const double drift = orthonormality_drift(rotation_);
  if (drift > kMaxAcceptedDrift) {
    throw InvalidArgument("rotation is not orthonormal (drift " +
                          std::to_string(drift) + ")");
  }
  if (drift > kDriftTolerance) rotation_ = nearest_rotation(rotation_);
}

Pose Pose::FromQuaternion(const Eigen::Quaterniond& q, const Vec3& t) {
  const double n = q.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw InvalidArgument("quaternion has zero or non-finite norm");
  }
  return Pose(q.normalized().toRotationMatrix(), t);
}

Pose Pose::FromMatrix(const Mat4& m) {
  if ((m.row(3) - Eigen::RowVector4d(0, 0, 0, 1)).cwiseAbs().maxCoeff() > 1e-9) {
    throw InvalidArgument("bottom row of a rigid transform must be [0 0 0 1]");
  }
  return Pose(m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>());
}

Eigen::Quaterniond Pose::quaternion() const {
  Eigen::Quaterniond q(rotation_);
  q.normalize();
  if (q.w() < 0.0) q.coeffs() *= -1.0;
  return q;
}

Mat4 Pose::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

Pose Pose::inverse() const {
  Pose out;
  out.rotation_ = rotation_.transpose();
  out.translation_ = -(out.rotation_ * translation_);
  return out;
}

Pose Pose::operator*(const Pose& b) const {
  Pose out;
  out.rotation_ = rotation_ * b.rotation_;
  out.translation_ = rotation_ * b.translation_ + translation_;
  if (orthonormality_drift(out.rotation_) > kDriftTolerance) {
    out.rotation_ = nearest_rotation(out.rotation_);
  }
  return out;
}

Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return s;
}

Mat3 rot_x(double angle) {
  return Eigen::AngleAxisd(angle, Vec3::UnitX()).toRotationMatrix();
}
Mat3 rot_y(double angle) {
  return Eigen::AngleAxisd(angle, Vec3::UnitY()).toRotationMatrix();
}
Mat3 rot_z(double angle) {
  return Eigen::AngleAxisd(angle, Vec3::UnitZ()).toRotationMatrix();
}

Mat3 exp_so3(const Vec3& omega) {
  const double theta = omega.norm();
  if (theta < 1e-12) return Mat3::Identity() + skew(omega);
  return Eigen::AngleAxisd(theta, omega / theta).toRotationMatrix();
}

Vec3 log_so3(const Mat3& r) {
  const Eigen::AngleAxisd aa(Eigen::Quaterniond(r).normalized());
  double angle = aa.angle();
  Vec3 axis = aa.axis();
  if (angle > M_PI) {
    angle = 2.0 * M_PI - angle;
    axis = -axis;
  }
  return angle * axis;
}

CameraIntrinsics CameraIntrinsics::FromHorizontalFov(double fov_rad, int width,
                                                     int height) {
  if (!(fov_rad > 0.0 && fov_rad < M_PI)) {
    throw InvalidArgument("horizontal field of view must lie in (0, pi)");
  }
  CameraIntrinsics k;
  k.width = width;
  k.height = height;
  k.fx = 0.5 * width / std::tan(0.5 * fov_rad);
  k.fy = k.fx;
  k.cx = 0.5 * width;
  k.cy = 0.5 * height;
  k.validate();
  return k;
}

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw InvalidArgument("focal lengths must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw InvalidArgument("image size must be positive");
  }
  if (!(cx > 0.0 && cx < width) || !(cy > 0.0 && cy < height)) {
    throw InvalidArgument("principal point must lie inside the image");
  }
}

Mat3 CameraIntrinsics::K() const {
  Mat3 k;
  k << fx, 0.0, cx,
       0.0, fy, cy,
       0.0, 0.0, 1.0;
  return k;
}

Eigen::Matrix<double, 3, 4> CameraIntrinsics::K_hat() const {
  Eigen::Matrix<double, 3, 4> k = Eigen::Matrix<double, 3, 4>::Zero();
  k.leftCols<3>() = K();
  return k;
}

Pixel project(const CameraIntrinsics& k, const Point3& p_cam) {
  if (!(p_cam.z() > kMinDepth)) throw NonPositiveDepth(p_cam.z());
  return {k.fx * p_cam.x() / p_cam.z() + k.cx,
          k.fy * p_cam.y() / p_cam.z() + k.cy};
}

Point3 unproject(const CameraIntrinsics& k, const Pixel& px, double depth) {
  return {(px.x() - k.cx) / k.fx * depth, (px.y() - k.cy) / k.fy * depth,
          depth};
}

double rotation_error(const Pose& a, const Pose& b) {
  // atan2 form of arccos((tr - 1) / 2); keeps full precision near zero.
  const Mat3 r = a.rotation() * b.rotation().transpose();
  const double c = std::clamp((r.trace() - 1.0) * 0.5, -1.0, 1.0);
  const Vec3 s(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  return std::atan2(0.5 * s.norm(), c);
}

Vec3 translation_error(const Pose& a, const Pose& b) {
  return (a.translation() - b.translation()).cwiseAbs();
}

}  // namespace refcalib
