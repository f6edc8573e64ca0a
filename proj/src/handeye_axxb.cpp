#include <Eigen/Dense>
#include <cmath>

#include "refcalib/calibration.hpp"
#include "refcalib/errors.hpp"

namespace refcalib {

Pose solve_axxb(std::span<const Pose> a_list, std::span<const Pose> b_list) {
  if (a_list.size() != b_list.size()) throw DimensionMismatch(a_list.size(), b_list.size());
  if (a_list.size() < 2) throw InsufficientMotion("AX=XB needs at least two relative motions");

  const std::size_t n = a_list.size();
  std::vector<Point3> alpha(n), beta(n);
  for (std::size_t i = 0; i < n; ++i) {
    alpha[i] = log_so3(a_list[i].rotation());
    beta[i] = log_so3(b_list[i].rotation());
  }

  bool diverse = false;
  for (std::size_t i = 0; i < n && !diverse; ++i) {
    if (alpha[i].norm() < 1e-12) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (alpha[j].norm() < 1e-12) continue;
      if (alpha[i].normalized().cross(alpha[j].normalized()).norm() > 1e-6) {
        diverse = true;
        break;
      }
    }
  }
  if (!diverse) {
    throw InsufficientMotion("rotation axes of all motions are parallel; add rotations about other axes");
  }

  // R_A = R_X R_B R_X^T implies alpha_i = R_X beta_i: orthogonal Procrustes
  // on the log vectors, about the origin.
  Mat3 h = Mat3::Zero();
  for (std::size_t i = 0; i < n; ++i) h += beta[i] * alpha[i].transpose();
  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 fix = Mat3::Identity();
  fix(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  const Mat3 rx = svd.matrixV() * fix * svd.matrixU().transpose();

  Eigen::MatrixXd c(3 * n, 3);
  Eigen::VectorXd d(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    c.middleRows<3>(3 * i) = a_list[i].rotation() - Mat3::Identity();
    d.segment<3>(3 * i) = rx * b_list[i].translation() - a_list[i].translation();
  }
  const Vec3 tx = c.colPivHouseholderQr().solve(d);
  if (!tx.allFinite()) throw NumericalFailure("AX=XB translation solve failed");
  return Pose(rx, tx);
}

}  // namespace refcalib
