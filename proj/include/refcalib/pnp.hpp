#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "refcalib/errors.hpp"
#include "refcalib/geometry.hpp"

namespace refcalib {

// One 2D-3D pair. `p3` is in the object frame (robot base for eye-on-base,
// end effector for eye-in-hand).
struct Correspondence {
  Point3 p3 = Point3::Zero();
  Pixel p2 = Pixel::Zero();
  double weight = 1.0;
};

enum class Conditioning { kWellConditioned, kNearCollinear, kNearPlanar, kDegenerate };

const char* to_string(Conditioning c);

struct DegeneracyReport {
  std::size_t n_points = 0;
  // Singular values of the centered point matrix, descending, meters.
  std::array<double, 3> spread_singular_values{0.0, 0.0, 0.0};
  Conditioning classification = Conditioning::kDegenerate;
  // Principal directions matching the singular values (columns).
  Mat3 principal_axes = Mat3::Identity();
};

// Singular-value ratio below which a direction counts as collapsed.
inline constexpr double kSpreadRatioThreshold = 0.02;
inline constexpr std::size_t kMinPnPPoints = 4;

// Throws EmptyInput for an empty list.
DegeneracyReport check_degeneracy(std::span<const Point3> points);

class DegenerateConfiguration : public Error {
 public:
  explicit DegenerateConfiguration(DegeneracyReport report);
  const DegeneracyReport& report() const noexcept { return report_; }

 private:
  DegeneracyReport report_;
};

struct PnPSolution {
  Pose pose;  // object frame -> camera frame
  double rms_reprojection_error = 0.0;
  std::vector<double> per_point_residuals;  // pixels, input order
  DegeneracyReport condition_report;
  int iterations = 0;  // accepted refinement steps
};

struct RefineOptions {
  int max_iters = 100;
  double fn_tol = 1e-10;
  double damping_init = 1e-3;
  // Huber loss with this scale in pixels when enabled.
  bool robust = false;
  double huber_scale = 3.0;
};

using PnPOptions = RefineOptions;

// EPnP closed-form estimate. Uses the 3-control-point planar variant when
// the points are near-planar.
Pose solve_pnp_linear(std::span<const Correspondence> corrs,
                      const CameraIntrinsics& k);

// Levenberg-Marquardt minimization of the weighted squared reprojection error.
PnPSolution refine_pose(const Pose& initial, std::span<const Correspondence> corrs,
                        const CameraIntrinsics& k, const RefineOptions& opts = {});

// Degeneracy check, linear solve, refinement.
PnPSolution solve_pnp(std::span<const Correspondence> corrs,
                      const CameraIntrinsics& k, const PnPOptions& opts = {});

// Pixel residuals (projection - observation), 2n entries.
Eigen::VectorXd reprojection_residuals(const Pose& pose,
                                       std::span<const Correspondence> corrs,
                                       const CameraIntrinsics& k);

// d residuals / d xi for the left update T <- [exp(omega) | rho] * T with
// xi = (omega, rho). Rows follow reprojection_residuals.
Eigen::MatrixXd reprojection_jacobian(const Pose& pose,
                                      std::span<const Correspondence> corrs,
                                      const CameraIntrinsics& k);

// The retraction used by refinement and by reprojection_jacobian.
Pose apply_increment(const Pose& pose, const Eigen::Matrix<double, 6, 1>& xi);

}  // namespace refcalib
