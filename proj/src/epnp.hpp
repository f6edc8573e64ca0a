#pragma once

#include <span>
#include <vector>

#include "refcalib/pnp.hpp"

namespace refcalib::detail {

// All EPnP beta-case solutions for the given correspondences. The general
// variant uses 4 control points; the planar variant 3 control points in the
// dominant plane of the points. Returns an empty list if every case failed.
std::vector<Pose> epnp_candidates(std::span<const Correspondence> corrs,
                                  const CameraIntrinsics& k, bool planar);

// Weighted absolute orientation: pose minimizing sum w |pose * src - dst|^2.
Pose fit_rigid(std::span<const Point3> src, std::span<const Point3> dst,
               std::span<const double> weights);

}  // namespace refcalib::detail
