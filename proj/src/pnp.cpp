#include "refcalib/pnp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>

#include "epnp.hpp"

namespace refcalib {
namespace {

constexpr double kMinDepth = 1e-9;
// Below this rms (pixels) a pose is treated as exact and refinement stops.
constexpr double kExactRms = 1e-10;

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

std::string describe(const DegeneracyReport& r) {
  const auto& s = r.spread_singular_values;
  return std::string("degenerate point configuration (") + to_string(r.classification) +
         ", n=" + std::to_string(r.n_points) + ", singular values " +
         std::to_string(s[0]) + " " + std::to_string(s[1]) + " " + std::to_string(s[2]) + ")";
}

double huber_rho(double sq, const RefineOptions& o) {
  if (!o.robust) return sq;
  const double e = std::sqrt(sq);
  return e <= o.huber_scale ? sq : 2.0 * o.huber_scale * e - o.huber_scale * o.huber_scale;
}

double huber_weight(double sq, const RefineOptions& o) {
  if (!o.robust) return 1.0;
  const double e = std::sqrt(sq);
  return e <= o.huber_scale ? 1.0 : o.huber_scale / e;
}

struct Linearization {
  double cost = 0.0;  // 0.5 * sum w * rho(|r|^2)
  Mat6 h = Mat6::Zero();
  Vec6 g = Vec6::Zero();
};

// Cost over active points; returns nullopt if an active point is behind the camera.
std::optional<double> evaluate_cost(const Pose& pose, std::span<const Correspondence> corrs,
                                    const CameraIntrinsics& k, const std::vector<double>& w,
                                    const RefineOptions& o) {
  double cost = 0.0;
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    if (w[i] <= 0.0) continue;
    const Point3 x = pose * corrs[i].p3;
    if (x.z() <= kMinDepth) return std::nullopt;
    const Vec2 r(k.fx * x.x() / x.z() + k.cx - corrs[i].p2.x(),
                 k.fy * x.y() / x.z() + k.cy - corrs[i].p2.y());
    cost += w[i] * huber_rho(r.squaredNorm(), o);
  }
  return 0.5 * cost;
}

Eigen::Matrix<double, 2, 6> point_jacobian(const Point3& x, const CameraIntrinsics& k) {
  const double iz = 1.0 / x.z();
  Eigen::Matrix<double, 2, 3> dproj;
  dproj << k.fx * iz, 0.0, -k.fx * x.x() * iz * iz,
           0.0, k.fy * iz, -k.fy * x.y() * iz * iz;
  Eigen::Matrix<double, 3, 6> dx;
  dx.leftCols<3>() = -skew(x);
  dx.rightCols<3>() = Mat3::Identity();
  return dproj * dx;
}

Linearization linearize(const Pose& pose, std::span<const Correspondence> corrs,
                        const CameraIntrinsics& k, const std::vector<double>& w,
                        const RefineOptions& o) {
  Linearization lin;
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    if (w[i] <= 0.0) continue;
    const Point3 x = pose * corrs[i].p3;
    const Vec2 r(k.fx * x.x() / x.z() + k.cx - corrs[i].p2.x(),
                 k.fy * x.y() / x.z() + k.cy - corrs[i].p2.y());
    const double sq = r.squaredNorm();
    lin.cost += 0.5 * w[i] * huber_rho(sq, o);
    const double wi = w[i] * huber_weight(sq, o);
    const auto j = point_jacobian(x, k);
    lin.h.noalias() += wi * j.transpose() * j;
    lin.g.noalias() += wi * j.transpose() * r;
  }
  return lin;
}

std::vector<double> residual_norms(const Pose& pose, std::span<const Correspondence> corrs,
                                   const CameraIntrinsics& k) {
  std::vector<double> out;
  out.reserve(corrs.size());
  for (const auto& c : corrs) {
    const Point3 x = pose * c.p3;
    if (std::abs(x.z()) < 1e-300) {
      out.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    const Vec2 r(k.fx * x.x() / x.z() + k.cx - c.p2.x(), k.fy * x.y() / x.z() + k.cy - c.p2.y());
    out.push_back(r.norm());
  }
  return out;
}

double rms_of(const std::vector<double>& residuals) {
  if (residuals.empty()) return 0.0;
  double s = 0.0;
  for (double r : residuals) s += r * r;
  return std::sqrt(s / static_cast<double>(residuals.size()));
}

std::size_t count_positive_weight(std::span<const Correspondence> corrs) {
  return static_cast<std::size_t>(std::count_if(
      corrs.begin(), corrs.end(), [](const Correspondence& c) { return c.weight > 0.0; }));
}

std::vector<Point3> weighted_points(std::span<const Correspondence> corrs) {
  std::vector<Point3> pts;
  for (const auto& c : corrs)
    if (c.weight > 0.0) pts.push_back(c.p3);
  return pts;
}

void check_inputs(std::span<const Correspondence> corrs, const CameraIntrinsics& k) {
  k.validate();
  for (const auto& c : corrs) {
    if (!c.p3.allFinite() || !c.p2.allFinite() || !std::isfinite(c.weight) || c.weight < 0.0) {
      throw InvalidArgument("correspondence with non-finite coordinates or negative weight");
    }
  }
}

}  // namespace

const char* to_string(Conditioning c) {
  switch (c) {
    case Conditioning::kWellConditioned: return "WellConditioned";
    case Conditioning::kNearCollinear: return "NearCollinear";
    case Conditioning::kNearPlanar: return "NearPlanar";
    case Conditioning::kDegenerate: return "Degenerate";
  }
  return "Degenerate";
}

DegeneracyReport check_degeneracy(std::span<const Point3> points) {
  if (points.empty()) throw EmptyInput("no points to check");
  DegeneracyReport rep;
  rep.n_points = points.size();
  Point3 c = Point3::Zero();
  for (const auto& p : points) c += p;
  c /= static_cast<double>(points.size());
  Mat3 scatter = Mat3::Zero();
  for (const auto& p : points) scatter += (p - c) * (p - c).transpose();
  Eigen::SelfAdjointEigenSolver<Mat3> eig(scatter);
  for (int i = 0; i < 3; ++i) {
    rep.spread_singular_values[i] = std::sqrt(std::max(eig.eigenvalues()[2 - i], 0.0));
    rep.principal_axes.col(i) = eig.eigenvectors().col(2 - i);
  }
  const auto& s = rep.spread_singular_values;
  if (points.size() < kMinPnPPoints || !(s[0] > 0.0)) {
    rep.classification = Conditioning::kDegenerate;
  } else if (s[1] / s[0] < kSpreadRatioThreshold) {
    rep.classification = Conditioning::kNearCollinear;
  } else if (s[2] / s[0] < kSpreadRatioThreshold) {
    rep.classification = Conditioning::kNearPlanar;
  } else {
    rep.classification = Conditioning::kWellConditioned;
  }
  return rep;
}

DegenerateConfiguration::DegenerateConfiguration(DegeneracyReport report)
    : Error(ErrorCategory::kInsufficientData, describe(report)), report_(report) {}

Pose apply_increment(const Pose& pose, const Vec6& xi) {
  const Mat3 dr = exp_so3(xi.head<3>());
  return Pose(dr * pose.rotation(), dr * pose.translation() + xi.tail<3>());
}

Eigen::VectorXd reprojection_residuals(const Pose& pose, std::span<const Correspondence> corrs,
                                       const CameraIntrinsics& k) {
  Eigen::VectorXd r(2 * static_cast<Eigen::Index>(corrs.size()));
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    const Point3 x = pose * corrs[i].p3;
    r[2 * i] = k.fx * x.x() / x.z() + k.cx - corrs[i].p2.x();
    r[2 * i + 1] = k.fy * x.y() / x.z() + k.cy - corrs[i].p2.y();
  }
  return r;
}

Eigen::MatrixXd reprojection_jacobian(const Pose& pose, std::span<const Correspondence> corrs,
                                      const CameraIntrinsics& k) {
  Eigen::MatrixXd j(2 * static_cast<Eigen::Index>(corrs.size()), 6);
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    j.middleRows<2>(2 * static_cast<Eigen::Index>(i)) = point_jacobian(pose * corrs[i].p3, k);
  }
  return j;
}

PnPSolution refine_pose(const Pose& initial, std::span<const Correspondence> corrs,
                        const CameraIntrinsics& k, const RefineOptions& opts) {
  if (corrs.empty()) throw EmptyInput("no correspondences to refine");
  check_inputs(corrs, k);
  const std::size_t n_weighted = count_positive_weight(corrs);
  if (n_weighted == 0) throw EmptyInput("all correspondences have zero weight");

  // Points behind the camera at the start sit out until a step brings them back.
  std::vector<double> w(corrs.size());
  std::size_t in_front = 0;
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    const bool ok = (initial * corrs[i].p3).z() > kMinDepth;
    w[i] = ok ? corrs[i].weight : 0.0;
    if (ok && corrs[i].weight > 0.0) ++in_front;
  }
  if (2 * in_front <= n_weighted) {
    throw DivergedBehindCamera("majority of points lie behind the camera at the initial pose");
  }
  bool sidelined = in_front < n_weighted;

  Pose pose = initial;
  Linearization lin = linearize(pose, corrs, k, w, opts);
  double mu = opts.damping_init * lin.h.diagonal().maxCoeff();
  double nu = 2.0;
  int accepted = 0;
  const double exact_cost = 0.5 * kExactRms * kExactRms * static_cast<double>(n_weighted);

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    if (lin.cost <= exact_cost || lin.g.lpNorm<Eigen::Infinity>() == 0.0) break;
    const Vec6 step = (lin.h + mu * Mat6::Identity()).ldlt().solve(-lin.g);
    if (!step.allFinite()) throw NumericalFailure("refinement step is not finite");
    if (step.norm() <= 1e-15) break;

    const Pose trial = apply_increment(pose, step);
    const auto trial_cost = evaluate_cost(trial, corrs, k, w, opts);
    const double predicted = 0.5 * step.dot(mu * step - lin.g);
    if (trial_cost && *trial_cost < lin.cost && predicted > 0.0) {
      const double rel = (lin.cost - *trial_cost) / lin.cost;
      const double gain = (lin.cost - *trial_cost) / predicted;
      pose = trial;
      ++accepted;
      mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * gain - 1.0, 3));
      nu = 2.0;
      bool reactivated = false;
      if (sidelined) {
        sidelined = false;
        for (std::size_t i = 0; i < corrs.size(); ++i) {
          if (w[i] > 0.0 || corrs[i].weight <= 0.0) continue;
          if ((pose * corrs[i].p3).z() > kMinDepth) {
            w[i] = corrs[i].weight;
            reactivated = true;
          } else {
            sidelined = true;
          }
        }
      }
      lin = linearize(pose, corrs, k, w, opts);
      if (!reactivated && rel < opts.fn_tol) break;
    } else {
      mu *= nu;
      nu *= 2.0;
      if (!std::isfinite(mu) || mu > 1e300) break;
    }
  }

  std::size_t behind = 0;
  for (const auto& c : corrs) {
    if (c.weight > 0.0 && (pose * c.p3).z() <= kMinDepth) ++behind;
  }
  if (2 * behind >= n_weighted) {
    throw DivergedBehindCamera("refinement left the majority of points behind the camera");
  }

  PnPSolution sol;
  sol.pose = pose;
  sol.per_point_residuals = residual_norms(pose, corrs, k);
  sol.rms_reprojection_error = rms_of(sol.per_point_residuals);
  sol.iterations = accepted;
  const auto pts = weighted_points(corrs);
  sol.condition_report = check_degeneracy(pts);
  return sol;
}

namespace {

std::vector<Pose> linear_candidates(std::span<const Correspondence> corrs,
                                    const CameraIntrinsics& k, const DegeneracyReport& rep) {
  if (rep.classification == Conditioning::kDegenerate ||
      rep.classification == Conditioning::kNearCollinear) {
    throw DegenerateConfiguration(rep);
  }
  std::vector<Pose> out;
  if (rep.classification == Conditioning::kNearPlanar) {
    out = detail::epnp_candidates(corrs, k, true);
  } else {
    out = detail::epnp_candidates(corrs, k, false);
  }
  if (out.empty()) throw NumericalFailure("EPnP produced no valid solution");
  return out;
}

// Reprojection rms after a single refinement step; used to rank beta cases.
double one_step_rms(const Pose& pose, std::span<const Correspondence> corrs,
                    const CameraIntrinsics& k) {
  RefineOptions one;
  one.max_iters = 1;
  try {
    return refine_pose(pose, corrs, k, one).rms_reprojection_error;
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

Pose solve_pnp_linear(std::span<const Correspondence> corrs, const CameraIntrinsics& k) {
  check_inputs(corrs, k);
  const auto pts = weighted_points(corrs);
  if (pts.empty()) throw EmptyInput("no correspondences with positive weight");
  const DegeneracyReport rep = check_degeneracy(pts);
  const auto candidates = linear_candidates(corrs, k, rep);
  std::size_t best = 0;
  double best_rms = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double r = one_step_rms(candidates[i], corrs, k);
    if (r < best_rms) {
      best_rms = r;
      best = i;
    }
  }
  return candidates[best];
}

PnPSolution solve_pnp(std::span<const Correspondence> corrs, const CameraIntrinsics& k,
                      const PnPOptions& opts) {
  check_inputs(corrs, k);
  const auto pts = weighted_points(corrs);
  if (pts.empty()) throw EmptyInput("no correspondences with positive weight");
  const DegeneracyReport rep = check_degeneracy(pts);
  const auto candidates = linear_candidates(corrs, k, rep);

  std::vector<Pose> starts;
  if (rep.classification == Conditioning::kNearPlanar) {
    // Planar scenes admit a second local minimum; refine every case.
    starts = candidates;
    for (const auto& c : detail::epnp_candidates(corrs, k, false)) starts.push_back(c);
  } else {
    std::size_t best = 0;
    double best_rms = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const double r = one_step_rms(candidates[i], corrs, k);
      if (r < best_rms) {
        best_rms = r;
        best = i;
      }
    }
    starts.push_back(candidates[best]);
  }

  std::vector<double> weights;
  for (const auto& c : corrs) weights.push_back(c.weight);
  std::optional<PnPSolution> best;
  double best_cost = std::numeric_limits<double>::infinity();
  std::exception_ptr last_error;
  for (const auto& start : starts) {
    try {
      PnPSolution sol = refine_pose(start, corrs, k, opts);
      const double c = evaluate_cost(sol.pose, corrs, k, weights, opts)
                           .value_or(std::numeric_limits<double>::infinity());
      if (!best || c < best_cost) {
        best_cost = c;
        best = std::move(sol);
      }
    } catch (const Error&) {
      last_error = std::current_exception();
    }
  }
  if (!best) {
    if (last_error) std::rethrow_exception(last_error);
    throw NumericalFailure("PnP refinement failed from every start");
  }
  best->condition_report = rep;
  return *best;
}

}  // namespace refcalib
