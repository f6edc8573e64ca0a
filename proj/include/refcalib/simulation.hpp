#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "refcalib/calibration.hpp"
#include "refcalib/geometry.hpp"
#include "refcalib/kinematics.hpp"

namespace refcalib {

struct NoiseModel {
  double mu = 0.0;     // pixels
  double sigma = 0.0;  // pixels
};

// Eye-on-base camera placement around the look-at point.
struct PlacementBounds {
  double radius_min = 1.0;  // meters
  double radius_max = 2.5;
  double elevation_min = 10.0 * M_PI / 180.0;  // radians
  double elevation_max = 60.0 * M_PI / 180.0;
};

// Eye-in-hand camera mount relative to the last link.
struct MountBounds {
  double max_offset = 0.15;                 // meters
  double max_tilt = 30.0 * M_PI / 180.0;    // optical axis vs. link z axis
};

struct ScenarioConfig {
  std::uint64_t seed = 0;
  CalibrationMode mode = CalibrationMode::kEyeOnBase;
  double fps = 30.0;
  double duration = 10.0;  // seconds
  int n_direction_switches = 10;
  // Per-joint speed bound of the piecewise-constant joint velocities, rad/s.
  double joint_speed = 0.3;
  CameraIntrinsics camera = CameraIntrinsics::FromHorizontalFov(M_PI / 3.0, 1920, 1080);
  PlacementBounds placement;
  MountBounds mount;
  NoiseModel noise;

  // Pins the camera (T^CB for eye-on-base, T^CE for eye-in-hand) instead of sampling it.
  std::optional<Pose> fixed_camera;
  // Pins the first joint configuration of the trajectory.
  std::optional<Eigen::VectorXd> start_configuration;

  // Throws InvalidArgument.
  void validate() const;
  std::size_t frame_count() const;
};

struct GroundTruthScene {
  CalibrationMode mode = CalibrationMode::kEyeOnBase;
  KinematicChain chain;
  ReferencePoint ref;
  CameraIntrinsics camera;
  Pose t_gt;  // T^CB or T^CE
  JointLog joint_log;
  Track2D clean_track;
};

// Deterministic per-purpose seed derived from a root seed and a label.
std::uint64_t derive_seed(std::uint64_t root, std::string_view label, std::uint64_t index = 0);

// Samples a camera, a joint-space trajectory and the exact projections of
// the reference point. Every frame is flagged sync. Throws UnreachableView if
// no placement out of 20 keeps the point in view.
GroundTruthScene generate_scene(const ScenarioConfig& cfg, const KinematicChain& chain,
                                const ReferencePoint& ref);

// Camera pose in the base frame at frame `row` of the scene's joint log
// (T^CB for eye-on-base; T^CE * T^EB(q) for eye-in-hand).
Pose camera_from_base(const GroundTruthScene& scene, std::size_t row);

// i.i.d. Gaussian offsets on (u, v) of visible frames; flags untouched.
Track2D corrupt_track(const Track2D& track, const NoiseModel& noise, std::uint64_t seed);

struct PoseErrors {
  double e_x_cm = 0.0;
  double e_y_cm = 0.0;
  double e_z_cm = 0.0;
  double e_trans_cm = 0.0;  // Euclidean norm of the translation error
  double e_r_rad = 0.0;     // geodesic rotation angle
};

PoseErrors evaluate(const Pose& t_est, const Pose& t_gt);

// Calibration request over a scene with the given track.
CalibrationRequest make_request(const GroundTruthScene& scene, const Track2D& track);

struct SweepRow {
  double param = 0.0;
  double mean_e_x_cm = 0.0;
  double mean_e_y_cm = 0.0;
  double mean_e_z_cm = 0.0;
  double mean_e_trans_cm = 0.0;
  double mean_e_r_rad = 0.0;
  double stderr_e_trans_cm = 0.0;
  double stderr_e_r_rad = 0.0;
  int n_ok = 0;
  int n_fail = 0;
};

struct SweepTable {
  std::string kind;  // "frames" or "noise"
  std::vector<SweepRow> rows;
  std::vector<std::string> meta;  // written as "# meta: " lines
};

// Per repeat: one scene with cfg.noise, then for each n a uniform random
// subset of n visible frames is calibrated. Needs min(n_values) >= 4.
SweepTable run_frames_sweep(const ScenarioConfig& cfg, const KinematicChain& chain,
                            const ReferencePoint& ref, std::span<const int> n_values,
                            int n_repeats = 10);

// Per repeat: one scene; the same unit-variance draws are scaled by each sigma.
SweepTable run_noise_sweep(const ScenarioConfig& cfg, const KinematicChain& chain,
                           const ReferencePoint& ref, std::span<const double> sigma_values,
                           int n_repeats = 10);

void write_sweep_csv(const SweepTable& table, std::ostream& out);

}  // namespace refcalib
