#pragma once

#include <span>
#include <string>
#include <vector>

#include "refcalib/geometry.hpp"
#include "refcalib/kinematics.hpp"
#include "refcalib/pnp.hpp"

namespace refcalib {

struct TrackFrame {
  long long frame_index = 0;
  double u = 0.0;
  double v = 0.0;
  bool visible = true;
  // Captured while the robot was at rest; only these are paired by default.
  bool sync = true;
};

struct Track2D {
  std::vector<TrackFrame> frames;

  // Throws NonMonotoneFrames, or InvalidArgument for non-finite visible pixels.
  void validate() const;
};

enum class CalibrationMode { kEyeOnBase, kEyeInHand };

const char* to_string(CalibrationMode mode);
CalibrationMode calibration_mode_from_string(const std::string& s);

struct CalibrationOptions {
  bool use_only_sync = true;
  std::size_t min_pairs = 10;
  bool robust = false;
  RefineOptions refine;
};

struct CalibrationRequest {
  CalibrationMode mode = CalibrationMode::kEyeOnBase;
  KinematicChain chain;
  ReferencePoint ref;
  CameraIntrinsics intrinsics;
  Track2D track;
  JointLog joints;
  CalibrationOptions options;
};

enum class DropReason { kNotVisible, kNotSynced, kMissingJoint };

const char* to_string(DropReason reason);
DropReason drop_reason_from_string(const std::string& s);

struct DroppedFrame {
  long long frame_index = 0;
  DropReason reason = DropReason::kNotVisible;

  bool operator==(const DroppedFrame&) const = default;
};

struct FramePair {
  long long frame_index = 0;
  std::size_t track_row = 0;
  std::size_t joint_row = 0;
};

// Every track frame ends up in exactly one of `pairs` or `dropped`.
struct FrameSelection {
  std::vector<FramePair> pairs;
  std::vector<DroppedFrame> dropped;
};

struct CalibrationResult {
  CalibrationMode mode = CalibrationMode::kEyeOnBase;
  Pose pose;  // T^CB for eye-on-base, T^CE for eye-in-hand
  PnPSolution solution;
  std::size_t n_pairs_used = 0;
  std::vector<DroppedFrame> dropped;
  std::vector<long long> used_frames;
};

// Pairs track rows with joint rows by frame index. Does not enforce
// min_pairs; see select_frames.
FrameSelection pair_frames(const Track2D& track, const JointLog& joints,
                           const CalibrationOptions& opts);

// As pair_frames, then throws TooFewPairs below opts.min_pairs.
FrameSelection select_frames(const Track2D& track, const JointLog& joints,
                             const CalibrationOptions& opts);

// 2D-3D pairs for the selected frames: reference point in the base frame
// (eye-on-base) or the base reference point in the end-effector frame
// (eye-in-hand).
std::vector<Correspondence> build_correspondences(const CalibrationRequest& req,
                                                  const FrameSelection& sel);

CalibrationResult calibrate_eye_on_base(const CalibrationRequest& req);
CalibrationResult calibrate_eye_in_hand(const CalibrationRequest& req);
// Dispatches on req.mode.
CalibrationResult calibrate(const CalibrationRequest& req);

// Classical AX = XB hand-eye solve: rotation from the log-map
// correspondences alpha_i = R_X beta_i, then translation by least squares on
// (R_A - I) t_X = R_X t_B - t_A. Throws InsufficientMotion when the rotation
// axes of A are all parallel.
Pose solve_axxb(std::span<const Pose> a_list, std::span<const Pose> b_list);

}  // namespace refcalib
