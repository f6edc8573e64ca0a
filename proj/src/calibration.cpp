#include "refcalib/calibration.hpp"

#include <cmath>
#include <unordered_map>

#include "refcalib/errors.hpp"
#include "refcalib/log.hpp"

namespace refcalib {

void Track2D::validate() const {
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (i > 0 && frames[i].frame_index <= frames[i - 1].frame_index) {
      throw NonMonotoneFrames("track", i + 1);
    }
    if (frames[i].visible && (!std::isfinite(frames[i].u) || !std::isfinite(frames[i].v))) {
      throw InvalidArgument("track frame " + std::to_string(frames[i].frame_index) +
                            " is visible but has non-finite pixel coordinates");
    }
  }
}

const char* to_string(CalibrationMode mode) {
  return mode == CalibrationMode::kEyeOnBase ? "eob" : "eih";
}

CalibrationMode calibration_mode_from_string(const std::string& s) {
  if (s == "eob" || s == "EyeOnBase") return CalibrationMode::kEyeOnBase;
  if (s == "eih" || s == "EyeInHand") return CalibrationMode::kEyeInHand;
  throw InvalidArgument("unknown calibration mode '" + s + "' (expected eob or eih)");
}

const char* to_string(DropReason reason) {
  switch (reason) {
    case DropReason::kNotVisible: return "NotVisible";
    case DropReason::kNotSynced: return "NotSynced";
    case DropReason::kMissingJoint: return "MissingJoint";
  }
  return "NotVisible";
}

DropReason drop_reason_from_string(const std::string& s) {
  if (s == "NotVisible") return DropReason::kNotVisible;
  if (s == "NotSynced") return DropReason::kNotSynced;
  if (s == "MissingJoint") return DropReason::kMissingJoint;
  throw InvalidArgument("unknown drop reason '" + s + "'");
}

FrameSelection pair_frames(const Track2D& track, const JointLog& joints,
                           const CalibrationOptions& opts) {
  track.validate();
  std::unordered_map<long long, std::size_t> joint_rows;
  joint_rows.reserve(joints.frames.size());
  for (std::size_t i = 0; i < joints.frames.size(); ++i) {
    joint_rows.emplace(joints.frames[i].frame_index, i);
  }
  FrameSelection sel;
  for (std::size_t i = 0; i < track.frames.size(); ++i) {
    const TrackFrame& f = track.frames[i];
    if (!f.visible) {
      sel.dropped.push_back({f.frame_index, DropReason::kNotVisible});
    } else if (opts.use_only_sync && !f.sync) {
      sel.dropped.push_back({f.frame_index, DropReason::kNotSynced});
    } else if (auto it = joint_rows.find(f.frame_index); it == joint_rows.end()) {
      sel.dropped.push_back({f.frame_index, DropReason::kMissingJoint});
    } else {
      sel.pairs.push_back({f.frame_index, i, it->second});
    }
  }
  return sel;
}

FrameSelection select_frames(const Track2D& track, const JointLog& joints,
                             const CalibrationOptions& opts) {
  if (opts.min_pairs < kMinPnPPoints) {
    throw InvalidArgument("min_pairs must be at least " + std::to_string(kMinPnPPoints));
  }
  FrameSelection sel = pair_frames(track, joints, opts);
  if (sel.pairs.size() < opts.min_pairs) throw TooFewPairs(sel.pairs.size(), opts.min_pairs);
  return sel;
}

std::vector<Correspondence> build_correspondences(const CalibrationRequest& req,
                                                  const FrameSelection& sel) {
  std::vector<Correspondence> corrs;
  corrs.reserve(sel.pairs.size());
  for (const FramePair& p : sel.pairs) {
    const Eigen::VectorXd& q = req.joints.frames[p.joint_row].positions;
    const TrackFrame& t = req.track.frames[p.track_row];
    Correspondence c;
    c.p2 = Pixel(t.u, t.v);
    if (req.mode == CalibrationMode::kEyeOnBase) {
      c.p3 = reference_point_in_base(req.chain, req.ref, q);
    } else {
      c.p3 = base_point_in_ee_frame(req.chain, q, req.ref.offset);
    }
    corrs.push_back(c);
  }
  return corrs;
}

namespace {

CalibrationResult run_pipeline(const CalibrationRequest& req) {
  req.intrinsics.validate();
  req.chain.validate(req.ref);
  req.joints.validate(req.chain.dof());
  const FrameSelection sel = select_frames(req.track, req.joints, req.options);
  const auto corrs = build_correspondences(req, sel);

  PnPOptions popts = req.options.refine;
  popts.robust = req.options.robust;

  CalibrationResult result;
  result.mode = req.mode;
  result.solution = solve_pnp(corrs, req.intrinsics, popts);
  result.pose = result.solution.pose;
  result.n_pairs_used = sel.pairs.size();
  result.dropped = sel.dropped;
  for (const auto& p : sel.pairs) result.used_frames.push_back(p.frame_index);
  if (result.solution.condition_report.classification == Conditioning::kNearPlanar) {
    log_warn("reference point trajectory is nearly planar; consider covering more of the workspace");
  }
  return result;
}

}  // namespace

CalibrationResult calibrate_eye_on_base(const CalibrationRequest& req) {
  if (req.mode != CalibrationMode::kEyeOnBase) {
    throw InvalidArgument("calibrate_eye_on_base called with an eye-in-hand request");
  }
  return run_pipeline(req);
}

CalibrationResult calibrate_eye_in_hand(const CalibrationRequest& req) {
  if (req.mode != CalibrationMode::kEyeInHand) {
    throw InvalidArgument("calibrate_eye_in_hand called with an eye-on-base request");
  }
  if (req.ref.link_index != 0) {
    throw InvalidArgument("eye-in-hand calibration needs a reference point on the base link (link 0)");
  }
  return run_pipeline(req);
}

CalibrationResult calibrate(const CalibrationRequest& req) {
  return req.mode == CalibrationMode::kEyeOnBase ? calibrate_eye_on_base(req)
                                                 : calibrate_eye_in_hand(req);
}

}  // namespace refcalib
