#include <gtest/gtest.h>

#include <random>

#include "refcalib/calibration.hpp"
#include "refcalib/simulation.hpp"

namespace refcalib {
namespace {

Track2D make_track(int n, int n_sync, int n_invisible) {
  Track2D t;
  for (int i = 0; i < n; ++i) {
    TrackFrame f;
    f.frame_index = i;
    f.u = 100.0 + i;
    f.v = 200.0;
    f.sync = i < n_sync;
    f.visible = i >= n_invisible;
    t.frames.push_back(f);
  }
  return t;
}

JointLog make_joints(int n, int dof = 7) {
  JointLog log;
  for (int i = 0; i < n; ++i) log.frames.push_back({i, i / 30.0, Eigen::VectorXd::Zero(dof)});
  return log;
}

Pose random_pose(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return Pose::FromQuaternion(Eigen::Quaterniond(n(rng), n(rng), n(rng), n(rng)),
                              Vec3(n(rng), n(rng), n(rng)));
}

TEST(SelectFrames, SyncFilter) {
  const auto sel = select_frames(make_track(300, 20, 0), make_joints(300), {});
  EXPECT_EQ(sel.pairs.size(), 20u);
  EXPECT_EQ(sel.dropped.size(), 280u);
  for (const auto& d : sel.dropped) EXPECT_EQ(d.reason, DropReason::kNotSynced);
}

TEST(SelectFrames, InvisibleFramesDropped) {
  const auto sel = select_frames(make_track(40, 40, 5), make_joints(40), {});
  EXPECT_EQ(sel.pairs.size(), 35u);
  ASSERT_EQ(sel.dropped.size(), 5u);
  for (const auto& d : sel.dropped) EXPECT_EQ(d.reason, DropReason::kNotVisible);
}

TEST(SelectFrames, AllFramesMode) {
  CalibrationOptions opts;
  opts.use_only_sync = false;
  const auto sel = select_frames(make_track(300, 0, 0), make_joints(300), opts);
  EXPECT_EQ(sel.pairs.size(), 300u);
  EXPECT_TRUE(sel.dropped.empty());
}

TEST(SelectFrames, MissingJointsAndConservation) {
  const Track2D track = make_track(50, 50, 3);
  JointLog joints = make_joints(50);
  joints.frames.erase(joints.frames.begin() + 10, joints.frames.begin() + 14);
  const auto sel = select_frames(track, joints, {});
  EXPECT_EQ(sel.pairs.size() + sel.dropped.size(), track.frames.size());
  int missing = 0;
  for (const auto& d : sel.dropped) missing += d.reason == DropReason::kMissingJoint;
  EXPECT_EQ(missing, 4);
  for (const auto& p : sel.pairs) {
    EXPECT_EQ(track.frames[p.track_row].frame_index, p.frame_index);
    EXPECT_EQ(joints.frames[p.joint_row].frame_index, p.frame_index);
  }
}

TEST(SelectFrames, TooFewPairs) {
  try {
    select_frames(make_track(300, 9, 0), make_joints(300), {});
    FAIL() << "expected TooFewPairs";
  } catch (const TooFewPairs& e) {
    EXPECT_EQ(e.found(), 9u);
    EXPECT_EQ(e.required(), 10u);
  }
  EXPECT_THROW(select_frames(Track2D{}, make_joints(3), {}), TooFewPairs);
  CalibrationOptions bad;
  bad.min_pairs = 3;
  EXPECT_THROW(select_frames(make_track(10, 10, 0), make_joints(10), bad), InvalidArgument);
}

class SceneCalibration : public ::testing::TestWithParam<CalibrationMode> {};

TEST_P(SceneCalibration, NoiselessRoundTrip) {
  const auto chain = make_panda_chain();
  const auto ref = GetParam() == CalibrationMode::kEyeOnBase ? panda_fingertip_reference()
                                                             : panda_base_reference();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ScenarioConfig cfg;
    cfg.seed = seed;
    cfg.mode = GetParam();
    const GroundTruthScene scene = generate_scene(cfg, chain, ref);
    Track2D track = scene.clean_track;
    // 50 sync frames spread evenly over the visible part of the trajectory.
    std::vector<std::size_t> visible;
    for (std::size_t i = 0; i < track.frames.size(); ++i) {
      track.frames[i].sync = false;
      if (track.frames[i].visible) visible.push_back(i);
    }
    ASSERT_GE(visible.size(), 50u);
    for (std::size_t k = 0; k < 50; ++k) track.frames[visible[k * visible.size() / 50]].sync = true;
    const CalibrationResult r = calibrate(make_request(scene, track));
    EXPECT_EQ(r.n_pairs_used, 50u);
    EXPECT_EQ(r.n_pairs_used + r.dropped.size(), track.frames.size());
    EXPECT_LT((r.pose.translation() - scene.t_gt.translation()).cwiseAbs().maxCoeff(), 1e-5);
    EXPECT_LT(rotation_error(r.pose, scene.t_gt), 1e-6);
  }
}

TEST_P(SceneCalibration, Deterministic) {
  const auto chain = make_panda_chain();
  const auto ref = GetParam() == CalibrationMode::kEyeOnBase ? panda_fingertip_reference()
                                                             : panda_base_reference();
  ScenarioConfig cfg;
  cfg.seed = 77;
  cfg.mode = GetParam();
  cfg.noise.sigma = 3.0;
  const GroundTruthScene scene = generate_scene(cfg, chain, ref);
  const Track2D noisy = corrupt_track(scene.clean_track, cfg.noise, 5);
  const auto a = calibrate(make_request(scene, noisy));
  const auto b = calibrate(make_request(scene, noisy));
  EXPECT_EQ(a.pose.matrix(), b.pose.matrix());
  EXPECT_EQ(a.solution.rms_reprojection_error, b.solution.rms_reprojection_error);
}

INSTANTIATE_TEST_SUITE_P(Modes, SceneCalibration,
                         ::testing::Values(CalibrationMode::kEyeOnBase, CalibrationMode::kEyeInHand),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Calibrate, LinearTrajectoryIsDegenerate) {
  Joint slide;
  slide.name = "slide";
  slide.kind = JointKind::kPrismatic;
  slide.axis = Vec3::UnitX();
  slide.limits = std::pair{-0.4, 0.4};
  const KinematicChain chain("rail", {slide});
  ScenarioConfig cfg;
  cfg.seed = 3;
  const GroundTruthScene scene = generate_scene(cfg, chain, {1, Point3(0, 0, 0.2)});
  EXPECT_THROW(calibrate(make_request(scene, scene.clean_track)), DegenerateConfiguration);
}

TEST(Calibrate, ModeChecks) {
  const auto chain = make_panda_chain();
  ScenarioConfig cfg;
  const GroundTruthScene scene = generate_scene(cfg, chain, panda_fingertip_reference());
  CalibrationRequest req = make_request(scene, scene.clean_track);
  EXPECT_THROW(calibrate_eye_in_hand(req), InvalidArgument);
  req.mode = CalibrationMode::kEyeInHand;
  EXPECT_THROW(calibrate(req), InvalidArgument);  // reference point is not on the base
  EXPECT_THROW(calibrate_eye_on_base(req), InvalidArgument);
}

TEST(Calibrate, ModeStrings) {
  EXPECT_EQ(calibration_mode_from_string("eob"), CalibrationMode::kEyeOnBase);
  EXPECT_EQ(calibration_mode_from_string("EyeInHand"), CalibrationMode::kEyeInHand);
  EXPECT_THROW(calibration_mode_from_string("hand"), InvalidArgument);
  for (auto r : {DropReason::kNotVisible, DropReason::kNotSynced, DropReason::kMissingJoint}) {
    EXPECT_EQ(drop_reason_from_string(to_string(r)), r);
  }
}

TEST(AxXb, IdenticalMotionsGiveIdentity) {
  std::mt19937_64 rng(1);
  std::vector<Pose> a;
  for (int i = 0; i < 3; ++i) a.push_back(random_pose(rng));
  const Pose x = solve_axxb(a, a);
  EXPECT_LT((x.matrix() - Mat4::Identity()).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(AxXb, ConstructAndRecover) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const Pose x = random_pose(rng);
    std::vector<Pose> a, b;
    for (int i = 0; i < 3; ++i) {
      b.push_back(random_pose(rng));
      a.push_back(compose(compose(x, b.back()), invert(x)));
    }
    const Pose est = solve_axxb(a, b);
    EXPECT_LT((est.matrix() - x.matrix()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(AxXb, ParallelAxesRejected) {
  const std::vector<Pose> a{Pose(rot_z(0.3), Vec3(1, 0, 0)), Pose(rot_z(-0.7), Vec3(0, 1, 0))};
  const std::vector<Pose> b = a;
  EXPECT_THROW(solve_axxb(a, b), InsufficientMotion);
  EXPECT_THROW(solve_axxb(std::vector<Pose>{a[0]}, std::vector<Pose>{b[0]}), InsufficientMotion);
  EXPECT_THROW(solve_axxb(a, std::vector<Pose>{b[0]}), DimensionMismatch);
}

}  // namespace
}  // namespace refcalib
