// Acceptance suite: one PASS/FAIL line per criterion.
//
// Criteria listed with --expect-fail are known failures; the run succeeds when
// exactly those criteria fail. Without the option every criterion must pass.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "refcalib/calibration.hpp"
#include "refcalib/io.hpp"
#include "refcalib/pnp.hpp"
#include "refcalib/simulation.hpp"

namespace refcalib {
namespace {

constexpr std::uint64_t kRootSeed = 1;
constexpr double kDeg = M_PI / 180.0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects sub-checks of one criterion into a single outcome.
class Checker {
 public:
  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass_ = false;
      failures_ << (failures_.tellp() > 0 ? "; " : "") << what;
    }
  }
  void note(const std::string& what) { notes_ << (notes_.tellp() > 0 ? "; " : "") << what; }
  Outcome outcome() const {
    Outcome o;
    o.pass = pass_;
    o.detail = pass_ ? notes_.str() : failures_.str() + " | " + notes_.str();
    return o;
  }

 private:
  bool pass_ = true;
  std::ostringstream failures_;
  std::ostringstream notes_;
};

std::string fmt(double v, int precision = 3) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

ReferencePoint reference_for(CalibrationMode mode) {
  return mode == CalibrationMode::kEyeOnBase ? panda_fingertip_reference() : panda_base_reference();
}

Pose random_pose(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return Pose::FromQuaternion(Eigen::Quaterniond(n(rng), n(rng), n(rng), n(rng)),
                              Vec3(n(rng), n(rng), n(rng)));
}

// Noiseless correspondences in front of the camera, expressed in the object frame of `pose`.
std::vector<Correspondence> synth(const Pose& pose, int n, std::mt19937_64& rng,
                                  const CameraIntrinsics& k) {
  std::uniform_real_distribution<double> xy(-0.6, 0.6), z(1.5, 3.0);
  const Pose inv = pose.inverse();
  std::vector<Correspondence> out;
  for (int i = 0; i < n; ++i) {
    const Point3 pc(xy(rng), xy(rng), z(rng));
    out.push_back({inv * pc, project(k, pc), 1.0});
  }
  return out;
}

// Clean track restricted to `rows` as the only sync frames.
Track2D with_sync_rows(const Track2D& clean, const std::vector<std::size_t>& rows) {
  Track2D t = clean;
  for (auto& f : t.frames) f.sync = false;
  for (const auto r : rows) t.frames[r].sync = true;
  return t;
}

std::vector<std::size_t> visible_rows(const Track2D& t) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < t.frames.size(); ++i) {
    if (t.frames[i].visible) out.push_back(i);
  }
  return out;
}

// ---------------------------------------------------------------- criteria

Outcome noiseless_round_trip() {
  Checker c;
  const auto chain = make_panda_chain();
  const auto start = std::chrono::steady_clock::now();
  double worst_t = 0.0, worst_r = 0.0;
  for (const auto mode : {CalibrationMode::kEyeOnBase, CalibrationMode::kEyeInHand}) {
    for (std::uint64_t i = 0; i < 10; ++i) {
      ScenarioConfig cfg;
      cfg.seed = derive_seed(kRootSeed, "noiseless", i);
      cfg.mode = mode;
      try {
        const GroundTruthScene scene = generate_scene(cfg, chain, reference_for(mode));
        const CalibrationResult r = calibrate(make_request(scene, scene.clean_track));
        const double et = (r.pose.translation() - scene.t_gt.translation()).cwiseAbs().maxCoeff();
        const double er = rotation_error(r.pose, scene.t_gt);
        worst_t = std::max(worst_t, et);
        worst_r = std::max(worst_r, er);
        c.check(et < 1e-5 && er < 1e-6, std::string(to_string(mode)) + " scene " +
                                            std::to_string(i) + " off by " + fmt(et) + " m, " +
                                            fmt(er) + " rad");
      } catch (const std::exception& e) {
        c.check(false, std::string(to_string(mode)) + " scene " + std::to_string(i) + ": " + e.what());
      }
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.check(secs < 10.0, "runtime " + fmt(secs) + " s exceeds 10 s");
  c.note("worst " + fmt(worst_t) + " m per axis, " + fmt(worst_r) + " rad, " + fmt(secs) + " s");
  return c.outcome();
}

Outcome noise_envelope() {
  Checker c;
  const auto chain = make_panda_chain();
  for (const auto mode : {CalibrationMode::kEyeOnBase, CalibrationMode::kEyeInHand}) {
    const std::string m = to_string(mode);
    ScenarioConfig cfg;
    cfg.seed = kRootSeed;
    cfg.mode = mode;
    const std::vector<double> levels{2, 3, 4, 5, 6, 7, 8, 9, 10};
    const SweepTable bound = run_noise_sweep(cfg, chain, reference_for(mode), levels, 10);
    for (const auto& row : bound.rows) {
      const double worst = std::max({row.mean_e_x_cm, row.mean_e_y_cm, row.mean_e_z_cm});
      c.check(row.n_fail == 0 && worst < 1.0,
              m + " sigma=" + fmt(row.param) + " mean (" + fmt(row.mean_e_x_cm) + ", " +
                  fmt(row.mean_e_y_cm) + ", " + fmt(row.mean_e_z_cm) + ") cm, " +
                  std::to_string(row.n_fail) + " failed");
      if (row.param == 10.0) {
        c.note(m + " sigma=10 (" + fmt(row.mean_e_x_cm) + ", " + fmt(row.mean_e_y_cm) + ", " +
               fmt(row.mean_e_z_cm) + ") cm");
      }
    }
    const std::vector<double> trend_levels{2, 4, 6, 8, 10, 12, 14, 16};
    const SweepTable trend = run_noise_sweep(cfg, chain, reference_for(mode), trend_levels, 30);
    for (std::size_t i = 1; i < trend.rows.size(); ++i) {
      const auto& a = trend.rows[i - 1];
      const auto& b = trend.rows[i];
      const double slack = 2.0 * std::hypot(a.stderr_e_trans_cm, b.stderr_e_trans_cm);
      c.check(b.mean_e_trans_cm >= a.mean_e_trans_cm - slack,
              m + " trend drops from sigma=" + fmt(a.param) + " to " + fmt(b.param));
    }
  }
  return c.outcome();
}

Outcome frame_count_convergence() {
  Checker c;
  const auto chain = make_panda_chain();
  for (const auto mode : {CalibrationMode::kEyeOnBase, CalibrationMode::kEyeInHand}) {
    const std::string m = to_string(mode);
    ScenarioConfig cfg;
    cfg.seed = kRootSeed;
    cfg.mode = mode;
    cfg.noise.sigma = 2.0;
    const std::vector<int> counts{4, 10, 50, 100};
    const SweepTable t = run_frames_sweep(cfg, chain, reference_for(mode), counts, 10);
    const SweepRow& n4 = t.rows[0];
    const SweepRow& n10 = t.rows[1];
    c.check(n10.n_fail == 0 && n10.mean_e_trans_cm < 0.3,
            m + " n=10 translation " + fmt(n10.mean_e_trans_cm) + " cm >= 0.3");
    c.check(n10.n_fail == 0 && n10.mean_e_r_rad < 3.0 * kDeg,
            m + " n=10 rotation " + fmt(n10.mean_e_r_rad / kDeg) + " deg >= 3");
    for (std::size_t i = 2; i < t.rows.size(); ++i) {
      const SweepRow& r = t.rows[i];
      c.check(r.n_fail == 0 && r.mean_e_trans_cm < n4.mean_e_trans_cm &&
                  r.mean_e_r_rad < n4.mean_e_r_rad,
              m + " n=" + fmt(r.param) + " not below n=4");
    }
    c.note(m + " n=4 " + fmt(n4.mean_e_trans_cm) + " cm; n=10 " + fmt(n10.mean_e_trans_cm) +
           " cm, " + fmt(n10.mean_e_r_rad / kDeg) + " deg; n=100 " +
           fmt(t.rows[3].mean_e_trans_cm) + " cm");
  }
  return c.outcome();
}

Outcome table_envelope() {
  Checker c;
  const auto chain = make_panda_chain();
  struct Envelope {
    CalibrationMode mode;
    double x, y, z, r;
  };
  for (const Envelope& env : {Envelope{CalibrationMode::kEyeOnBase, 0.30, 0.45, 0.60, 0.01},
                              Envelope{CalibrationMode::kEyeInHand, 0.48, 0.52, 0.77, 0.07}}) {
    const std::string m = to_string(env.mode);
    ScenarioConfig cfg;
    cfg.seed = kRootSeed;
    cfg.mode = env.mode;
    const std::vector<double> sigma{2.0};
    const SweepRow row = run_noise_sweep(cfg, chain, reference_for(env.mode), sigma, 10).rows[0];
    const std::string got = "(" + fmt(row.mean_e_x_cm) + ", " + fmt(row.mean_e_y_cm) + ", " +
                            fmt(row.mean_e_z_cm) + ") cm, " + fmt(row.mean_e_r_rad) + " rad";
    c.check(row.n_fail == 0 && row.mean_e_x_cm < 3 * env.x && row.mean_e_y_cm < 3 * env.y &&
                row.mean_e_z_cm < 3 * env.z && row.mean_e_r_rad < 3 * env.r,
            m + " " + got + " outside 3x envelope");
    c.note(m + " " + got);
  }
  return c.outcome();
}

Outcome minimum_pairs() {
  Checker c;
  const CameraIntrinsics k = CameraIntrinsics::FromHorizontalFov(M_PI / 3.0, 1920, 1080);
  std::mt19937_64 rng(derive_seed(kRootSeed, "minimum-pairs"));
  for (int t = 0; t < 20; ++t) {
    const auto corrs = synth(random_pose(rng), 3, rng, k);
    bool degenerate = false;
    try {
      solve_pnp(corrs, k);
    } catch (const DegenerateConfiguration&) {
      degenerate = true;
    }
    c.check(degenerate, "n=3 did not raise DegenerateConfiguration");
  }

  // Four well-spread frames of a noiseless scene through the full pipeline.
  const auto chain = make_panda_chain();
  double worst = 0.0;
  for (const auto mode : {CalibrationMode::kEyeOnBase, CalibrationMode::kEyeInHand}) {
    ScenarioConfig cfg;
    cfg.seed = derive_seed(kRootSeed, "minimum-pairs-scene");
    cfg.mode = mode;
    const GroundTruthScene scene = generate_scene(cfg, chain, reference_for(mode));
    const auto vis = visible_rows(scene.clean_track);
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < 4; ++i) rows.push_back(vis[i * (vis.size() - 1) / 3]);
    CalibrationRequest req = make_request(scene, with_sync_rows(scene.clean_track, rows));
    req.options.min_pairs = 4;
    try {
      const CalibrationResult r = calibrate(req);
      const double et = (r.pose.translation() - scene.t_gt.translation()).cwiseAbs().maxCoeff();
      worst = std::max(worst, et);
      c.check(r.n_pairs_used == 4 && et < 1e-4,
              std::string(to_string(mode)) + " n=4 off by " + fmt(et) + " m");
    } catch (const std::exception& e) {
      c.check(false, std::string(to_string(mode)) + " n=4: " + e.what());
    }
  }
  c.note("n=3 rejected in 20/20 trials; n=4 worst " + fmt(worst) + " m");
  return c.outcome();
}

Outcome pnp_oracle() {
  Checker c;
  const CameraIntrinsics k{800.0, 780.0, 320.0, 240.0, 640, 480};
  std::mt19937_64 rng(derive_seed(kRootSeed, "pnp-oracle"));
  double worst_t = 0.0, worst_r = 0.0;
  int bad = 0;
  for (int t = 0; t < 1000; ++t) {
    const Pose gt = random_pose(rng);
    const PnPSolution sol = solve_pnp(synth(gt, 20, rng, k), k);
    const double et = (sol.pose.translation() - gt.translation()).norm();
    const double er = rotation_error(sol.pose, gt);
    worst_t = std::max(worst_t, et);
    worst_r = std::max(worst_r, er);
    bad += !(et < 1e-6 && er < 1e-7);
  }
  c.check(bad == 0, std::to_string(bad) + "/1000 poses outside 1e-6 m / 1e-7 rad");

  double worst_j = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Pose pose = random_pose(rng);
    const auto corrs = synth(pose, 10, rng, k);
    const Eigen::MatrixXd j = reprojection_jacobian(pose, corrs, k);
    Eigen::MatrixXd fd(j.rows(), 6);
    const double h = 1e-6;
    for (int col = 0; col < 6; ++col) {
      Eigen::Matrix<double, 6, 1> xi = Eigen::Matrix<double, 6, 1>::Zero();
      xi[col] = h;
      fd.col(col) = (reprojection_residuals(apply_increment(pose, xi), corrs, k) -
                     reprojection_residuals(apply_increment(pose, -xi), corrs, k)) /
                    (2.0 * h);
    }
    worst_j = std::max(worst_j, (j - fd).norm() / fd.norm());
  }
  c.check(worst_j < 1e-4, "Jacobian relative error " + fmt(worst_j));
  c.note("worst pose error " + fmt(worst_t) + " m, " + fmt(worst_r) + " rad; Jacobian " +
         fmt(worst_j));
  return c.outcome();
}

Outcome axxb_oracle() {
  Checker c;
  std::mt19937_64 rng(derive_seed(kRootSeed, "axxb"));
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Pose x = random_pose(rng);
    std::vector<Pose> a, b;
    for (int i = 0; i < 3; ++i) {
      b.push_back(random_pose(rng));
      a.push_back(compose(compose(x, b.back()), invert(x)));
    }
    worst = std::max(worst, (solve_axxb(a, b).matrix() - x.matrix()).cwiseAbs().maxCoeff());
  }
  c.check(worst < 1e-9, "recovery error " + fmt(worst));
  const std::vector<Pose> par{Pose(rot_z(0.4), Vec3(0.1, 0, 0)), Pose(rot_z(-0.9), Vec3(0, 0.2, 0))};
  bool rejected = false;
  try {
    solve_axxb(par, par);
  } catch (const InsufficientMotion&) {
    rejected = true;
  }
  c.check(rejected, "parallel axes not rejected");
  c.note("worst entry error " + fmt(worst) + " over 50 trials");
  return c.outcome();
}

// Camera poses of one physical setup solved both ways: the EoB estimate
// composed with T^BE(q_i) must match the EiH estimate for a camera mounted
// where the EoB camera sits at configuration q_i.
Outcome duality() {
  Checker c;
  const auto chain = make_panda_chain();
  ScenarioConfig eob;
  eob.seed = derive_seed(kRootSeed, "duality");
  const GroundTruthScene scene = generate_scene(eob, chain, panda_fingertip_reference());
  const Pose t_cb = calibrate(make_request(scene, scene.clean_track)).pose;

  const double tol_t = 2e-5, tol_r = 2e-6;
  double worst_t = 0.0, worst_r = 0.0;
  const std::size_t n = scene.joint_log.frames.size();
  for (std::size_t s = 0; s < 5; ++s) {
    const Eigen::VectorXd& q = scene.joint_log.frames[s * (n - 1) / 4].positions;
    const Pose t_be = end_effector_pose(chain, q);
    ScenarioConfig eih;
    eih.seed = derive_seed(eob.seed, "duality-eih", s);
    eih.mode = CalibrationMode::kEyeInHand;
    eih.fixed_camera = compose(scene.t_gt, t_be);
    eih.start_configuration = q;
    try {
      const GroundTruthScene hand = generate_scene(eih, chain, panda_base_reference());
      const Pose t_ce = calibrate(make_request(hand, hand.clean_track)).pose;
      const Pose predicted = compose(t_cb, t_be);
      const double et = (predicted.translation() - t_ce.translation()).cwiseAbs().maxCoeff();
      const double er = rotation_error(predicted, t_ce);
      worst_t = std::max(worst_t, et);
      worst_r = std::max(worst_r, er);
      c.check(et < tol_t && er < tol_r,
              "frame " + std::to_string(s) + " off by " + fmt(et) + " m, " + fmt(er) + " rad");
    } catch (const std::exception& e) {
      c.check(false, "frame " + std::to_string(s) + ": " + e.what());
    }
  }
  c.note("worst " + fmt(worst_t) + " m, " + fmt(worst_r) + " rad at 5 frames");
  return c.outcome();
}

Outcome format_round_trips() {
  Checker c;
  namespace fs = std::filesystem;
  std::size_t count = 0;
  std::set<std::string> kinds;
  for (const auto& entry : fs::directory_iterator(REFCALIB_FIXTURE_DIR)) {
    if (!entry.is_regular_file()) continue;
    const std::string path = entry.path().string();
    const std::string name = entry.path().filename().string();
    const auto starts = [&](const char* p) { return name.rfind(p, 0) == 0; };
    try {
      const std::string text = read_text_file(path);
      std::string once, twice;
      if (starts("chain_")) {
        const ChainFile a = read_chain_json(text, path);
        once = serialize_chain(a.chain, a.ref);
        const ChainFile b = read_chain_json(once, path);
        twice = serialize_chain(b.chain, b.ref);
        kinds.insert("chain");
      } else if (starts("joints_")) {
        std::istringstream in(text);
        std::ostringstream o1, o2;
        write_joint_log_csv(read_joint_log_csv(in, path), o1);
        std::istringstream in2(o1.str());
        write_joint_log_csv(read_joint_log_csv(in2, path), o2);
        once = o1.str();
        twice = o2.str();
        kinds.insert("joints");
      } else if (starts("track_")) {
        std::istringstream in(text);
        std::ostringstream o1, o2;
        write_track_csv(read_track_csv(in, path), o1);
        std::istringstream in2(o1.str());
        write_track_csv(read_track_csv(in2, path), o2);
        once = o1.str();
        twice = o2.str();
        kinds.insert("track");
      } else if (starts("result_")) {
        once = serialize_result(read_result_json(text, path));
        twice = serialize_result(read_result_json(once, path));
        kinds.insert("result");
      } else if (starts("intrinsics_")) {
        once = serialize_intrinsics(read_intrinsics_json(text, path));
        twice = serialize_intrinsics(read_intrinsics_json(once, path));
      } else if (starts("ground_truth_")) {
        once = serialize_pose_document(read_pose_document(text, path));
        twice = serialize_pose_document(read_pose_document(once, path));
      } else {
        c.check(false, "unrecognized fixture " + name);
        continue;
      }
      c.check(once == text && twice == once, name + " changed on round trip");
      ++count;
    } catch (const std::exception& e) {
      c.check(false, name + ": " + e.what());
    }
  }
  c.check(count >= 10, "only " + std::to_string(count) + " fixtures");
  c.check(kinds.size() == 4, "corpus lacks one of chain/joints/track/result");
  c.note(std::to_string(count) + " files");
  return c.outcome();
}

}  // namespace
}  // namespace refcalib

int main(int argc, char** argv) {
  using namespace refcalib;
  CLI::App app{"Acceptance criteria"};
  std::vector<int> expect_fail;
  app.add_option("--expect-fail", expect_fail, "criteria known to fail")->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  const std::set<int> expected(expect_fail.begin(), expect_fail.end());

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"noiseless round trip", noiseless_round_trip},
      {"noise sensitivity envelope", noise_envelope},
      {"frame-count convergence", frame_count_convergence},
      {"simulation error envelope (3x reference values)", table_envelope},
      {"minimum pairs", minimum_pairs},
      {"PnP solver oracle", pnp_oracle},
      {"AX=XB oracle", axxb_oracle},
      {"EoB/EiH duality", duality},
      {"format round trips", format_round_trips},
  };

  int surprises = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const bool known = expected.count(id) > 0;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << id << "] " << criteria[i].first << ": "
              << o.detail;
    if (known) std::cout << (o.pass ? " (listed as known failure)" : " (known failure)");
    std::cout << std::endl;
    surprises += o.pass == known;
  }
  return surprises == 0 ? 0 : 1;
}
