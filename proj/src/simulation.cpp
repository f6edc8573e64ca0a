#include "refcalib/simulation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "refcalib/digest.hpp"
#include "refcalib/errors.hpp"
#include "refcalib/log.hpp"

namespace refcalib {
namespace {

constexpr int kMaxPlacements = 20;
constexpr int kMaxSegmentAttempts = 50;
constexpr int kMaxMountStartSamples = 5000;
// Keeps the point off the image border while planning the trajectory.
constexpr double kPlanningMargin = 0.05;
constexpr double kPlanningMinDepth = 0.1;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::pair<double, double> joint_range(const Joint& j) {
  if (j.limits) return *j.limits;
  return j.kind == JointKind::kPrismatic ? std::pair{-0.5, 0.5} : std::pair{-M_PI, M_PI};
}

Eigen::VectorXd clamp_to_limits(const KinematicChain& chain, Eigen::VectorXd q) {
  Eigen::Index i = 0;
  for (const Joint& j : chain.joints()) {
    if (!j.actuated()) continue;
    if (j.limits) q[i] = std::clamp(q[i], j.limits->first, j.limits->second);
    ++i;
  }
  return q;
}

Eigen::VectorXd random_configuration(const KinematicChain& chain, std::mt19937_64& rng) {
  Eigen::VectorXd q(static_cast<Eigen::Index>(chain.dof()));
  Eigen::Index i = 0;
  for (const Joint& j : chain.joints()) {
    if (!j.actuated()) continue;
    const auto [lo, hi] = joint_range(j);
    q[i++] = uniform(rng, lo, hi);
  }
  return q;
}

Eigen::VectorXd perturbed_mid_configuration(const KinematicChain& chain, std::mt19937_64& rng) {
  Eigen::VectorXd q = mid_configuration(chain);
  for (Eigen::Index i = 0; i < q.size(); ++i) q[i] += uniform(rng, -0.3, 0.3);
  return clamp_to_limits(chain, q);
}

// Camera-to-base pose looking from `eye` at `target` with zero roll
// (camera x axis horizontal, y pointing down, z forward).
Pose look_at(const Vec3& eye, const Vec3& target) {
  const Vec3 z = (target - eye).normalized();
  Vec3 x = z.cross(Vec3::UnitZ());
  if (x.norm() < 1e-9) x = Vec3::UnitX();
  x.normalize();
  const Vec3 y = z.cross(x);
  Mat3 r;
  r.col(0) = x;
  r.col(1) = y;
  r.col(2) = z;
  return Pose(r, eye);
}

Pose sample_eob_camera(const PlacementBounds& b, const Vec3& target, std::mt19937_64& rng) {
  const double radius = uniform(rng, b.radius_min, b.radius_max);
  const double elevation = uniform(rng, b.elevation_min, b.elevation_max);
  const double azimuth = uniform(rng, -M_PI, M_PI);
  const Vec3 dir(std::cos(elevation) * std::cos(azimuth), std::cos(elevation) * std::sin(azimuth),
                 std::sin(elevation));
  return look_at(target + radius * dir, target).inverse();
}

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v(n(rng), n(rng), n(rng));
  while (v.norm() < 1e-12) v = Vec3(n(rng), n(rng), n(rng));
  return v.normalized();
}

// T^EC: camera in the end-effector frame.
Pose sample_eih_mount(const MountBounds& b, std::mt19937_64& rng) {
  const Vec3 offset = random_unit(rng) * b.max_offset * std::cbrt(uniform(rng, 0.0, 1.0));
  const double tilt = uniform(rng, 0.0, b.max_tilt);
  const double tilt_dir = uniform(rng, -M_PI, M_PI);
  const double roll = uniform(rng, -M_PI, M_PI);
  const Vec3 tilt_axis(std::cos(tilt_dir), std::sin(tilt_dir), 0.0);
  const Mat3 r = Eigen::AngleAxisd(tilt, tilt_axis).toRotationMatrix() * rot_z(roll);
  return Pose(r, offset);
}

bool in_view(const CameraIntrinsics& k, const Point3& p_cam, double margin, double min_depth) {
  if (!(p_cam.z() > min_depth)) return false;
  const Pixel px = project(k, p_cam);
  const double mu = margin * k.width, mv = margin * k.height;
  return px.x() >= mu && px.y() >= mv && px.x() < k.width - mu && px.y() < k.height - mv;
}

// Reference point in camera coordinates for a joint configuration.
class SceneCamera {
 public:
  SceneCamera(CalibrationMode mode, const KinematicChain& chain, const ReferencePoint& ref,
              const Pose& t_gt)
      : mode_(mode), chain_(chain), ref_(ref), t_gt_(t_gt) {}

  Point3 point_in_camera(const Eigen::VectorXd& q) const {
    if (mode_ == CalibrationMode::kEyeOnBase) {
      return t_gt_ * reference_point_in_base(chain_, ref_, q, LimitPolicy::kThrow);
    }
    return t_gt_ * base_point_in_ee_frame(chain_, q, ref_.offset, LimitPolicy::kThrow);
  }

 private:
  CalibrationMode mode_;
  const KinematicChain& chain_;
  const ReferencePoint& ref_;
  Pose t_gt_;
};

// Piecewise-constant random joint velocities, one segment per direction
// switch. Each segment is resampled until the point stays in view, keeping
// the attempt with the most in-view frames.
// A null camera plans without a visibility constraint.
std::vector<Eigen::VectorXd> plan_trajectory(const ScenarioConfig& cfg, const KinematicChain& chain,
                                             const SceneCamera* cam, const Eigen::VectorXd& q0,
                                             std::mt19937_64& rng) {
  const std::size_t n = cfg.frame_count();
  const std::size_t segments = static_cast<std::size_t>(cfg.n_direction_switches);
  const std::size_t per_segment =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(double(n - 1) / double(segments))));
  const double dt = 1.0 / cfg.fps;

  std::vector<Eigen::VectorXd> traj{q0};
  while (traj.size() < n) {
    const std::size_t len = std::min(per_segment, n - traj.size());
    std::vector<Eigen::VectorXd> best;
    std::size_t best_visible = 0;
    for (int attempt = 0; attempt < kMaxSegmentAttempts; ++attempt) {
      Eigen::VectorXd v(q0.size());
      for (Eigen::Index j = 0; j < v.size(); ++j) v[j] = uniform(rng, -cfg.joint_speed, cfg.joint_speed);
      std::vector<Eigen::VectorXd> seg;
      std::size_t visible = 0;
      Eigen::VectorXd q = traj.back();
      for (std::size_t f = 0; f < len; ++f) {
        q = clamp_to_limits(chain, q + v * dt);
        seg.push_back(q);
        if (!cam || in_view(cfg.camera, cam->point_in_camera(q), kPlanningMargin, kPlanningMinDepth)) {
          ++visible;
        }
      }
      if (best.empty() || visible > best_visible) {
        best = std::move(seg);
        best_visible = visible;
      }
      if (best_visible == len) break;
    }
    traj.insert(traj.end(), best.begin(), best.end());
  }
  return traj;
}

std::optional<Eigen::VectorXd> find_eih_start(const ScenarioConfig& cfg, const KinematicChain& chain,
                                              const SceneCamera& cam, std::mt19937_64& rng) {
  for (int i = 0; i < kMaxMountStartSamples; ++i) {
    const Eigen::VectorXd q = random_configuration(chain, rng);
    const Point3 p = cam.point_in_camera(q);
    if (p.z() < 0.3 || p.z() > 2.0) continue;
    if (in_view(cfg.camera, p, 0.2, 0.3)) return q;
  }
  return std::nullopt;
}

struct Accumulator {
  std::vector<PoseErrors> ok;
  int fail = 0;

  SweepRow row(double param) const {
    SweepRow r;
    r.param = param;
    r.n_ok = static_cast<int>(ok.size());
    r.n_fail = fail;
    if (ok.empty()) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      r.mean_e_x_cm = r.mean_e_y_cm = r.mean_e_z_cm = r.mean_e_trans_cm = r.mean_e_r_rad = nan;
      r.stderr_e_trans_cm = r.stderr_e_r_rad = nan;
      return r;
    }
    const double n = static_cast<double>(ok.size());
    for (const auto& e : ok) {
      r.mean_e_x_cm += e.e_x_cm / n;
      r.mean_e_y_cm += e.e_y_cm / n;
      r.mean_e_z_cm += e.e_z_cm / n;
      r.mean_e_trans_cm += e.e_trans_cm / n;
      r.mean_e_r_rad += e.e_r_rad / n;
    }
    if (ok.size() > 1) {
      double vt = 0.0, vr = 0.0;
      for (const auto& e : ok) {
        vt += (e.e_trans_cm - r.mean_e_trans_cm) * (e.e_trans_cm - r.mean_e_trans_cm);
        vr += (e.e_r_rad - r.mean_e_r_rad) * (e.e_r_rad - r.mean_e_r_rad);
      }
      r.stderr_e_trans_cm = std::sqrt(vt / (n - 1.0) / n);
      r.stderr_e_r_rad = std::sqrt(vr / (n - 1.0) / n);
    }
    return r;
  }
};

// Shortest text that reads back to the same double.
std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Rounded for display only.
std::string fmt_deg(double rad) {
  std::ostringstream os;
  os << std::setprecision(12) << rad * 180.0 / M_PI;
  return os.str();
}

std::vector<std::string> sweep_meta(const std::string& kind, const ScenarioConfig& cfg,
                                    int n_repeats, const std::string& params) {
  std::ostringstream canon;
  canon << kind << '|' << cfg.seed << '|' << to_string(cfg.mode) << '|' << fmt(cfg.fps) << '|'
        << fmt(cfg.duration) << '|' << cfg.n_direction_switches << '|' << fmt(cfg.joint_speed) << '|'
        << fmt(cfg.camera.fx) << ',' << fmt(cfg.camera.fy) << ',' << fmt(cfg.camera.cx) << ','
        << fmt(cfg.camera.cy) << ',' << cfg.camera.width << 'x' << cfg.camera.height << '|'
        << fmt(cfg.placement.radius_min) << ',' << fmt(cfg.placement.radius_max) << ','
        << fmt(cfg.placement.elevation_min) << ',' << fmt(cfg.placement.elevation_max) << '|'
        << fmt(cfg.mount.max_offset) << ',' << fmt(cfg.mount.max_tilt) << '|' << fmt(cfg.noise.mu)
        << ',' << fmt(cfg.noise.sigma) << '|' << n_repeats << '|' << params;
  return {
      "sweep=" + kind,
      "seed=" + std::to_string(cfg.seed),
      "mode=" + std::string(to_string(cfg.mode)),
      "config_hash=" + sha256_hex(canon.str()).substr(0, 16),
      "repeats=" + std::to_string(n_repeats),
      "fps=" + fmt(cfg.fps) + " duration_s=" + fmt(cfg.duration) +
          " direction_switches=" + std::to_string(cfg.n_direction_switches),
      "trajectory=joint-space piecewise-constant velocities, joint_speed_rad_s=" +
          fmt(cfg.joint_speed),
      "camera=" + std::to_string(cfg.camera.width) + "x" + std::to_string(cfg.camera.height) +
          " fx=" + fmt(cfg.camera.fx) + " fy=" + fmt(cfg.camera.fy),
      cfg.mode == CalibrationMode::kEyeOnBase
          ? "placement=radius[" + fmt(cfg.placement.radius_min) + "," +
                fmt(cfg.placement.radius_max) + "]m elevation[" +
                fmt_deg(cfg.placement.elevation_min) + "," + fmt_deg(cfg.placement.elevation_max) +
                "]deg look_at=reference point centroid"
          : "mount=offset<=" + fmt(cfg.mount.max_offset) + "m tilt<=" + fmt_deg(cfg.mount.max_tilt) +
                "deg",
      "noise=gaussian mu=" + fmt(cfg.noise.mu) +
          (kind == "noise" ? std::string(" sigma=swept") : " sigma=" + fmt(cfg.noise.sigma)),
      "metrics=e_axis_cm absolute per axis, e_trans_cm euclidean norm, e_r_rad geodesic angle",
      "params=" + params,
  };
}

}  // namespace

void ScenarioConfig::validate() const {
  if (!(fps > 0.0)) throw InvalidArgument("fps must be positive");
  if (!(duration > 0.0)) throw InvalidArgument("duration must be positive");
  if (n_direction_switches < 1) throw InvalidArgument("need at least one trajectory segment");
  if (!(joint_speed >= 0.0)) throw InvalidArgument("joint speed must be non-negative");
  if (!(placement.radius_min > 0.0) || placement.radius_max < placement.radius_min) {
    throw InvalidArgument("placement radius range must be positive and ordered");
  }
  if (placement.elevation_max < placement.elevation_min) {
    throw InvalidArgument("placement elevation range must be ordered");
  }
  if (!(noise.sigma >= 0.0)) throw InvalidArgument("noise sigma must be non-negative");
  camera.validate();
  if (frame_count() < 2) throw InvalidArgument("scenario must contain at least two frames");
}

std::size_t ScenarioConfig::frame_count() const {
  return static_cast<std::size_t>(std::llround(fps * duration));
}

std::uint64_t derive_seed(std::uint64_t root, std::string_view label, std::uint64_t index) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(splitmix64(root ^ h) + index);
}

GroundTruthScene generate_scene(const ScenarioConfig& cfg, const KinematicChain& chain,
                                const ReferencePoint& ref) {
  cfg.validate();
  chain.validate(ref);
  if (cfg.mode == CalibrationMode::kEyeInHand && ref.link_index != 0) {
    throw InvalidArgument("eye-in-hand scenes need the reference point on the base link");
  }
  if (cfg.start_configuration) {
    if (static_cast<std::size_t>(cfg.start_configuration->size()) != chain.dof()) {
      throw DimensionMismatch(chain.dof(), cfg.start_configuration->size());
    }
    forward_kinematics(chain, *cfg.start_configuration, LimitPolicy::kThrow);
  }

  // Eye-on-base: the arm motion does not depend on the camera, so the
  // trajectory is planned once and only the placement is resampled.
  std::vector<Eigen::VectorXd> eob_traj;
  Vec3 eob_centroid = Vec3::Zero();
  if (cfg.mode == CalibrationMode::kEyeOnBase) {
    std::mt19937_64 traj_rng(derive_seed(cfg.seed, "trajectory"));
    const Eigen::VectorXd q0 = cfg.start_configuration ? *cfg.start_configuration
                                                       : perturbed_mid_configuration(chain, traj_rng);
    eob_traj = plan_trajectory(cfg, chain, nullptr, q0, traj_rng);
    for (const auto& q : eob_traj) eob_centroid += reference_point_in_base(chain, ref, q);
    eob_centroid /= static_cast<double>(eob_traj.size());
  }

  for (int attempt = 0; attempt < kMaxPlacements; ++attempt) {
    std::mt19937_64 place_rng(derive_seed(cfg.seed, "placement", attempt));

    Pose t_gt;
    std::vector<Eigen::VectorXd> traj;
    if (cfg.mode == CalibrationMode::kEyeOnBase) {
      t_gt = cfg.fixed_camera ? *cfg.fixed_camera
                              : sample_eob_camera(cfg.placement, eob_centroid, place_rng);
      traj = eob_traj;
    } else {
      std::mt19937_64 traj_rng(derive_seed(cfg.seed, "trajectory", attempt));
      t_gt = cfg.fixed_camera ? *cfg.fixed_camera : sample_eih_mount(cfg.mount, place_rng).inverse();
      const SceneCamera cam(cfg.mode, chain, ref, t_gt);
      Eigen::VectorXd q0;
      if (cfg.start_configuration) {
        q0 = *cfg.start_configuration;
      } else {
        const auto start = find_eih_start(cfg, chain, cam, place_rng);
        if (!start) continue;
        q0 = *start;
      }
      traj = plan_trajectory(cfg, chain, &cam, q0, traj_rng);
    }
    const SceneCamera cam(cfg.mode, chain, ref, t_gt);

    GroundTruthScene scene;
    scene.mode = cfg.mode;
    scene.chain = chain;
    scene.ref = ref;
    scene.camera = cfg.camera;
    scene.t_gt = t_gt;
    std::size_t visible = 0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
      const auto idx = static_cast<long long>(i);
      scene.joint_log.frames.push_back({idx, static_cast<double>(i) / cfg.fps, traj[i]});
      const Point3 p = cam.point_in_camera(traj[i]);
      TrackFrame tf;
      tf.frame_index = idx;
      tf.sync = true;
      tf.visible = false;
      tf.u = tf.v = std::numeric_limits<double>::quiet_NaN();
      if (p.z() > 1e-9) {
        const Pixel px = project(cfg.camera, p);
        if (cfg.camera.contains(px)) {
          tf.visible = true;
          tf.u = px.x();
          tf.v = px.y();
        }
      }
      if (tf.visible) ++visible;
      scene.clean_track.frames.push_back(tf);
    }
    if (visible >= kMinPnPPoints) return scene;
    if (cfg.fixed_camera && (cfg.mode == CalibrationMode::kEyeOnBase || cfg.start_configuration)) break;
  }
  throw UnreachableView("reference point not visible from any of " + std::to_string(kMaxPlacements) +
                        " sampled camera placements");
}

Pose camera_from_base(const GroundTruthScene& scene, std::size_t row) {
  if (scene.mode == CalibrationMode::kEyeOnBase) return scene.t_gt;
  return scene.t_gt * end_effector_pose(scene.chain, scene.joint_log.frames.at(row).positions,
                                        LimitPolicy::kIgnore)
                          .inverse();
}

Track2D corrupt_track(const Track2D& track, const NoiseModel& noise, std::uint64_t seed) {
  if (!(noise.sigma >= 0.0)) throw InvalidArgument("noise sigma must be non-negative");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  Track2D out = track;
  // Draws are consumed for every frame so the stream does not depend on flags.
  for (auto& f : out.frames) {
    const double du = unit(rng);
    const double dv = unit(rng);
    if (!f.visible) continue;
    f.u += noise.mu + noise.sigma * du;
    f.v += noise.mu + noise.sigma * dv;
  }
  return out;
}

PoseErrors evaluate(const Pose& t_est, const Pose& t_gt) {
  const Vec3 d = translation_error(t_est, t_gt);
  PoseErrors e;
  e.e_x_cm = 100.0 * d.x();
  e.e_y_cm = 100.0 * d.y();
  e.e_z_cm = 100.0 * d.z();
  e.e_trans_cm = 100.0 * d.norm();
  e.e_r_rad = rotation_error(t_est, t_gt);
  return e;
}

CalibrationRequest make_request(const GroundTruthScene& scene, const Track2D& track) {
  CalibrationRequest req;
  req.mode = scene.mode;
  req.chain = scene.chain;
  req.ref = scene.ref;
  req.intrinsics = scene.camera;
  req.track = track;
  req.joints = scene.joint_log;
  return req;
}

namespace {

// Sweep cells solve deliberately weak configurations; per-solve warnings are
// shown only at info level and above.
CalibrationResult calibrate_quietly(const CalibrationRequest& req) {
  const LogLevel level = log_level() >= LogLevel::kInfo ? log_level() : LogLevel::kQuiet;
  const ScopedLogLevel scoped(level);
  return calibrate(req);
}

}  // namespace

SweepTable run_frames_sweep(const ScenarioConfig& cfg, const KinematicChain& chain,
                            const ReferencePoint& ref, std::span<const int> n_values,
                            int n_repeats) {
  if (n_values.empty()) throw EmptyInput("no frame counts to sweep");
  if (*std::min_element(n_values.begin(), n_values.end()) < static_cast<int>(kMinPnPPoints)) {
    throw InvalidArgument("frame counts must be at least " + std::to_string(kMinPnPPoints));
  }
  std::vector<Accumulator> acc(n_values.size());
  for (int r = 0; r < n_repeats; ++r) {
    ScenarioConfig scfg = cfg;
    scfg.seed = derive_seed(cfg.seed, "scene", static_cast<std::uint64_t>(r));
    std::optional<GroundTruthScene> scene;
    try {
      scene = generate_scene(scfg, chain, ref);
    } catch (const Error& e) {
      log_warn(std::string("frames sweep: scene ") + std::to_string(r) + ": " + e.what());
      for (auto& a : acc) ++a.fail;
      continue;
    }
    const Track2D noisy = corrupt_track(scene->clean_track, cfg.noise, derive_seed(scfg.seed, "noise"));
    std::vector<std::size_t> visible_rows;
    for (std::size_t i = 0; i < noisy.frames.size(); ++i)
      if (noisy.frames[i].visible) visible_rows.push_back(i);

    for (std::size_t c = 0; c < n_values.size(); ++c) {
      const auto n = static_cast<std::size_t>(n_values[c]);
      if (n > visible_rows.size()) {
        ++acc[c].fail;
        continue;
      }
      std::mt19937_64 pick(derive_seed(scfg.seed, "subsample", n));
      std::vector<std::size_t> chosen;
      std::sample(visible_rows.begin(), visible_rows.end(), std::back_inserter(chosen), n, pick);
      Track2D sub = noisy;
      for (auto& f : sub.frames) f.sync = false;
      for (std::size_t row : chosen) sub.frames[row].sync = true;
      CalibrationRequest req = make_request(*scene, sub);
      req.options.use_only_sync = true;
      req.options.min_pairs = kMinPnPPoints;
      try {
        acc[c].ok.push_back(evaluate(calibrate_quietly(req).pose, scene->t_gt));
      } catch (const Error& e) {
        log_info(std::string("frames sweep: n=") + std::to_string(n) + ": " + e.what());
        ++acc[c].fail;
      }
    }
  }
  SweepTable table;
  table.kind = "frames";
  std::string params;
  for (std::size_t c = 0; c < n_values.size(); ++c) {
    table.rows.push_back(acc[c].row(n_values[c]));
    params += (c ? "," : "") + std::to_string(n_values[c]);
  }
  table.meta = sweep_meta("frames", cfg, n_repeats, params);
  return table;
}

SweepTable run_noise_sweep(const ScenarioConfig& cfg, const KinematicChain& chain,
                           const ReferencePoint& ref, std::span<const double> sigma_values,
                           int n_repeats) {
  if (sigma_values.empty()) throw EmptyInput("no noise levels to sweep");
  for (double s : sigma_values)
    if (!(s >= 0.0)) throw InvalidArgument("noise sigma must be non-negative");
  std::vector<Accumulator> acc(sigma_values.size());
  for (int r = 0; r < n_repeats; ++r) {
    ScenarioConfig scfg = cfg;
    scfg.seed = derive_seed(cfg.seed, "scene", static_cast<std::uint64_t>(r));
    std::optional<GroundTruthScene> scene;
    try {
      scene = generate_scene(scfg, chain, ref);
    } catch (const Error& e) {
      log_warn(std::string("noise sweep: scene ") + std::to_string(r) + ": " + e.what());
      for (auto& a : acc) ++a.fail;
      continue;
    }
    const std::uint64_t noise_seed = derive_seed(scfg.seed, "noise");
    for (std::size_t c = 0; c < sigma_values.size(); ++c) {
      const Track2D noisy =
          corrupt_track(scene->clean_track, NoiseModel{cfg.noise.mu, sigma_values[c]}, noise_seed);
      CalibrationRequest req = make_request(*scene, noisy);
      try {
        acc[c].ok.push_back(evaluate(calibrate_quietly(req).pose, scene->t_gt));
      } catch (const Error& e) {
        log_info(std::string("noise sweep: sigma=") + fmt(sigma_values[c]) + ": " + e.what());
        ++acc[c].fail;
      }
    }
  }
  SweepTable table;
  table.kind = "noise";
  std::string params;
  for (std::size_t c = 0; c < sigma_values.size(); ++c) {
    table.rows.push_back(acc[c].row(sigma_values[c]));
    params += (c ? "," : "") + fmt(sigma_values[c]);
  }
  table.meta = sweep_meta("noise", cfg, n_repeats, params);
  return table;
}

void write_sweep_csv(const SweepTable& table, std::ostream& out) {
  for (const auto& m : table.meta) out << "# meta: " << m << '\n';
  out << "param,mean_e_x_cm,mean_e_y_cm,mean_e_z_cm,mean_e_trans_cm,mean_e_r_rad,n_fail\n";
  for (const auto& r : table.rows) {
    out << fmt(r.param) << ',' << fmt(r.mean_e_x_cm) << ',' << fmt(r.mean_e_y_cm) << ','
        << fmt(r.mean_e_z_cm) << ',' << fmt(r.mean_e_trans_cm) << ',' << fmt(r.mean_e_r_rad) << ','
        << r.n_fail << '\n';
  }
}

}  // namespace refcalib
