#include "refcalib/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "refcalib/digest.hpp"
#include "refcalib/errors.hpp"
#include "refcalib/io.hpp"
#include "refcalib/log.hpp"
#include "refcalib/simulation.hpp"

namespace refcalib {
namespace {

struct ScenarioArgs {
  std::uint64_t seed = 0;
  std::string mode;
  std::string chain;
  double fps = 30.0;
  double duration = 10.0;
  int switches = 10;
  double joint_speed = 0.3;
  double fov_deg = 60.0;
  int width = 1920;
  int height = 1080;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--seed", seed, "root random seed")->required();
    cmd->add_option("--mode", mode, "eob or eih")->required()->check(CLI::IsMember({"eob", "eih"}));
    cmd->add_option("--chain", chain, "chain file with reference point")->required();
    cmd->add_option("--fps", fps, "frames per second")->capture_default_str();
    cmd->add_option("--duration", duration, "trajectory length in seconds")->capture_default_str();
    cmd->add_option("--switches", switches, "joint velocity direction switches")->capture_default_str();
    cmd->add_option("--joint-speed", joint_speed, "joint speed bound, rad/s")->capture_default_str();
    cmd->add_option("--fov-deg", fov_deg, "horizontal field of view, degrees")->capture_default_str();
    cmd->add_option("--width", width, "image width, px")->capture_default_str();
    cmd->add_option("--height", height, "image height, px")->capture_default_str();
  }

  ScenarioConfig config(double sigma) const {
    if (!(fov_deg > 0.0 && fov_deg < 180.0)) throw InvalidArgument("--fov-deg must lie in (0, 180)");
    ScenarioConfig cfg;
    cfg.seed = seed;
    cfg.mode = calibration_mode_from_string(mode);
    cfg.fps = fps;
    cfg.duration = duration;
    cfg.n_direction_switches = switches;
    cfg.joint_speed = joint_speed;
    cfg.camera = CameraIntrinsics::FromHorizontalFov(fov_deg * M_PI / 180.0, width, height);
    cfg.noise.sigma = sigma;
    cfg.validate();
    return cfg;
  }
};

const char* error_name(const Error& e) {
  if (dynamic_cast<const DegenerateConfiguration*>(&e)) return "DegenerateConfiguration";
  if (dynamic_cast<const TooFewPairs*>(&e)) return "TooFewPairs";
  if (dynamic_cast<const InsufficientMotion*>(&e)) return "InsufficientMotion";
  if (dynamic_cast<const UnreachableView*>(&e)) return "UnreachableView";
  if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
  if (dynamic_cast<const NonMonotoneFrames*>(&e)) return "NonMonotoneFrames";
  if (dynamic_cast<const SchemaMismatch*>(&e)) return "SchemaMismatch";
  if (dynamic_cast<const DimensionMismatch*>(&e)) return "DimensionMismatch";
  if (dynamic_cast<const JointLimitViolation*>(&e)) return "JointLimitViolation";
  if (dynamic_cast<const EmptyInput*>(&e)) return "EmptyInput";
  if (dynamic_cast<const NonPositiveDepth*>(&e)) return "NonPositiveDepth";
  if (dynamic_cast<const DivergedBehindCamera*>(&e)) return "DivergedBehindCamera";
  if (dynamic_cast<const NumericalFailure*>(&e)) return "NumericalFailure";
  if (dynamic_cast<const InvalidArgument*>(&e)) return "InvalidArgument";
  return "Error";
}

int exit_code_for(const Error& e) {
  return e.category() == ErrorCategory::kInput ? kExitInput : kExitInsufficient;
}

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

std::string table_csv(const SweepTable& t) {
  std::ostringstream os;
  write_sweep_csv(t, os);
  return os.str();
}

int run_calibrate(const std::string& mode_s, const std::string& chain_path,
                  const std::string& joints_path, const std::string& track_path,
                  const std::string& intr_path, bool all_frames, bool robust,
                  std::size_t min_pairs, const std::string& out_path) {
  const ChainFile cf = parse_chain_file(chain_path);
  CalibrationRequest req;
  req.mode = calibration_mode_from_string(mode_s);
  req.chain = cf.chain;
  req.ref = cf.ref;
  req.joints = parse_joint_log_csv(joints_path);
  check_joint_schema(req.chain, req.joints);
  req.track = parse_track_csv(track_path);
  req.intrinsics = parse_intrinsics_file(intr_path);
  req.options.use_only_sync = !all_frames;
  req.options.robust = robust;
  req.options.min_pairs = min_pairs;

  const CalibrationResult result = calibrate(req);
  ResultDocument doc = ResultDocument::FromResult(result);
  doc.input_digests = {{"chain", sha256_file(chain_path)},
                       {"intrinsics", sha256_file(intr_path)},
                       {"joints", sha256_file(joints_path)},
                       {"track", sha256_file(track_path)}};
  write_result(doc, out_path);
  std::ostringstream msg;
  msg << "calibrated " << to_string(req.mode) << ": " << result.n_pairs_used << " pairs, rms "
      << result.solution.rms_reprojection_error << " px, " << to_string(doc.condition);
  log_info(msg.str());
  return kExitOk;
}

int run_simulate(const ScenarioArgs& sa, double sigma, const std::string& out_dir) {
  const ChainFile cf = parse_chain_file(sa.chain);
  const ScenarioConfig cfg = sa.config(sigma);
  const GroundTruthScene scene = generate_scene(cfg, cf.chain, cf.ref);
  const Track2D noisy = corrupt_track(scene.clean_track, cfg.noise, derive_seed(cfg.seed, "noise"));

  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  write_chain_file(scene.chain, scene.ref, (dir / "chain.json").string());
  write_intrinsics_file(scene.camera, (dir / "intrinsics.json").string());
  write_joint_log_csv(scene.joint_log, (dir / "joints.csv").string());
  write_track_csv(noisy, (dir / "track.csv").string());
  write_track_csv(scene.clean_track, (dir / "track_clean.csv").string());
  write_text_file((dir / "ground_truth.json").string(), serialize_pose_document(scene.mode, scene.t_gt));
  return kExitOk;
}

int run_eval(const std::string& est_path, const std::string& gt_path, const std::string& out_path) {
  const PoseErrors e = evaluate(read_pose_file(est_path), read_pose_file(gt_path));
  std::ostringstream os;
  os.precision(17);
  os << "{\n  \"e_x_cm\": " << e.e_x_cm << ",\n  \"e_y_cm\": " << e.e_y_cm << ",\n  \"e_z_cm\": "
     << e.e_z_cm << ",\n  \"e_trans_cm\": " << e.e_trans_cm << ",\n  \"e_r_rad\": " << e.e_r_rad
     << ",\n  \"rotation_metric\": \"geodesic\"\n}\n";
  write_or_print(out_path, os.str());
  return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Hand-eye calibration from a single tracked reference point", "refcalib"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  // calibrate
  std::string mode, chain, joints, track, intr, out;
  bool all_frames = false, robust = false;
  std::size_t min_pairs = 10;
  auto* cal = app.add_subcommand("calibrate", "estimate T^CB (eob) or T^CE (eih)");
  cal->add_option("--mode", mode, "eob or eih")->required()->check(CLI::IsMember({"eob", "eih"}));
  cal->add_option("--chain", chain, "chain file (JSON)")->required();
  cal->add_option("--joints", joints, "joint log CSV")->required();
  cal->add_option("--track", track, "2D track CSV")->required();
  cal->add_option("--intrinsics", intr, "camera intrinsics (JSON)")->required();
  cal->add_flag("--all-frames", all_frames, "use visible frames even if not synchronized");
  cal->add_flag("--robust", robust, "Huber loss in refinement");
  cal->add_option("--min-pairs", min_pairs, "minimum usable frame pairs")->capture_default_str();
  cal->add_option("-o,--output", out, "result file")->required();

  // simulate
  ScenarioArgs sim_args;
  double sim_sigma = 0.0;
  std::string sim_out;
  auto* sim = app.add_subcommand("simulate", "write a synthetic scene as input files");
  sim_args.add_to(sim);
  sim->add_option("--sigma", sim_sigma, "pixel noise standard deviation")->capture_default_str();
  sim->add_option("-o,--output", sim_out, "output directory")->required();

  // sweep-noise
  ScenarioArgs sn_args;
  std::vector<double> sigmas;
  int sn_repeats = 10;
  std::string sn_out;
  auto* sn = app.add_subcommand("sweep-noise", "mean pose error against pixel noise");
  sn_args.add_to(sn);
  sn->add_option("--sigmas", sigmas, "comma-separated noise levels, px")->required()->delimiter(',');
  sn->add_option("--repeats", sn_repeats, "scenes per level")->capture_default_str();
  sn->add_option("-o,--output", sn_out, "CSV output (default stdout)");

  // sweep-frames
  ScenarioArgs sf_args;
  std::vector<int> counts;
  int sf_repeats = 10;
  double sf_sigma = 2.0;
  std::string sf_out;
  auto* sf = app.add_subcommand("sweep-frames", "mean pose error against number of frames");
  sf_args.add_to(sf);
  sf->add_option("--counts", counts, "comma-separated frame counts")->required()->delimiter(',');
  sf->add_option("--sigma", sf_sigma, "pixel noise standard deviation")->capture_default_str();
  sf->add_option("--repeats", sf_repeats, "scenes per count")->capture_default_str();
  sf->add_option("-o,--output", sf_out, "CSV output (default stdout)");

  // eval
  std::string est, gt, ev_out;
  auto* ev = app.add_subcommand("eval", "compare an estimate with ground truth");
  ev->add_option("--est", est, "result or pose file")->required();
  ev->add_option("--gt", gt, "ground-truth pose file")->required();
  ev->add_option("-o,--output", ev_out, "JSON output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\n\n";
    const auto parsed = app.get_subcommands();
    std::cerr << (parsed.empty() ? app.help() : parsed.front()->help());
    return kExitInput;
  }

  try {
    if (*cal) {
      return run_calibrate(mode, chain, joints, track, intr, all_frames, robust, min_pairs, out);
    }
    if (*sim) return run_simulate(sim_args, sim_sigma, sim_out);
    if (*sn) {
      const ChainFile cf = parse_chain_file(sn_args.chain);
      const ScenarioConfig cfg = sn_args.config(0.0);
      write_or_print(sn_out, table_csv(run_noise_sweep(cfg, cf.chain, cf.ref, sigmas, sn_repeats)));
      return kExitOk;
    }
    if (*sf) {
      const ChainFile cf = parse_chain_file(sf_args.chain);
      const ScenarioConfig cfg = sf_args.config(sf_sigma);
      write_or_print(sf_out, table_csv(run_frames_sweep(cfg, cf.chain, cf.ref, counts, sf_repeats)));
      return kExitOk;
    }
    if (*ev) return run_eval(est, gt, ev_out);
  } catch (const Error& e) {
    std::cerr << "error: " << error_name(e) << ": " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInput;
}

int cli_main(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("refcalib");
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace refcalib
