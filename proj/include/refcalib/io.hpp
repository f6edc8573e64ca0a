#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "refcalib/calibration.hpp"
#include "refcalib/geometry.hpp"
#include "refcalib/kinematics.hpp"
#include "refcalib/pnp.hpp"

namespace refcalib {

inline constexpr const char* kToolVersion = "0.1.0";

// Track CSV, header `frame,u,v,visible,sync`. u and v may be empty only on
// rows with visible=0; they are then read as NaN.
Track2D read_track_csv(std::istream& in, const std::string& source = "<track>");
Track2D parse_track_csv(const std::string& path);
void write_track_csv(const Track2D& track, std::ostream& out);
void write_track_csv(const Track2D& track, const std::string& path);

// Joint log CSV, header `frame,t,j1,...,jJ`.
JointLog read_joint_log_csv(std::istream& in, const std::string& source = "<joints>");
JointLog parse_joint_log_csv(const std::string& path);
void write_joint_log_csv(const JointLog& log, std::ostream& out);
void write_joint_log_csv(const JointLog& log, const std::string& path);

struct ChainFile {
  KinematicChain chain;
  ReferencePoint ref;
};

ChainFile read_chain_json(const std::string& text, const std::string& source = "<chain>");
ChainFile parse_chain_file(const std::string& path);
std::string serialize_chain(const KinematicChain& chain, const ReferencePoint& ref);
void write_chain_file(const KinematicChain& chain, const ReferencePoint& ref,
                      const std::string& path);

// Throws SchemaMismatch when the log's joint count differs from the chain's.
void check_joint_schema(const KinematicChain& chain, const JointLog& log);

// `{fx,fy,cx,cy,width,height}` or `{fov_deg_horizontal,width,height}`.
CameraIntrinsics read_intrinsics_json(const std::string& text,
                                      const std::string& source = "<intrinsics>");
CameraIntrinsics parse_intrinsics_file(const std::string& path);
std::string serialize_intrinsics(const CameraIntrinsics& k);
void write_intrinsics_file(const CameraIntrinsics& k, const std::string& path);

// Serialized calibration output. The quaternion is authoritative; the matrix
// written alongside must agree with it within 1e-9 on ingestion.
struct ResultDocument {
  CalibrationMode mode = CalibrationMode::kEyeOnBase;
  Vec3 translation = Vec3::Zero();
  Eigen::Quaterniond quaternion = Eigen::Quaterniond::Identity();  // w >= 0
  double rms_reprojection_px = 0.0;
  std::size_t n_pairs_used = 0;
  std::vector<DroppedFrame> dropped;
  Conditioning condition = Conditioning::kWellConditioned;
  std::string tool_version = kToolVersion;
  std::string rotation_metric = "geodesic";
  std::map<std::string, std::string> input_digests;  // role -> sha256

  Pose pose() const;
  static ResultDocument FromResult(const CalibrationResult& result);
};

std::string serialize_result(const ResultDocument& doc);
ResultDocument read_result_json(const std::string& text, const std::string& source = "<result>");
void write_result(const ResultDocument& doc, const std::string& path);
ResultDocument read_result(const std::string& path);

// Pose documents carry `mode` and a `pose` object as in result files; both
// result and ground-truth files are accepted. The quaternion is kept as read
// so documents round-trip exactly.
struct PoseDocument {
  CalibrationMode mode = CalibrationMode::kEyeOnBase;
  Vec3 translation = Vec3::Zero();
  Eigen::Quaterniond quaternion = Eigen::Quaterniond::Identity();

  Pose pose() const;
  static PoseDocument FromPose(CalibrationMode mode, const Pose& pose);
};

std::string serialize_pose_document(const PoseDocument& doc);
std::string serialize_pose_document(CalibrationMode mode, const Pose& pose);
PoseDocument read_pose_document(const std::string& text, const std::string& source = "<pose>");
Pose read_pose_file(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace refcalib
