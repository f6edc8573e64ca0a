#pragma once

#include <Eigen/Geometry>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "refcalib/geometry.hpp"

namespace refcalib {

enum class JointKind { kRevolute, kPrismatic, kFixed };

const char* to_string(JointKind kind);
JointKind joint_kind_from_string(const std::string& s);

// One serial link. The origin is kept exactly as read from a chain file
// (translation + quaternion) so files round-trip without drift.
struct Joint {
  std::string name;
  JointKind kind = JointKind::kFixed;
  Vec3 axis = Vec3::UnitZ();
  Vec3 origin_translation = Vec3::Zero();
  Eigen::Quaterniond origin_rotation = Eigen::Quaterniond::Identity();
  std::optional<std::pair<double, double>> limits;
  // Optional link names; when present they must form a serial chain.
  std::string parent;
  std::string child;

  bool actuated() const { return kind != JointKind::kFixed; }
  Pose origin() const;
  // Origin composed with the motion of this joint at value q.
  Pose transform(double q) const;
};

// Attachment of the tracked point. Link 0 is the base; link i is the child
// of joint i-1 (the frame after applying the i-th joint in the list).
struct ReferencePoint {
  std::size_t link_index = 0;
  Point3 offset = Point3::Zero();
};

class KinematicChain {
 public:
  KinematicChain() = default;
  // Validates axes and serial connectivity; throws InvalidArgument.
  KinematicChain(std::string name, std::vector<Joint> joints);

  const std::string& name() const { return name_; }
  const std::vector<Joint>& joints() const { return joints_; }
  // Number of actuated (non-fixed) joints, J.
  std::size_t dof() const { return dof_; }
  // Number of link frames, including the base.
  std::size_t link_count() const { return joints_.size() + 1; }

  void validate(const ReferencePoint& ref) const;

 private:
  std::string name_;
  std::vector<Joint> joints_;
  std::size_t dof_ = 0;
};

struct JointFrame {
  long long frame_index = 0;
  double timestamp = 0.0;
  Eigen::VectorXd positions;
};

struct JointLog {
  std::vector<JointFrame> frames;

  // Throws NonMonotoneFrames / DimensionMismatch.
  void validate(std::size_t dof) const;
};

enum class LimitPolicy {
  kWarn,   // report through the log sink and continue
  kThrow,  // raise JointLimitViolation
  kIgnore,
};

// Base-to-link poses for every link frame, index 0 being the base itself.
std::vector<Pose> forward_kinematics(const KinematicChain& chain,
                                     const Eigen::VectorXd& q,
                                     LimitPolicy policy = LimitPolicy::kWarn);

// Pose of the last link (end effector) in the base frame, T^BE.
Pose end_effector_pose(const KinematicChain& chain, const Eigen::VectorXd& q,
                       LimitPolicy policy = LimitPolicy::kWarn);

Point3 reference_point_in_base(const KinematicChain& chain,
                               const ReferencePoint& ref,
                               const Eigen::VectorXd& q,
                               LimitPolicy policy = LimitPolicy::kWarn);

// T^EB(q) * p_base, i.e. a base-frame point seen from the end effector.
Point3 base_point_in_ee_frame(const KinematicChain& chain,
                              const Eigen::VectorXd& q, const Point3& p_base,
                              LimitPolicy policy = LimitPolicy::kWarn);

// Franka Emika Panda (modified DH) with a flange and the closed-gripper
// fingertip frame appended as fixed links.
KinematicChain make_panda_chain();
// Fingertip center of the closed gripper.
ReferencePoint panda_fingertip_reference();
// Point on the base shell along the forward x axis.
ReferencePoint panda_base_reference(double x_ref = 0.1);

// Midpoint of the joint ranges, or zero for unlimited joints.
Eigen::VectorXd mid_configuration(const KinematicChain& chain);

}  // namespace refcalib
