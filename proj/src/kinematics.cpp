#include "refcalib/kinematics.hpp"

#include <cmath>

#include "refcalib/errors.hpp"
#include "refcalib/log.hpp"

namespace refcalib {

const char* to_string(JointKind kind) {
  switch (kind) {
    case JointKind::kRevolute: return "revolute";
    case JointKind::kPrismatic: return "prismatic";
    case JointKind::kFixed: return "fixed";
  }
  return "fixed";
}

JointKind joint_kind_from_string(const std::string& s) {
  if (s == "revolute") return JointKind::kRevolute;
  if (s == "prismatic") return JointKind::kPrismatic;
  if (s == "fixed") return JointKind::kFixed;
  throw InvalidArgument("unknown joint kind '" + s + "'");
}

Pose Joint::origin() const {
  return Pose::FromQuaternion(origin_rotation, origin_translation);
}

Pose Joint::transform(double q) const {
  const Pose o = origin();
  switch (kind) {
    case JointKind::kRevolute:
      return o * Pose(Eigen::AngleAxisd(q, axis).toRotationMatrix(),
                      Vec3::Zero());
    case JointKind::kPrismatic:
      return o * Pose(Mat3::Identity(), q * axis);
    case JointKind::kFixed:
      break;
  }
  return o;
}

KinematicChain::KinematicChain(std::string name, std::vector<Joint> joints)
    : name_(std::move(name)), joints_(std::move(joints)) {
  for (std::size_t i = 0; i < joints_.size(); ++i) {
    const Joint& j = joints_[i];
    const std::string label = "joint " + std::to_string(i) + " ('" + j.name + "')";
    if (j.actuated()) {
      if (!j.axis.allFinite() || std::abs(j.axis.norm() - 1.0) > 1e-9) {
        throw InvalidArgument(label + ": axis must have unit norm");
      }
      ++dof_;
    }
    if (!j.origin_translation.allFinite() || !j.origin_rotation.coeffs().allFinite() ||
        j.origin_rotation.norm() == 0.0) {
      throw InvalidArgument(label + ": invalid origin");
    }
    if (j.limits && !(j.limits->first <= j.limits->second)) {
      throw InvalidArgument(label + ": limits must satisfy lo <= hi");
    }
    // Named links must connect end to end; anything else is a branch.
    if (i > 0 && !j.parent.empty() && !joints_[i - 1].child.empty() &&
        j.parent != joints_[i - 1].child) {
      throw InvalidArgument(label + ": parent '" + j.parent +
                            "' does not continue the serial chain after '" +
                            joints_[i - 1].child + "' (branching chains are not supported)");
    }
  }
  for (std::size_t i = 0; i < joints_.size(); ++i) {
    if (joints_[i].child.empty()) continue;
    for (std::size_t k = i + 1; k < joints_.size(); ++k) {
      if (joints_[k].child == joints_[i].child) {
        throw InvalidArgument("link '" + joints_[i].child +
                              "' has more than one parent joint");
      }
    }
  }
}

void KinematicChain::validate(const ReferencePoint& ref) const {
  if (ref.link_index >= link_count()) {
    throw InvalidArgument("reference point link index " +
                          std::to_string(ref.link_index) + " out of range (" +
                          std::to_string(link_count()) + " links)");
  }
  if (!ref.offset.allFinite()) {
    throw InvalidArgument("reference point offset must be finite");
  }
}

void JointLog::validate(std::size_t dof) const {
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (i > 0 && frames[i].frame_index <= frames[i - 1].frame_index) {
      throw NonMonotoneFrames("joint log", i + 1);
    }
    if (static_cast<std::size_t>(frames[i].positions.size()) != dof) {
      throw DimensionMismatch(dof, frames[i].positions.size());
    }
  }
}

std::vector<Pose> forward_kinematics(const KinematicChain& chain,
                                     const Eigen::VectorXd& q,
                                     LimitPolicy policy) {
  if (static_cast<std::size_t>(q.size()) != chain.dof()) {
    throw DimensionMismatch(chain.dof(), q.size());
  }
  std::vector<Pose> poses;
  poses.reserve(chain.link_count());
  poses.push_back(Pose::Identity());
  std::size_t qi = 0;
  for (const Joint& joint : chain.joints()) {
    double value = 0.0;
    if (joint.actuated()) {
      value = q[static_cast<Eigen::Index>(qi)];
      if (!std::isfinite(value)) {
        throw InvalidArgument("joint value " + std::to_string(qi) + " is not finite");
      }
      if (joint.limits && policy != LimitPolicy::kIgnore &&
          (value < joint.limits->first || value > joint.limits->second)) {
        const JointLimitViolation err(qi, value, joint.limits->first,
                                      joint.limits->second);
        if (policy == LimitPolicy::kThrow) throw err;
        log_warn(err.what());
      }
      ++qi;
    }
    poses.push_back(poses.back() * joint.transform(value));
  }
  return poses;
}

Pose end_effector_pose(const KinematicChain& chain, const Eigen::VectorXd& q,
                       LimitPolicy policy) {
  return forward_kinematics(chain, q, policy).back();
}

Point3 reference_point_in_base(const KinematicChain& chain,
                               const ReferencePoint& ref,
                               const Eigen::VectorXd& q, LimitPolicy policy) {
  chain.validate(ref);
  if (ref.link_index == 0) {
    if (static_cast<std::size_t>(q.size()) != chain.dof()) {
      throw DimensionMismatch(chain.dof(), q.size());
    }
    return ref.offset;
  }
  return forward_kinematics(chain, q, policy)[ref.link_index] * ref.offset;
}

Point3 base_point_in_ee_frame(const KinematicChain& chain,
                              const Eigen::VectorXd& q, const Point3& p_base,
                              LimitPolicy policy) {
  return end_effector_pose(chain, q, policy).inverse() * p_base;
}

namespace {

// Modified (Craig) DH row: RotX(alpha) * TransX(a) * TransZ(d) * RotZ(theta).
Joint mdh_joint(std::string name, double a, double d, double alpha,
                JointKind kind, std::optional<std::pair<double, double>> limits) {
  Joint j;
  j.name = std::move(name);
  j.kind = kind;
  j.axis = Vec3::UnitZ();
  j.origin_rotation = Eigen::Quaterniond(std::cos(0.5 * alpha), std::sin(0.5 * alpha), 0.0, 0.0);
  // Adding 0.0 turns a -0.0 product into +0.0 so chain files stay clean.
  j.origin_translation = Vec3(a, -std::sin(alpha) * d + 0.0, std::cos(alpha) * d + 0.0);
  j.limits = limits;
  return j;
}

}  // namespace

KinematicChain make_panda_chain() {
  constexpr double h = M_PI / 2.0;
  std::vector<Joint> joints;
  joints.push_back(mdh_joint("panda_joint1", 0.0, 0.333, 0.0, JointKind::kRevolute, {{-2.8973, 2.8973}}));
  joints.push_back(mdh_joint("panda_joint2", 0.0, 0.0, -h, JointKind::kRevolute, {{-1.7628, 1.7628}}));
  joints.push_back(mdh_joint("panda_joint3", 0.0, 0.316, h, JointKind::kRevolute, {{-2.8973, 2.8973}}));
  joints.push_back(mdh_joint("panda_joint4", 0.0825, 0.0, h, JointKind::kRevolute, {{-3.0718, -0.0698}}));
  joints.push_back(mdh_joint("panda_joint5", -0.0825, 0.384, -h, JointKind::kRevolute, {{-2.8973, 2.8973}}));
  joints.push_back(mdh_joint("panda_joint6", 0.0, 0.0, h, JointKind::kRevolute, {{-0.0175, 3.7525}}));
  joints.push_back(mdh_joint("panda_joint7", 0.088, 0.0, h, JointKind::kRevolute, {{-2.8973, 2.8973}}));
  joints.push_back(mdh_joint("panda_flange", 0.0, 0.107, 0.0, JointKind::kFixed, std::nullopt));
  const char* links[] = {"panda_link0", "panda_link1", "panda_link2",
                         "panda_link3", "panda_link4", "panda_link5",
                         "panda_link6", "panda_link7", "panda_link8"};
  for (std::size_t i = 0; i < joints.size(); ++i) {
    joints[i].parent = links[i];
    joints[i].child = links[i + 1];
  }
  return KinematicChain("panda", std::move(joints));
}

ReferencePoint panda_fingertip_reference() {
  // Closed-gripper fingertip center, 0.1034 m along the flange z axis.
  return ReferencePoint{8, Point3(0.0, 0.0, 0.1034)};
}

ReferencePoint panda_base_reference(double x_ref) {
  return ReferencePoint{0, Point3(x_ref, 0.0, 0.0)};
}

Eigen::VectorXd mid_configuration(const KinematicChain& chain) {
  Eigen::VectorXd q = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(chain.dof()));
  Eigen::Index i = 0;
  for (const Joint& j : chain.joints()) {
    if (!j.actuated()) continue;
    if (j.limits) q[i] = 0.5 * (j.limits->first + j.limits->second);
    ++i;
  }
  return q;
}

}  // namespace refcalib
