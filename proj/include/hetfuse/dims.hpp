#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

namespace hetfuse {

enum class VarKind : uint8_t { RobotPose, Landmark, TargetState };

inline const char* to_string(VarKind k) {
  switch (k) {
    case VarKind::RobotPose: return "pose";
    case VarKind::Landmark: return "landmark";
    case VarKind::TargetState: return "target";
  }
  return "?";
}

/// Identifies one random variable of the joint estimation problem.
///
/// RobotPose(robot, timestep) is 3-dof (x, y, heading), Landmark(robot,
/// index) is 2-dof (x, y) and TargetState(target, timestep) is 4-dof
/// (X, Xdot, Y, Ydot). Ids are globally unique and totally ordered; the
/// order is time-major so that elimination sweeps run forward in time,
/// with landmarks sorted after all timestepped variables.
struct VariableId {
  VarKind kind = VarKind::RobotPose;
  int32_t owner = 0;  // robot id for poses/landmarks, target id for targets
  int32_t index = 0;  // timestep for poses/targets, landmark index for landmarks

  static VariableId robot_pose(int32_t robot, int32_t timestep) {
    return {VarKind::RobotPose, robot, timestep};
  }
  static VariableId landmark(int32_t robot, int32_t lm_index) {
    return {VarKind::Landmark, robot, lm_index};
  }
  static VariableId target_state(int32_t target, int32_t timestep) {
    return {VarKind::TargetState, target, timestep};
  }

  int dimension() const {
    switch (kind) {
      case VarKind::RobotPose: return 3;
      case VarKind::Landmark: return 2;
      case VarKind::TargetState: return 4;
    }
    return 0;
  }

  // Landmarks carry no timestep; they sort after every timestepped variable.
  int32_t time_rank() const {
    return kind == VarKind::Landmark ? std::numeric_limits<int32_t>::max() : index;
  }

  friend bool operator==(const VariableId& a, const VariableId& b) {
    return a.kind == b.kind && a.owner == b.owner && a.index == b.index;
  }
  friend bool operator<(const VariableId& a, const VariableId& b) {
    return std::tuple(a.time_rank(), a.kind, a.owner, a.index) <
           std::tuple(b.time_rank(), b.kind, b.owner, b.index);
  }
  friend bool operator!=(const VariableId& a, const VariableId& b) { return !(a == b); }
  friend bool operator>(const VariableId& a, const VariableId& b) { return b < a; }
  friend bool operator<=(const VariableId& a, const VariableId& b) { return !(b < a); }
  friend bool operator>=(const VariableId& a, const VariableId& b) { return !(a < b); }

  std::string str() const {
    std::string s = to_string(kind);
    s += "(" + std::to_string(owner) + "," + std::to_string(index) + ")";
    return s;
  }
};

void to_json(nlohmann::json& j, const VariableId& v);
void from_json(const nlohmann::json& j, VariableId& v);

/// One scalar dimension of a variable: (owner, component index).
struct DimKey {
  VariableId owner;
  int32_t comp = 0;

  friend bool operator==(const DimKey& a, const DimKey& b) {
    return a.owner == b.owner && a.comp == b.comp;
  }
  friend bool operator!=(const DimKey& a, const DimKey& b) { return !(a == b); }
  friend bool operator<(const DimKey& a, const DimKey& b) {
    if (a.owner < b.owner) return true;
    if (b.owner < a.owner) return false;
    return a.comp < b.comp;
  }

  std::string str() const { return owner.str() + "." + std::to_string(comp); }
};

void to_json(nlohmann::json& j, const DimKey& d);
void from_json(const nlohmann::json& j, DimKey& d);

/// All scalar dims of a variable, in component order.
std::vector<DimKey> dims_of(const VariableId& v);

/// Concatenated dims of several variables, sorted canonically.
std::vector<DimKey> dims_of(const std::vector<VariableId>& vars);

}  // namespace hetfuse
