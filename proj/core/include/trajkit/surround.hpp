#pragma once

// Per-frame neighbor assignment and headway metrics.
//
// DHW is the bumper-to-bumper gap, so dhw == 0 means contact. THW divides it by
// the ego speed, TTC by the closing speed; both are undefined (nullopt, -1 in
// files) below a 0.1 m/s floor.

#include <optional>
#include <span>
#include <vector>

#include "trajkit/model.hpp"

namespace trajkit {

inline constexpr double kMinThwSpeed = 0.1;
inline constexpr double kMinClosingSpeed = 0.1;

struct SurroundFrame {
  int frame = 0;
  int track_id = 0;
  int preceding = 0;
  int following = 0;
  int left_preceding = 0;
  int left_alongside = 0;
  int left_following = 0;
  int right_preceding = 0;
  int right_alongside = 0;
  int right_following = 0;
  std::optional<double> dhw;
  std::optional<double> thw;
  std::optional<double> ttc;

  friend bool operator==(const SurroundFrame&, const SurroundFrame&) = default;
};

/// One vehicle as seen in a single frame.
struct VehicleSnapshot {
  int track_id = 0;
  DrivingDirection direction = DrivingDirection::Lower;
  double length = 0;
  double width = 0;
  KinematicState state;
};

struct Headway {
  double dhw = 0;
  std::optional<double> thw;
  std::optional<double> ttc;
};

/// Bumper-to-bumper longitudinal gap between a lead and the vehicle behind it,
/// clamped at 0. Throws ContractViolation unless lead is ahead of tail.
double gap_size(const KinematicState& tail, double tail_length, const KinematicState& lead, double lead_length,
                DrivingDirection dir);

/// DHW/THW/TTC of ego with respect to a lead vehicle ahead of it.
Headway headway_metrics(const KinematicState& ego, double ego_length, const KinematicState& lead, double lead_length,
                        DrivingDirection dir);

/// Neighbor slots and own-lane headway metrics for every vehicle of one frame.
/// Output is parallel to the input. Only same-carriageway vehicles interact.
std::vector<SurroundFrame> assign_neighbors(std::span<const VehicleSnapshot> vehicles, const RecordingMeta& meta);

/// Runs assign_neighbors over every frame of a recording; result[i][k] belongs
/// to tracks[i].states[k].
std::vector<std::vector<SurroundFrame>> compute_surround(std::span<const Track> tracks, const RecordingMeta& meta);

}  // namespace trajkit
