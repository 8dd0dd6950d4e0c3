#pragma once

// Shared domain types for the trajectory pipeline.
//
// Coordinates are road-aligned: x is longitudinal, y lateral, both in meters,
// and every position refers to the bounding-box center. The lower carriageway
// travels toward +x, the upper one toward -x. "Left" in a vehicle's own travel
// direction is -y on the lower carriageway and +y on the upper one.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace trajkit {

/// Raised when a caller breaks an operation's precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised when a numerical routine cannot produce a trustworthy result.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class VehicleClass : std::uint8_t { Car, Truck };

std::string_view to_string(VehicleClass c) noexcept;
/// Parses "Car" / "Truck"; anything else is rejected.
std::optional<VehicleClass> parse_vehicle_class(std::string_view s) noexcept;

enum class DrivingDirection : std::uint8_t { Upper = 1, Lower = 2 };

/// +1 when increasing x is "ahead", -1 otherwise.
constexpr double travel_sign(DrivingDirection d) noexcept {
  return d == DrivingDirection::Lower ? 1.0 : -1.0;
}

/// Lane-id step that moves one lane to the vehicle's left.
constexpr int left_lane_step(DrivingDirection d) noexcept {
  return d == DrivingDirection::Lower ? -1 : 1;
}

struct RecordingMeta {
  int recording_id = 1;
  int location_id = 1;
  double frame_rate = 25.0;
  double duration = 0.0;
  std::vector<double> upper_lane_markings;
  std::vector<double> lower_lane_markings;
  // Upper-carriageway lanes first, then lower; nullopt = unlimited.
  std::vector<std::optional<double>> speed_limits;
  double pixel_size = 0.10;

  const std::vector<double>& markings(DrivingDirection d) const noexcept {
    return d == DrivingDirection::Upper ? upper_lane_markings : lower_lane_markings;
  }
  int lane_count(DrivingDirection d) const noexcept {
    const auto n = static_cast<int>(markings(d).size());
    return n > 0 ? n - 1 : 0;
  }
  /// Largest frame index a file may reference: floor(duration * frame_rate).
  int max_frame() const noexcept;
  /// Frames sampled strictly before `duration`: 250 for 10 s at 25 Hz.
  int frame_count() const noexcept;
};

/// Human-readable invariant violations; empty when the meta is valid.
std::vector<std::string> check_invariants(const RecordingMeta& meta);

struct KinematicState {
  int frame = 0;
  double x = 0, y = 0;
  double vx = 0, vy = 0;
  double ax = 0, ay = 0;
  int lane_id = 0;  // 0 = off-road

  friend bool operator==(const KinematicState&, const KinematicState&) = default;
};

struct Track {
  int track_id = 0;
  VehicleClass vehicle_class = VehicleClass::Car;
  DrivingDirection direction = DrivingDirection::Lower;
  double length = 0;
  double width = 0;
  std::vector<KinematicState> states;
  double mean_speed = 0;

  int first_frame() const { return states.front().frame; }
  int last_frame() const { return states.back().frame; }
  bool alive_at(int frame) const noexcept {
    return !states.empty() && frame >= states.front().frame && frame <= states.back().frame;
  }
  /// State at an absolute frame; the frame must be alive.
  const KinematicState& at(int frame) const { return states[static_cast<std::size_t>(frame - states.front().frame)]; }

  friend bool operator==(const Track&, const Track&) = default;
};

/// Mean of per-frame longitudinal speed magnitudes.
double compute_mean_speed(const std::vector<KinematicState>& states) noexcept;

/// Number of frame-to-frame lane_id transitions.
int count_lane_transitions(const std::vector<KinematicState>& states) noexcept;

struct Detection {
  int frame = 0;
  double cx = 0, cy = 0;
  double length = 0, width = 0;
  std::optional<VehicleClass> class_hint;

  friend bool operator==(const Detection&, const Detection&) = default;
};

/// 1-based lane whose half-open interval [m_k, m_{k+1}) contains y, or
/// nullopt when y lies outside the carriageway.
std::optional<int> lane_id_of(double y, const RecordingMeta& meta, DrivingDirection dir) noexcept;
std::optional<int> lane_id_of(double y, const std::vector<double>& markings) noexcept;

/// Carriageway whose marking span contains y; nullopt when on neither.
std::optional<DrivingDirection> carriageway_of(double y, const RecordingMeta& meta) noexcept;

/// True iff a is strictly ahead of b along the travel direction.
/// Throws ContractViolation when the frames differ.
bool ahead_of(const KinematicState& a, const KinematicState& b, DrivingDirection dir);

}  // namespace trajkit
