#include "trajkit/model.hpp"

#include <algorithm>
#include <cmath>

namespace trajkit {

std::string_view to_string(VehicleClass c) noexcept {
  return c == VehicleClass::Truck ? "Truck" : "Car";
}

std::optional<VehicleClass> parse_vehicle_class(std::string_view s) noexcept {
  if (s == "Car") return VehicleClass::Car;
  if (s == "Truck") return VehicleClass::Truck;
  return std::nullopt;
}

int RecordingMeta::max_frame() const noexcept {
  return static_cast<int>(std::floor(duration * frame_rate + 1e-9));
}

int RecordingMeta::frame_count() const noexcept {
  return static_cast<int>(std::ceil(duration * frame_rate - 1e-9));
}

namespace {

void check_markings(const std::vector<double>& m, const char* name, std::vector<std::string>& out) {
  if (m.size() < 3) {
    out.push_back(std::string(name) + ": need at least 3 markings (2 lanes)");
  }
  for (std::size_t i = 1; i < m.size(); ++i) {
    if (!(m[i] > m[i - 1])) {
      out.push_back(std::string(name) + ": markings not strictly increasing at index " + std::to_string(i));
      break;
    }
  }
  for (double v : m) {
    if (!std::isfinite(v)) {
      out.push_back(std::string(name) + ": non-finite marking");
      break;
    }
  }
}

}  // namespace

std::vector<std::string> check_invariants(const RecordingMeta& meta) {
  std::vector<std::string> out;
  if (!(meta.frame_rate > 0) || !std::isfinite(meta.frame_rate)) out.emplace_back("frameRate must be > 0");
  if (!(meta.duration > 0) || !std::isfinite(meta.duration)) out.emplace_back("duration must be > 0");
  if (!(meta.pixel_size > 0)) out.emplace_back("pixel size must be > 0");
  check_markings(meta.upper_lane_markings, "upperLaneMarkings", out);
  check_markings(meta.lower_lane_markings, "lowerLaneMarkings", out);
  const std::size_t lanes = static_cast<std::size_t>(meta.lane_count(DrivingDirection::Upper) +
                                                     meta.lane_count(DrivingDirection::Lower));
  if (meta.speed_limits.size() != lanes) {
    out.push_back("speedLimits has " + std::to_string(meta.speed_limits.size()) + " entries for " +
                  std::to_string(lanes) + " lanes");
  }
  for (const auto& limit : meta.speed_limits) {
    if (limit && !(*limit > 0)) {
      out.emplace_back("speed limit must be positive or unlimited");
      break;
    }
  }
  return out;
}

double compute_mean_speed(const std::vector<KinematicState>& states) noexcept {
  if (states.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : states) sum += std::abs(s.vx);
  return sum / static_cast<double>(states.size());
}

int count_lane_transitions(const std::vector<KinematicState>& states) noexcept {
  int n = 0;
  for (std::size_t i = 1; i < states.size(); ++i) {
    if (states[i].lane_id != states[i - 1].lane_id) ++n;
  }
  return n;
}

std::optional<int> lane_id_of(double y, const std::vector<double>& markings) noexcept {
  if (markings.size() < 2 || !(y >= markings.front()) || !(y < markings.back())) return std::nullopt;
  // First marking strictly greater than y closes the lane.
  const auto it = std::upper_bound(markings.begin(), markings.end(), y);
  return static_cast<int>(it - markings.begin());
}

std::optional<int> lane_id_of(double y, const RecordingMeta& meta, DrivingDirection dir) noexcept {
  return lane_id_of(y, meta.markings(dir));
}

std::optional<DrivingDirection> carriageway_of(double y, const RecordingMeta& meta) noexcept {
  if (lane_id_of(y, meta.upper_lane_markings)) return DrivingDirection::Upper;
  if (lane_id_of(y, meta.lower_lane_markings)) return DrivingDirection::Lower;
  return std::nullopt;
}

bool ahead_of(const KinematicState& a, const KinematicState& b, DrivingDirection dir) {
  if (a.frame != b.frame) {
    throw ContractViolation("ahead_of: states from frames " + std::to_string(a.frame) + " and " +
                            std::to_string(b.frame));
  }
  return travel_sign(dir) * (a.x - b.x) > 0.0;
}

}  // namespace trajkit
