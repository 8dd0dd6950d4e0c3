#pragma once

// Synthetic highway scenes with exact ground truth, and their corruption into
// detection streams. Longitudinal motion is piecewise constant acceleration;
// lane changes follow the quintic lane-change model.
//
// Script files are JSON:
//
//   {
//     "seed": 7, "recordingId": 1, "locationId": 1,
//     "frameRate": 25, "duration": 60, "roadLength": 420,
//     "upperLaneMarkings": [0, 3.5, 7.0], "lowerLaneMarkings": [10, 13.5, 17],
//     "speedLimits": [-1, -1, -1, -1],
//     "vehicles": [{"id": 1, "class": "Car", "direction": "lower", "lane": 1,
//                   "entryTime": 0, "entryX": 0, "length": 4.5, "width": 1.8,
//                   "speed": 25, "lateralOffset": 0,
//                   "profile": [{"duration": 4, "acceleration": 0.5}]}],
//     "laneChanges": [{"vehicle": 1, "startTime": 5, "duration": 5,
//                      "toLane": 2, "endOffset": 0}],
//     "noise": {"positionSigma": 0.1, "dropoutProbability": 0,
//               "dropoutBurstLength": 1, "falsePositiveRate": 0,
//               "bursts": [{"vehicle": 1, "startFrame": 10, "length": 3}]}
//   }
//
// Optional keys: entryX (defaults to the road end the vehicle enters from),
// lateralOffset, profile, laneChanges, noise, endOffset, locationId, speedLimits
// (defaults to unlimited).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "trajkit/lane_change_fit.hpp"
#include "trajkit/maneuvers.hpp"
#include "trajkit/model.hpp"

namespace trajkit {

class ScriptError : public std::runtime_error {
 public:
  ScriptError(std::string location, const std::string& message);
  const std::string& location() const noexcept { return location_; }

 private:
  std::string location_;
};

struct SpeedSegment {
  double duration = 0;      // s
  double acceleration = 0;  // m/s^2
};

struct VehicleSpec {
  int id = 0;
  VehicleClass vehicle_class = VehicleClass::Car;
  DrivingDirection direction = DrivingDirection::Lower;
  int lane = 1;
  double entry_time = 0;
  std::optional<double> entry_x;
  double length = 4.5;
  double width = 1.8;
  double initial_speed = 25;     // m/s along travel direction
  double lateral_offset = 0;     // m from lane center, +y
  std::vector<SpeedSegment> profile;  // constant speed after the last segment
};

struct ScriptedLaneChange {
  int vehicle_id = 0;
  double start_time = 0;
  double duration = 5;
  int to_lane = 0;
  double end_offset = 0;  // m from target lane center, +y
};

struct DropoutBurst {
  int vehicle_id = 0;
  int start_frame = 0;
  int length = 1;
};

struct NoiseSpec {
  double position_sigma = 0;       // m
  double dropout_probability = 0;  // chance per frame that a dropout burst starts
  int dropout_burst_length = 1;    // frames
  double false_positive_rate = 0;  // mean single-frame false positives per frame
  std::vector<DropoutBurst> bursts;
};

struct ScenarioScript {
  std::uint64_t seed = 1;
  RecordingMeta meta;
  double road_length = 420;
  std::vector<VehicleSpec> vehicles;
  std::vector<ScriptedLaneChange> lane_changes;
  NoiseSpec noise;
};

struct TruthLaneChange {
  ManeuverEpisode episode;
  LaneChangeParams params;
  double t0 = 0;  // s
};

struct GroundTruth {
  RecordingMeta meta;
  std::vector<Track> tracks;
  std::vector<TruthLaneChange> lane_changes;
  std::vector<CutInScenario> cut_ins;
};

/// Exact trajectories sampled at the frame rate, plus lane-change episodes and
/// cut-ins derived from the script. Throws ScriptError for invalid scripts,
/// including vehicles whose boxes overlap.
GroundTruth generate_truth(const ScenarioScript& script, const ManeuverConfig& cfg = {});

/// Per-frame detection lists (frames 0..max_frame) drawn from the truth
/// tracks. Deterministic in `seed`.
std::vector<std::vector<Detection>> corrupt(std::span<const Track> truth, const RecordingMeta& meta,
                                            const NoiseSpec& noise, std::uint64_t seed, double road_length = 420);

/// Scenario script from its JSON text; `source` prefixes error locations.
ScenarioScript parse_script(const std::string& json_text, const std::string& source = "script");
ScenarioScript load_script(const std::filesystem::path& path);

/// Cut-in scenarios whose entry THW follows intercept + slope * speed plus
/// Gaussian noise, with tail speeds uniform in [speed_lo, speed_hi).
std::vector<CutInScenario> sample_cut_in_population(std::size_t n, double intercept, double slope, double noise_sigma,
                                                    double speed_lo, double speed_hi, std::uint64_t seed);

}  // namespace trajkit
