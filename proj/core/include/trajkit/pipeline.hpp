#pragma once

// Batch commands over directories of recordings. Each command processes its
// recordings on a bounded worker pool and merges results in input order, so
// outputs do not depend on the number of workers.
//
// Directory conventions (NN = two-digit recording id):
//   detections dir   NN_recordingMeta.csv + NN_detections.csv
//   recordings dir   NN_recordingMeta.csv, NN_tracksMeta.csv, NN_tracks.csv
//
// Config files are JSON; every key is optional:
//   {
//     "input": "dir", "output": "dir", "jobs": 1, "seed": 7,
//     "tracker":  {"gateRadius": 2.5, "minHits": 5, "maxCoast": 12},
//     "smoother": {"measurementSigma": 0.1, "jerkSigma": 2.0,
//                  "initialVelocitySigma": 1e4, "initialAccelSigma": 1e3},
//     "maneuver": {"followingThwMax": 3.0, "followingHysteresis": 0.5,
//                  "criticalTtcMax": 4.0, "criticalThwMax": 1.0,
//                  "laneChangeMinDwell": 25, "lateralSettleSpeed": 0.1},
//     "fit":      {"longitudinalWeight": 0.1, "minDuration": 1, "maxDuration": 15,
//                  "durationStep": 0.5, "timeTolerance": 1e-7, "maxIterations": 200,
//                  "minSamples": 10, "minLateralSpan": 0.1, "windowPadding": 1.0},
//     "stats":    {"speedBin": 1.0, "truckWindow": 60, "cutInSpeedBin": 2.0,
//                  "thwBin": 0.25}
//   }
// Frame rate and time step always come from each recording's meta.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "trajkit/kinematics.hpp"
#include "trajkit/lane_change_fit.hpp"
#include "trajkit/maneuvers.hpp"
#include "trajkit/track_builder.hpp"

namespace trajkit {

struct StatsConfig {
  double speed_bin = 1.0;         // m/s, mean-speed histogram
  double truck_window = 60.0;     // s, truck-ratio windows
  double cut_in_speed_bin = 2.0;  // m/s, entry THW deciles by tail speed
  double thw_bin = 0.25;          // s, entry THW histogram

  void validate() const;
};

struct PipelineConfig {
  TrackerConfig tracker;
  SmootherConfig smoother;
  ManeuverConfig maneuver;
  FitConfig fit;
  StatsConfig stats;
  std::filesystem::path input;
  std::filesystem::path output;
  int jobs = 1;
  std::optional<std::uint64_t> seed;  // replaces script seeds in synth

  /// Throws ContractViolation on the first invalid field.
  void validate() const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Overlays the keys present in `json_text` onto `base`.
PipelineConfig parse_pipeline_config(const std::string& json_text, PipelineConfig base = {});
PipelineConfig load_pipeline_config(const std::filesystem::path& path, PipelineConfig base = {});

/// One machine-readable failure.
struct ErrorReport {
  std::string kind;
  std::string message;
  std::optional<int> recording_id;
  std::string file;
  std::size_t row = 0;
  std::string column;

  nlohmann::ordered_json to_json() const;
};

struct CommandResult {
  std::vector<ErrorReport> errors;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();

  int exit_code() const noexcept { return errors.empty() ? 0 : 1; }
};

/// Runs fn(0..n-1) on at most `jobs` threads.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

/// Recording ids with a detection file in `dir`.
std::vector<int> discover_detection_sets(const std::filesystem::path& dir);

std::filesystem::path detections_path(const std::filesystem::path& dir, int recording_id);

/// Tracks, smooths and annotates every detection set, writing recording files
/// and NN_trackReport.json.
CommandResult run_track(const PipelineConfig& cfg);

/// Maneuvers, lane-change fits, cut-ins and statistics for every recording.
CommandResult run_extract(const PipelineConfig& cfg);

/// Statistics tables only.
CommandResult run_stats(const PipelineConfig& cfg);

/// cfg.input is a script file or a directory of *.json scripts. Writes the
/// detection sets to cfg.output and the exact truth to cfg.output/truth.
CommandResult run_synth(const PipelineConfig& cfg);

/// Validates every recording found in cfg.input.
CommandResult run_validate(const PipelineConfig& cfg);

}  // namespace trajkit
