#pragma once

// Rule-based maneuver labels: free driving / vehicle following (THW with
// hysteresis), critical headway episodes, and lane changes.

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trajkit/model.hpp"
#include "trajkit/surround.hpp"

namespace trajkit {

struct ManeuverConfig {
  double following_thw_max = 3.0;     // s
  double following_hysteresis = 0.5;  // s
  double critical_ttc_max = 4.0;      // s
  double critical_thw_max = 1.0;      // s
  int lane_change_min_dwell = 25;     // frames
  double lateral_settle_speed = 0.1;  // m/s

  void validate() const;
};

enum class ManeuverKind { FreeDriving, VehicleFollowing, Critical, LaneChange };

std::string_view to_string(ManeuverKind k) noexcept;

enum class LongitudinalLabel { FreeDriving, VehicleFollowing };

struct ManeuverEpisode {
  int track_id = 0;
  ManeuverKind kind = ManeuverKind::FreeDriving;
  int start_frame = 0;
  int end_frame = 0;
  // Lane changes only; zero otherwise.
  int from_lane = 0;
  int to_lane = 0;
  int crossing_frame = 0;
  bool complete = false;

  friend bool operator==(const ManeuverEpisode&, const ManeuverEpisode&) = default;
};

/// One label per frame. Entering VehicleFollowing needs thw < following_thw_max;
/// leaving it needs thw > following_thw_max + following_hysteresis, or the
/// preceding vehicle (or its THW) to disappear.
std::vector<LongitudinalLabel> label_longitudinal(const Track& track, std::span<const SurroundFrame> surround,
                                                  const ManeuverConfig& cfg);

/// FreeDriving and VehicleFollowing episodes from label runs.
std::vector<ManeuverEpisode> longitudinal_episodes(const Track& track, std::span<const LongitudinalLabel> labels);

/// Maximal runs of frames with 0 < ttc < critical_ttc_max or
/// 0 < thw < critical_thw_max.
std::vector<ManeuverEpisode> detect_critical(const Track& track, std::span<const SurroundFrame> surround,
                                             const ManeuverConfig& cfg);

/// Lane changes: a lane_id transition whose new lane lasts at least
/// lane_change_min_dwell frames, and whose old lane was either the track's
/// first lane run or itself lasted that long (returns from a bounce are not
/// lane changes). Extent runs to the nearest |vy| < lateral_settle_speed
/// frames around the crossing; overlapping neighbours split at the |vy|
/// minimum between their crossings.
std::vector<ManeuverEpisode> detect_lane_changes(const Track& track, const ManeuverConfig& cfg);

/// All four detectors, ordered by kind then start frame.
std::vector<ManeuverEpisode> detect_maneuvers(const Track& track, std::span<const SurroundFrame> surround,
                                              const ManeuverConfig& cfg);

/// Canonical CSV: recordingId,trackId,kind,startFrame,endFrame,fromLane,toLane,crossingFrame,complete
std::string format_episodes_csv(int recording_id, std::span<const ManeuverEpisode> episodes);
/// Canonical JSON array with the same fields.
std::string format_episodes_json(int recording_id, std::span<const ManeuverEpisode> episodes);

}  // namespace trajkit
