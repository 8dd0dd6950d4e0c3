#pragma once

// Frame-to-frame association of detections into tracks.
//
// Association is greedy nearest-neighbor inside a distance gate. New tracks
// stay tentative until they collect min_hits_to_confirm measured detections;
// unconfirmed tracks are dropped, which removes single-frame false positives.
// Unmatched tracks coast on a constant-velocity prediction for at most
// max_coast frames.

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trajkit/model.hpp"

namespace trajkit {

struct TrackerConfig {
  double gate_radius = 2.5;     // m
  int min_hits_to_confirm = 5;  // measured frames
  int max_coast = 12;           // frames
  double frame_rate = 25.0;     // Hz

  void validate() const;
};

struct Observation {
  int frame = 0;
  double x = 0;
  double y = 0;
  bool predicted = false;

  friend bool operator==(const Observation&, const Observation&) = default;
};

struct RawTrack {
  int track_id = 0;
  std::vector<Observation> observations;
  int car_votes = 0;
  int truck_votes = 0;
  std::vector<double> lengths;  // measured extents, one per matched detection
  std::vector<double> widths;

  int measured_count() const noexcept;
  int trailing_predicted() const noexcept;
  int last_frame() const { return observations.back().frame; }
  /// Constant-velocity extrapolation from the last two observations to `frame`.
  std::pair<double, double> predict(int frame) const;
  /// Majority of class hints; a tie is a Car.
  VehicleClass vehicle_class() const noexcept;
  double median_length() const;
  double median_width() const;

  friend bool operator==(const RawTrack&, const RawTrack&) = default;
};

struct Assignment {
  std::vector<std::pair<std::size_t, std::size_t>> matches;  // (track index, detection index)
  std::vector<std::size_t> unmatched_tracks;
  std::vector<std::size_t> unmatched_detections;
};

/// Matches one frame of detections against active tracks. Feasible pairs lie
/// within gate_radius of the track prediction; pairs are taken greedily by
/// ascending distance, ties by lower track id then lower detection index.
/// Throws ContractViolation if detections are not all at last frame + 1.
Assignment associate_frame(std::span<const RawTrack> active, std::span<const Detection> detections,
                           const TrackerConfig& cfg);

/// Stateful tracker over a sequence of frames starting at frame 0.
class Tracker {
 public:
  explicit Tracker(TrackerConfig cfg);

  void step(std::span<const Detection> detections);
  /// Closes all tracks and returns the confirmed ones, ids renumbered 1..n in
  /// order of first frame.
  std::vector<RawTrack> finish();

  int next_frame() const noexcept { return next_frame_; }
  std::size_t active_count() const noexcept { return active_.size(); }

 private:
  TrackerConfig cfg_;
  int next_frame_ = 0;
  int next_id_ = 1;
  std::vector<RawTrack> active_;
  std::vector<RawTrack> done_;

  void close(RawTrack&& t);
};

/// frames[i] holds every detection of frame i.
std::vector<RawTrack> build_tracks(std::span<const std::vector<Detection>> frames, const TrackerConfig& cfg);

/// Detection CSV: frame,cx,cy,length,width,class ("Car", "Truck" or empty).
std::string format_detections(std::span<const std::vector<Detection>> frames);
/// Groups rows by frame into `frame_count` lists (or max frame + 1 when 0).
/// Throws DatasetError naming file, row and column on malformed input.
std::vector<std::vector<Detection>> parse_detections(const std::string& text, const std::string& source_name,
                                                     int frame_count = 0);

}  // namespace trajkit
