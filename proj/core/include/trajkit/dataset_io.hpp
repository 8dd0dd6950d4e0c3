#pragma once

// Reader, writer and validator for one recording's file set:
//
//   <id>_recordingMeta.csv  id,locationId,frameRate,duration,upperLaneMarkings,
//                           lowerLaneMarkings,speedLimits
//   <id>_tracksMeta.csv     id,length,width,class,drivingDirection,meanSpeed,
//                           numFrames,initialFrame,finalFrame,numLaneChanges
//   <id>_tracks.csv         frame,id,x,y,xVelocity,yVelocity,xAcceleration,
//                           yAcceleration,laneId,precedingId,followingId,
//                           leftPrecedingId,leftAlongsideId,leftFollowingId,
//                           rightPrecedingId,rightAlongsideId,rightFollowingId,
//                           dhw,thw,ttc
//
// Lists inside one cell are ';'-separated. Sentinels: speed limit -1 means
// unlimited, neighbor id 0 means none, dhw/thw/ttc -1 means undefined.
// drivingDirection is 1 (upper) or 2 (lower). Writing is canonical, so
// write(read(write(m))) reproduces the same bytes.

#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "trajkit/model.hpp"
#include "trajkit/surround.hpp"

namespace trajkit {

struct RecordingFileSet {
  std::filesystem::path recording_meta_path;
  std::filesystem::path tracks_meta_path;
  std::filesystem::path tracks_path;
  std::optional<std::filesystem::path> background_image_path;

  /// Conventional names inside `dir`, e.g. 01_tracks.csv for recording 1.
  static RecordingFileSet in_directory(const std::filesystem::path& dir, int recording_id);
};

/// Two-digit zero-padded id prefix used in file names.
std::string recording_prefix(int recording_id);

/// All recording ids that have a *_recordingMeta.csv in dir, ascending.
std::vector<int> discover_recordings(const std::filesystem::path& dir);

enum class IssueKind {
  MissingFile,
  MissingColumn,
  TypeMismatch,
  DanglingReference,
  NonMonotoneFrames,
  InvariantViolation,
  DuplicateId,
};

std::string_view to_string(IssueKind k) noexcept;

struct Issue {
  IssueKind kind = IssueKind::InvariantViolation;
  std::string file;
  std::size_t row = 0;  // 1-based line number, header is line 1; 0 = whole file
  std::string column;
  std::string message;

  std::string describe() const;
};

struct ValidationReport {
  std::vector<Issue> issues;
  bool ok() const noexcept { return issues.empty(); }
};

class DatasetError : public std::runtime_error {
 public:
  explicit DatasetError(Issue issue);
  const Issue& issue() const noexcept { return issue_; }

 private:
  Issue issue_;
};

struct Recording {
  RecordingMeta meta;
  std::vector<Track> tracks;
  // surround[i] is parallel to tracks[i].states.
  std::vector<std::vector<SurroundFrame>> surround;
  std::optional<std::filesystem::path> background_image_path;
};

/// Parses and fully validates a file set; throws DatasetError carrying the
/// first problem found.
Recording read_recording(const RecordingFileSet& paths);

/// Lists every problem read_recording would stumble on; empty iff it succeeds.
ValidationReport validate(const RecordingFileSet& paths);

/// Parses and validates a lone recordingMeta table.
RecordingMeta read_recording_meta(const std::filesystem::path& path);

/// Canonical text of each table.
std::string format_recording_meta(const RecordingMeta& meta);
std::string format_tracks_meta(std::span<const Track> tracks);
std::string format_tracks(std::span<const Track> tracks, std::span<const std::vector<SurroundFrame>> surround);

/// Writes the three tables into `dir` under the conventional names. An empty
/// surround span writes "no neighbors" for every frame.
RecordingFileSet write_recording(const std::filesystem::path& dir, const RecordingMeta& meta,
                                 std::span<const Track> tracks,
                                 std::span<const std::vector<SurroundFrame>> surround,
                                 std::optional<std::filesystem::path> background_image = std::nullopt);

}  // namespace trajkit
