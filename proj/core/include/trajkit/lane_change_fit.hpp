#pragma once

// Symmetric lane-change trajectory model: quadratic longitudinal motion and a
// quintic lateral profile with zero lateral speed and acceleration at both
// ends. Five parameters remain: lateral distance to the crossed marking at the
// start and the end, longitudinal speed at the start and the end, and the
// duration.
//
// Everything here works in a travel-aligned frame: the vehicle moves toward
// +x, so its left is -y. Callers convert upper-carriageway tracks by negating
// both x and y (see fit_episode).

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "trajkit/maneuvers.hpp"
#include "trajkit/model.hpp"
#include "trajkit/surround.hpp"

namespace trajkit {

enum class LateralSide { ToLeft, ToRight };

std::string_view to_string(LateralSide s) noexcept;

struct LaneChangeParams {
  double d_start = 0;   // m, distance from the marking at t = 0
  double d_end = 0;     // m, distance beyond the marking at t = T
  double v_start = 0;   // m/s
  double v_end = 0;     // m/s
  double duration = 0;  // s
  LateralSide side = LateralSide::ToLeft;

  /// +1 when the lateral motion is toward +y.
  double lateral_sign() const noexcept { return side == LateralSide::ToRight ? 1.0 : -1.0; }
  bool valid() const noexcept;
};

/// Shape polynomial 10 s^3 - 15 s^4 + 6 s^5 and its coefficients.
inline constexpr std::array<double, 3> kQuinticShape = {10.0, -15.0, 6.0};
double quintic_shape(double s) noexcept;

struct ModelSample {
  double x = 0;  // relative to the start position
  double y = 0;  // relative to the crossed marking
  double vx = 0, vy = 0;
  double ax = 0, ay = 0;
};

/// Model state at time t in [0, T]; throws ContractViolation otherwise.
ModelSample evaluate_model(const LaneChangeParams& p, double t);

struct TimedSample {
  double t = 0;
  double x = 0;
  double y = 0;
};

struct FitConfig {
  double longitudinal_weight = 0.1;
  double min_duration = 1.0;   // s, coarse grid lower bound
  double max_duration = 15.0;  // s
  double duration_step = 0.5;  // s
  double time_tolerance = 1e-7;
  int max_iterations = 200;
  std::size_t min_samples = 10;
  double min_lateral_span = 0.1;  // m, below this the episode is degenerate
  double window_padding = 1.0;    // s of track kept on each side of an episode
};

struct LaneChangeFitResult {
  LaneChangeParams params;
  double t0 = 0;  // absolute start time, s
  double x0 = 0;  // longitudinal position at t0 (nuisance offset)
  double lateral_rmse = 0;
  double longitudinal_rmse = 0;
  double cost = 0;
  bool converged = false;
  int iterations = 0;
  std::vector<double> cost_history;  // objective after the grid and after each refinement sweep
};

class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateEpisode : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Least-squares fit of (t0, T, d_start, d_end, v_start, v_end) to samples
/// ordered by time. Minimizes sum (y - y_model)^2 + w * sum (x - x_model)^2.
/// Outside [t0, t0 + T] the model holds its lateral end positions and
/// continues longitudinally at constant speed.
LaneChangeFitResult fit_lane_change(std::span<const TimedSample> samples, double marking_y, const FitConfig& cfg);

/// Objective for fixed (t0, T) with the linear parameters solved in closed
/// form; nullopt when the inner systems are singular.
std::optional<double> profile_cost(std::span<const TimedSample> samples, double marking_y, double t0, double duration,
                                   double longitudinal_weight);

/// Fits one detected lane-change episode of a track.
LaneChangeFitResult fit_episode(const Track& track, const ManeuverEpisode& episode, const RecordingMeta& meta,
                                const FitConfig& cfg);

enum class CutInSide { FromLeft, FromRight };

std::string_view to_string(CutInSide s) noexcept;

struct CutInScenario {
  int lane_changer_id = 0;
  int tailing_id = 0;
  int preceding_id = 0;  // new-lane preceding vehicle, 0 if none
  int crossing_frame = 0;
  std::optional<double> entry_thw;  // s
  double tail_speed_at_entry = 0;   // m/s along travel direction
  std::optional<double> min_dhw;
  std::optional<double> min_thw;
  std::optional<double> min_ttc;
  std::optional<double> gap_size;   // m, at the crossing
  CutInSide side = CutInSide::FromRight;

  friend bool operator==(const CutInScenario&, const CutInScenario&) = default;
};

/// One scenario per lane change that has a tailing vehicle on its new lane at
/// the crossing frame. Headway minima are taken from the tailing vehicle
/// toward the lane changer over the episode frames where it is ahead.
std::vector<CutInScenario> extract_cut_ins(std::span<const ManeuverEpisode> episodes, std::span<const Track> tracks,
                                           std::span<const std::vector<SurroundFrame>> surround,
                                           const RecordingMeta& meta);

struct EpisodeFit {
  int track_id = 0;
  int crossing_frame = 0;
  std::optional<LaneChangeFitResult> fit;
  std::string status = "ok";  // or the failure class name
};

std::string format_fits_csv(int recording_id, std::span<const EpisodeFit> fits);
std::string format_fits_json(int recording_id, std::span<const EpisodeFit> fits);
std::string format_cut_ins_csv(int recording_id, std::span<const CutInScenario> scenarios);
std::string format_cut_ins_json(int recording_id, std::span<const CutInScenario> scenarios);

}  // namespace trajkit
