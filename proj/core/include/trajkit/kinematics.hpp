#pragma once

// Kalman filtering and Rauch-Tung-Striebel smoothing of track positions under
// a constant-acceleration model. x and y evolve as two independent chains with
// state (position, velocity, acceleration); the joint 6-vector is ordered
// (x, vx, ax, y, vy, ay).

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "trajkit/model.hpp"
#include "trajkit/track_builder.hpp"

namespace trajkit {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

struct SmootherConfig {
  double dt = 0.04;                      // s
  double measurement_sigma = 0.10;       // m
  double jerk_sigma = 2.0;               // m/s^3, white-jerk intensity
  double initial_velocity_sigma = 1e4;   // m/s, effectively diffuse
  double initial_accel_sigma = 1e3;      // m/s^2

  static SmootherConfig for_frame_rate(double hz);
  void validate() const;
};

/// Transition matrix [[1, dt, dt^2/2], [0, 1, dt], [0, 0, 1]].
Eigen::Matrix3d transition(double dt);
/// Continuous white-jerk process noise integrated over dt.
Eigen::Matrix3d process_noise(double dt, double jerk_sigma);

struct AxisSeries {
  std::vector<Eigen::Vector3d> mean;
  std::vector<Eigen::Matrix3d> cov;
};

struct FilteredSeries {
  int first_frame = 0;
  std::vector<bool> predicted;
  AxisSeries x, y;              // posterior after each frame's update
  AxisSeries x_prior, y_prior;  // one-step predictions (frame 0 holds the initial state)

  std::size_t size() const noexcept { return predicted.size(); }
};

struct SmoothedSeries {
  int first_frame = 0;
  AxisSeries x, y;
  bool used_pseudo_inverse = false;

  std::size_t size() const noexcept { return x.mean.size(); }
  Vector6d state(std::size_t i) const;
  Matrix6d covariance(std::size_t i) const;
};

/// Predict/update pass. Observations must be on consecutive frames; predicted
/// (coasted) ones only propagate. Throws NumericalFailure naming the frame if
/// a covariance stops being positive semi-definite.
FilteredSeries forward_filter(std::span<const Observation> observations, const SmootherConfig& cfg);

/// Backward RTS pass over a filtered series. A singular prediction covariance
/// falls back to a pseudo-inverse and sets used_pseudo_inverse.
SmoothedSeries rts_smooth(const FilteredSeries& filtered, const SmootherConfig& cfg);

struct SmoothingDiagnostics {
  double residual_rms = 0;         // smoothed vs measured positions, m
  double min_eigenvalue = 0;       // over all smoothed covariances
  bool used_pseudo_inverse = false;
};

/// Smooths a confirmed raw track into a Track with lane ids recomputed from the
/// smoothed lateral position.
Track smooth_track(const RawTrack& raw, const RecordingMeta& meta, const SmootherConfig& cfg,
                   SmoothingDiagnostics* diagnostics = nullptr);

}  // namespace trajkit
