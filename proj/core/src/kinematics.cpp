#include "trajkit/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace trajkit {

namespace {

constexpr double kPsdTolerance = 1e-9;

double min_eigenvalue(const Eigen::Matrix3d& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Eigen::Matrix3d symmetrized(const Eigen::Matrix3d& m) { return 0.5 * (m + m.transpose()); }

struct AxisPass {
  AxisSeries post;
  AxisSeries prior;
};

AxisPass filter_axis(std::span<const Observation> obs, double Observation::*coord, const SmootherConfig& cfg) {
  const Eigen::Matrix3d F = transition(cfg.dt);
  const Eigen::Matrix3d Q = process_noise(cfg.dt, cfg.jerk_sigma);
  const double r = cfg.measurement_sigma * cfg.measurement_sigma;
  const Eigen::RowVector3d H(1.0, 0.0, 0.0);

  AxisPass pass;
  const std::size_t n = obs.size();
  pass.post.mean.reserve(n);
  pass.post.cov.reserve(n);
  pass.prior.mean.reserve(n);
  pass.prior.cov.reserve(n);

  Eigen::Vector3d x(obs[0].*coord, 0.0, 0.0);
  Eigen::Matrix3d P = Eigen::Vector3d(r, cfg.initial_velocity_sigma * cfg.initial_velocity_sigma,
                                      cfg.initial_accel_sigma * cfg.initial_accel_sigma)
                          .asDiagonal();
  pass.prior.mean.push_back(x);
  pass.prior.cov.push_back(P);
  pass.post.mean.push_back(x);
  pass.post.cov.push_back(P);

  for (std::size_t k = 1; k < n; ++k) {
    x = F * x;
    P = symmetrized(F * P * F.transpose() + Q);
    pass.prior.mean.push_back(x);
    pass.prior.cov.push_back(P);
    if (!obs[k].predicted) {
      const double S = P(0, 0) + r;
      const Eigen::Vector3d K = P.col(0) / S;
      x += K * (obs[k].*coord - x(0));
      // Joseph form keeps P symmetric positive semi-definite under rounding.
      const Eigen::Matrix3d IKH = Eigen::Matrix3d::Identity() - K * H;
      P = symmetrized(IKH * P * IKH.transpose() + r * K * K.transpose());
    }
    if (!x.allFinite() || min_eigenvalue(P) < -kPsdTolerance * std::max(1.0, P.diagonal().maxCoeff())) {
      throw NumericalFailure("forward_filter: covariance lost positive semi-definiteness at frame " +
                             std::to_string(obs[k].frame));
    }
    pass.post.mean.push_back(x);
    pass.post.cov.push_back(P);
  }
  return pass;
}

// Returns false when the gain needed a pseudo-inverse.
bool smoother_gain(const Eigen::Matrix3d& P, const Eigen::Matrix3d& F, const Eigen::Matrix3d& P_pred,
                   Eigen::Matrix3d& C) {
  // C = P F^T P_pred^{-1}  <=>  P_pred C^T = F P  (P_pred symmetric)
  Eigen::LDLT<Eigen::Matrix3d> ldlt(P_pred);
  const double scale = std::max(P_pred.diagonal().cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  const auto d = ldlt.vectorD();
  const bool regular = ldlt.info() == Eigen::Success && ldlt.isPositive() &&
                       d.cwiseAbs().minCoeff() > 1e-14 * scale;
  if (regular) {
    C = ldlt.solve(F * P).transpose();
    return true;
  }
  C = P * F.transpose() * P_pred.completeOrthogonalDecomposition().pseudoInverse();
  return false;
}

AxisSeries smooth_axis(const AxisSeries& post, const AxisSeries& prior, const SmootherConfig& cfg, int first_frame,
                       bool& used_pinv) {
  const Eigen::Matrix3d F = transition(cfg.dt);
  const std::size_t n = post.mean.size();
  AxisSeries out;
  out.mean.resize(n);
  out.cov.resize(n);
  out.mean[n - 1] = post.mean[n - 1];
  out.cov[n - 1] = post.cov[n - 1];
  for (std::size_t k = n - 1; k-- > 0;) {
    Eigen::Matrix3d C;
    if (!smoother_gain(post.cov[k], F, prior.cov[k + 1], C)) used_pinv = true;
    out.mean[k] = post.mean[k] + C * (out.mean[k + 1] - prior.mean[k + 1]);
    out.cov[k] = symmetrized(post.cov[k] + C * (out.cov[k + 1] - prior.cov[k + 1]) * C.transpose());
    if (!out.mean[k].allFinite() || !out.cov[k].allFinite()) {
      throw NumericalFailure("rts_smooth: non-finite state at frame " +
                             std::to_string(first_frame + static_cast<int>(k)));
    }
  }
  return out;
}

}  // namespace

SmootherConfig SmootherConfig::for_frame_rate(double hz) {
  SmootherConfig c;
  c.dt = 1.0 / hz;
  return c;
}

void SmootherConfig::validate() const {
  if (!(dt > 0) || !(measurement_sigma > 0) || !(jerk_sigma > 0) || !(initial_velocity_sigma > 0) ||
      !(initial_accel_sigma > 0)) {
    throw ContractViolation("SmootherConfig: all parameters must be positive");
  }
}

Eigen::Matrix3d transition(double dt) {
  Eigen::Matrix3d F;
  F << 1.0, dt, 0.5 * dt * dt,
       0.0, 1.0, dt,
       0.0, 0.0, 1.0;
  return F;
}

Eigen::Matrix3d process_noise(double dt, double jerk_sigma) {
  const double q = jerk_sigma * jerk_sigma;
  const double dt2 = dt * dt, dt3 = dt2 * dt, dt4 = dt3 * dt, dt5 = dt4 * dt;
  Eigen::Matrix3d Q;
  Q << dt5 / 20.0, dt4 / 8.0, dt3 / 6.0,
       dt4 / 8.0,  dt3 / 3.0, dt2 / 2.0,
       dt3 / 6.0,  dt2 / 2.0, dt;
  return q * Q;
}

Vector6d SmoothedSeries::state(std::size_t i) const {
  Vector6d s;
  s << x.mean[i], y.mean[i];
  return s;
}

Matrix6d SmoothedSeries::covariance(std::size_t i) const {
  Matrix6d c = Matrix6d::Zero();
  c.topLeftCorner<3, 3>() = x.cov[i];
  c.bottomRightCorner<3, 3>() = y.cov[i];
  return c;
}

FilteredSeries forward_filter(std::span<const Observation> observations, const SmootherConfig& cfg) {
  cfg.validate();
  if (observations.empty()) throw ContractViolation("forward_filter: no observations");
  for (std::size_t k = 1; k < observations.size(); ++k) {
    if (observations[k].frame != observations[k - 1].frame + 1) {
      throw ContractViolation("forward_filter: observations not on consecutive frames at frame " +
                              std::to_string(observations[k].frame));
    }
  }
  FilteredSeries out;
  out.first_frame = observations.front().frame;
  out.predicted.reserve(observations.size());
  for (const auto& o : observations) out.predicted.push_back(o.predicted);
  auto xs = filter_axis(observations, &Observation::x, cfg);
  auto ys = filter_axis(observations, &Observation::y, cfg);
  out.x = std::move(xs.post);
  out.x_prior = std::move(xs.prior);
  out.y = std::move(ys.post);
  out.y_prior = std::move(ys.prior);
  return out;
}

SmoothedSeries rts_smooth(const FilteredSeries& filtered, const SmootherConfig& cfg) {
  if (filtered.size() == 0) throw ContractViolation("rts_smooth: empty series");
  SmoothedSeries out;
  out.first_frame = filtered.first_frame;
  out.x = smooth_axis(filtered.x, filtered.x_prior, cfg, filtered.first_frame, out.used_pseudo_inverse);
  out.y = smooth_axis(filtered.y, filtered.y_prior, cfg, filtered.first_frame, out.used_pseudo_inverse);
  return out;
}

Track smooth_track(const RawTrack& raw, const RecordingMeta& meta, const SmootherConfig& cfg,
                   SmoothingDiagnostics* diagnostics) {
  if (raw.observations.empty()) throw ContractViolation("smooth_track: empty track");
  const auto filtered = forward_filter(raw.observations, cfg);
  const auto smoothed = rts_smooth(filtered, cfg);

  Track t;
  t.track_id = raw.track_id;
  t.vehicle_class = raw.vehicle_class();
  t.length = raw.median_length();
  t.width = raw.median_width();

  const auto& first = raw.observations.front();
  if (auto cw = carriageway_of(first.y, meta)) {
    t.direction = *cw;
  } else {
    t.direction = raw.observations.back().x >= first.x ? DrivingDirection::Lower : DrivingDirection::Upper;
  }

  t.states.reserve(smoothed.size());
  double sq = 0;
  int measured = 0;
  for (std::size_t i = 0; i < smoothed.size(); ++i) {
    const auto& sx = smoothed.x.mean[i];
    const auto& sy = smoothed.y.mean[i];
    KinematicState s;
    s.frame = smoothed.first_frame + static_cast<int>(i);
    s.x = sx(0);
    s.vx = sx(1);
    s.ax = sx(2);
    s.y = sy(0);
    s.vy = sy(1);
    s.ay = sy(2);
    s.lane_id = lane_id_of(s.y, meta, t.direction).value_or(0);
    t.states.push_back(s);
    if (!raw.observations[i].predicted) {
      sq += std::pow(s.x - raw.observations[i].x, 2) + std::pow(s.y - raw.observations[i].y, 2);
      ++measured;
    }
  }
  t.mean_speed = compute_mean_speed(t.states);

  if (diagnostics) {
    diagnostics->residual_rms = measured ? std::sqrt(sq / measured) : 0.0;
    diagnostics->used_pseudo_inverse = smoothed.used_pseudo_inverse;
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < smoothed.size(); ++i) {
      lo = std::min({lo, min_eigenvalue(smoothed.x.cov[i]), min_eigenvalue(smoothed.y.cov[i])});
    }
    diagnostics->min_eigenvalue = lo;
  }
  return t;
}

}  // namespace trajkit
