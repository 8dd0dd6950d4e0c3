#include "trajkit/lane_change_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include <Eigen/Dense>
#include <json.hpp>

#include "trajkit/csv.hpp"

namespace trajkit {

std::string_view to_string(LateralSide s) noexcept { return s == LateralSide::ToRight ? "toRight" : "toLeft"; }
std::string_view to_string(CutInSide s) noexcept { return s == CutInSide::FromRight ? "fromRight" : "fromLeft"; }

bool LaneChangeParams::valid() const noexcept {
  return duration > 0 && d_start > 0 && d_end > 0 && v_start > 0 && v_end > 0;
}

double quintic_shape(double s) noexcept {
  const double s3 = s * s * s;
  return s3 * (kQuinticShape[0] + s * (kQuinticShape[1] + s * kQuinticShape[2]));
}

ModelSample evaluate_model(const LaneChangeParams& p, double t) {
  if (!(p.duration > 0)) throw ContractViolation("evaluate_model: duration must be positive");
  if (!(t >= 0.0 && t <= p.duration)) throw ContractViolation("evaluate_model: t outside [0, T]");
  const double T = p.duration;
  const double s = t / T;
  const double span = p.lateral_sign() * (p.d_start + p.d_end);
  const double accel = (p.v_end - p.v_start) / T;

  ModelSample m;
  m.x = p.v_start * t + 0.5 * accel * t * t;
  m.vx = p.v_start + accel * t;
  m.ax = accel;
  // d/ds of the shape: 30 s^2 - 60 s^3 + 30 s^4 ; second: 60 s - 180 s^2 + 120 s^3
  const double s2 = s * s;
  m.y = -p.lateral_sign() * p.d_start + span * quintic_shape(s);
  m.vy = span * (30.0 * s2 * (1.0 - s) * (1.0 - s)) / T;
  m.ay = span * (60.0 * s * (1.0 - s) * (1.0 - 2.0 * s)) / (T * T);
  return m;
}

namespace {

struct InnerSolution {
  double a = 0, b = 0;             // signed lateral offsets at start / end relative to the marking
  double x0 = 0, vs = 0, ve = 0;
  double lateral_sse = 0;
  double longitudinal_sse = 0;
};

// Longitudinal basis: x = x0 + vs * g1 + ve * g2.
inline void longitudinal_basis(double tau, double T, double& g1, double& g2) {
  if (tau < 0) {
    g1 = tau;
    g2 = 0;
  } else if (tau <= T) {
    const double q = tau * tau / (2.0 * T);
    g1 = tau - q;
    g2 = q;
  } else {
    g1 = 0.5 * T;
    g2 = tau - 0.5 * T;
  }
}

inline double lateral_shape(double tau, double T) { return quintic_shape(std::clamp(tau / T, 0.0, 1.0)); }

std::optional<InnerSolution> solve_inner(std::span<const TimedSample> samples, double marking, double t0, double T) {
  if (!(T > 0)) return std::nullopt;
  const double x_ref = samples.front().x;
  double uu = 0, uw = 0, ww = 0, uz = 0, wz = 0;
  Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
  Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
  for (const auto& s : samples) {
    const double tau = s.t - t0;
    const double S = lateral_shape(tau, T);
    const double u = S - 1.0;
    const double z = s.y - marking;
    uu += u * u;
    uw += u * S;
    ww += S * S;
    uz += u * z;
    wz += S * z;
    double g1, g2;
    longitudinal_basis(tau, T, g1, g2);
    const Eigen::Vector3d g(1.0, g1, g2);
    A.noalias() += g * g.transpose();
    rhs += g * (s.x - x_ref);
  }
  const double det = uu * ww - uw * uw;
  if (!(det > 1e-12 * uu * ww) || uu == 0 || ww == 0) return std::nullopt;
  Eigen::LDLT<Eigen::Matrix3d> ldlt(A);
  const auto d = ldlt.vectorD();
  if (ldlt.info() != Eigen::Success || !(d.minCoeff() > 1e-12 * A.diagonal().maxCoeff())) return std::nullopt;
  const Eigen::Vector3d lon = ldlt.solve(rhs);

  InnerSolution sol;
  sol.a = (ww * uz - uw * wz) / det;
  sol.b = (uu * wz - uw * uz) / det;
  sol.x0 = lon(0) + x_ref;
  sol.vs = lon(1);
  sol.ve = lon(2);
  for (const auto& s : samples) {
    const double tau = s.t - t0;
    const double S = lateral_shape(tau, T);
    const double ry = (s.y - marking) - (sol.a * (S - 1.0) + sol.b * S);
    double g1, g2;
    longitudinal_basis(tau, T, g1, g2);
    const double rx = (s.x - x_ref) - (lon(0) + sol.vs * g1 + sol.ve * g2);
    sol.lateral_sse += ry * ry;
    sol.longitudinal_sse += rx * rx;
  }
  return sol;
}

double objective(const InnerSolution& s, double w) { return s.lateral_sse + w * s.longitudinal_sse; }

template <typename F>
double golden_section(F&& f, double lo, double hi, double tol) {
  constexpr double inv_phi = 0.6180339887498949;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c), fd = f(d);
  while (hi - lo > tol) {
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return fc <= fd ? c : d;
}

}  // namespace

std::optional<double> profile_cost(std::span<const TimedSample> samples, double marking_y, double t0, double duration,
                                   double longitudinal_weight) {
  auto sol = solve_inner(samples, marking_y, t0, duration);
  if (!sol) return std::nullopt;
  return objective(*sol, longitudinal_weight);
}

LaneChangeFitResult fit_lane_change(std::span<const TimedSample> samples, double marking_y, const FitConfig& cfg) {
  if (samples.size() < cfg.min_samples) {
    throw InsufficientData("fit_lane_change: " + std::to_string(samples.size()) + " samples, need " +
                           std::to_string(cfg.min_samples));
  }
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i].t > samples[i - 1].t)) throw ContractViolation("fit_lane_change: samples not ordered in time");
  }
  const double w = cfg.longitudinal_weight;
  const double frame_step = samples[1].t - samples[0].t;
  const double inf = std::numeric_limits<double>::infinity();
  auto cost = [&](double t0, double T) {
    auto sol = solve_inner(samples, marking_y, t0, T);
    return sol ? objective(*sol, w) : inf;
  };

  // Coarse grid: t0 over the sample window, T over [min, max] duration.
  double best_t0 = samples.front().t, best_T = cfg.min_duration, best = inf;
  const auto t0_steps = static_cast<long>(std::floor((samples.back().t - samples.front().t) / frame_step + 1e-9));
  const auto T_steps = static_cast<long>(std::floor((cfg.max_duration - cfg.min_duration) / cfg.duration_step + 1e-9));
  for (long i = 0; i <= t0_steps; ++i) {
    const double t0 = samples.front().t + static_cast<double>(i) * frame_step;
    for (long j = 0; j <= T_steps; ++j) {
      const double T = cfg.min_duration + static_cast<double>(j) * cfg.duration_step;
      const double c = cost(t0, T);
      if (c < best) {
        best = c;
        best_t0 = t0;
        best_T = T;
      }
    }
  }
  if (!std::isfinite(best)) throw DegenerateEpisode("fit_lane_change: no (t0, T) gives a solvable fit");

  LaneChangeFitResult res;
  res.cost_history.push_back(best);
  double h_t0 = frame_step, h_T = cfg.duration_step;
  const double T_floor = 0.5 * cfg.min_duration;
  const double inner_tol = 0.1 * cfg.time_tolerance;
  while (res.iterations < cfg.max_iterations) {
    ++res.iterations;
    const double t0_prev = best_t0, T_prev = best_T;

    const double t0_new = golden_section([&](double t0) { return cost(t0, best_T); }, best_t0 - h_t0,
                                         best_t0 + h_t0, inner_tol);
    if (const double c = cost(t0_new, best_T); c <= best) {
      best = c;
      best_t0 = t0_new;
    }
    const double T_new = golden_section([&](double T) { return cost(best_t0, T); },
                                        std::max(T_floor, best_T - h_T), best_T + h_T, inner_tol);
    if (const double c = cost(best_t0, T_new); c <= best) {
      best = c;
      best_T = T_new;
    }
    res.cost_history.push_back(best);

    const double dt0 = std::abs(best_t0 - t0_prev);
    const double dT = std::abs(best_T - T_prev);
    if (std::max(dt0, dT) < cfg.time_tolerance) {
      res.converged = true;
      break;
    }
    // Re-bracket around the new point; a move that hit the bracket edge keeps it wide.
    h_t0 = std::clamp(2.0 * dt0, cfg.time_tolerance, frame_step);
    h_T = std::clamp(2.0 * dT, cfg.time_tolerance, cfg.duration_step);
  }

  const auto sol = solve_inner(samples, marking_y, best_t0, best_T);
  if (!sol) throw DegenerateEpisode("fit_lane_change: singular inner solve at the optimum");
  const double span = sol->a + sol->b;
  if (std::abs(span) < cfg.min_lateral_span) {
    throw DegenerateEpisode("fit_lane_change: lateral displacement " + csv::format_double(std::abs(span)) +
                            " m is below " + csv::format_double(cfg.min_lateral_span) + " m");
  }
  res.params.side = span > 0 ? LateralSide::ToRight : LateralSide::ToLeft;
  const double sgn = res.params.lateral_sign();
  res.params.d_start = sgn * sol->a;
  res.params.d_end = sgn * sol->b;
  res.params.v_start = sol->vs;
  res.params.v_end = sol->ve;
  res.params.duration = best_T;
  res.t0 = best_t0;
  res.x0 = sol->x0;
  res.cost = best;
  const double n = static_cast<double>(samples.size());
  res.lateral_rmse = std::sqrt(sol->lateral_sse / n);
  res.longitudinal_rmse = std::sqrt(sol->longitudinal_sse / n);
  if (!res.params.valid()) res.converged = false;
  return res;
}

LaneChangeFitResult fit_episode(const Track& track, const ManeuverEpisode& episode, const RecordingMeta& meta,
                                const FitConfig& cfg) {
  if (episode.kind != ManeuverKind::LaneChange) throw ContractViolation("fit_episode: not a lane change");
  const auto& markings = meta.markings(track.direction);
  const int lower_lane = std::min(episode.from_lane, episode.to_lane);
  if (lower_lane < 1 || static_cast<std::size_t>(lower_lane) >= markings.size()) {
    throw ContractViolation("fit_episode: lanes outside the carriageway");
  }
  const double sign = travel_sign(track.direction);
  const double marking = sign * markings[static_cast<std::size_t>(lower_lane)];
  const int pad = static_cast<int>(std::lround(cfg.window_padding * meta.frame_rate));
  const int lo = std::max(track.first_frame(), episode.start_frame - pad);
  const int hi = std::min(track.last_frame(), episode.end_frame + pad);
  std::vector<TimedSample> samples;
  samples.reserve(static_cast<std::size_t>(std::max(0, hi - lo + 1)));
  for (int f = lo; f <= hi; ++f) {
    const auto& s = track.at(f);
    samples.push_back({f / meta.frame_rate, sign * s.x, sign * s.y});
  }
  return fit_lane_change(samples, marking, cfg);
}

std::vector<CutInScenario> extract_cut_ins(std::span<const ManeuverEpisode> episodes, std::span<const Track> tracks,
                                           std::span<const std::vector<SurroundFrame>> surround,
                                           const RecordingMeta& /*meta*/) {
  std::unordered_map<int, std::size_t> index;
  for (std::size_t i = 0; i < tracks.size(); ++i) index.emplace(tracks[i].track_id, i);

  std::vector<CutInScenario> out;
  for (const auto& ep : episodes) {
    if (ep.kind != ManeuverKind::LaneChange) continue;
    const auto li = index.at(ep.track_id);
    const auto& changer = tracks[li];
    const int c = ep.crossing_frame;
    const auto& sf = surround[li][static_cast<std::size_t>(c - changer.first_frame())];
    if (sf.following == 0) continue;
    const auto& tail = tracks[index.at(sf.following)];
    const DrivingDirection dir = changer.direction;
    const double sign = travel_sign(dir);

    CutInScenario sc;
    sc.lane_changer_id = changer.track_id;
    sc.tailing_id = tail.track_id;
    sc.preceding_id = sf.preceding;
    sc.crossing_frame = c;
    const auto& tail_at = tail.at(c);
    sc.tail_speed_at_entry = sign * tail_at.vx;
    const double entry_gap = gap_size(tail_at, tail.length, changer.at(c), changer.length, dir);
    // A zero gap has no meaningful headway.
    if (entry_gap > 0 && std::abs(sc.tail_speed_at_entry) > kMinThwSpeed) {
      sc.entry_thw = entry_gap / std::abs(sc.tail_speed_at_entry);
    }
    if (sf.preceding != 0) {
      const auto& lead = tracks[index.at(sf.preceding)];
      sc.gap_size = gap_size(tail_at, tail.length, lead.at(c), lead.length, dir);
    }
    sc.side = ep.from_lane == ep.to_lane + left_lane_step(dir) ? CutInSide::FromLeft : CutInSide::FromRight;

    auto keep_min = [](std::optional<double>& slot, const std::optional<double>& v) {
      if (v && (!slot || *v < *slot)) slot = v;
    };
    for (int f = ep.start_frame; f <= ep.end_frame; ++f) {
      if (!tail.alive_at(f) || !changer.alive_at(f)) continue;
      const auto& ts = tail.at(f);
      const auto& cs = changer.at(f);
      if (!ahead_of(cs, ts, dir)) continue;
      const Headway h = headway_metrics(ts, tail.length, cs, changer.length, dir);
      keep_min(sc.min_dhw, h.dhw);
      keep_min(sc.min_thw, h.thw);
      keep_min(sc.min_ttc, h.ttc);
    }
    out.push_back(sc);
  }
  return out;
}

namespace {

std::string opt_cell(const std::optional<double>& v) { return v ? csv::format_double(*v) : std::string("-1"); }

nlohmann::ordered_json opt_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(std::stod(csv::format_double(*v))) : nlohmann::ordered_json(nullptr);
}

double canon(double v) { return std::stod(csv::format_double(v)); }

}  // namespace

std::string format_fits_csv(int recording_id, std::span<const EpisodeFit> fits) {
  std::string out =
      "recordingId,trackId,crossingFrame,status,t0,duration,dStart,dEnd,vStart,vEnd,side,lateralRmse,"
      "longitudinalRmse,converged,iterations\n";
  for (const auto& f : fits) {
    std::vector<std::string> cells = {std::to_string(recording_id), std::to_string(f.track_id),
                                      std::to_string(f.crossing_frame), f.status};
    if (f.fit) {
      const auto& r = *f.fit;
      for (double v : {r.t0, r.params.duration, r.params.d_start, r.params.d_end, r.params.v_start, r.params.v_end}) {
        cells.push_back(csv::format_double(v));
      }
      cells.emplace_back(to_string(r.params.side));
      cells.push_back(csv::format_double(r.lateral_rmse));
      cells.push_back(csv::format_double(r.longitudinal_rmse));
      cells.emplace_back(r.converged ? "1" : "0");
      cells.push_back(std::to_string(r.iterations));
    } else {
      cells.resize(15);
    }
    csv::append_row(out, cells);
  }
  return out;
}

std::string format_fits_json(int recording_id, std::span<const EpisodeFit> fits) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& f : fits) {
    nlohmann::ordered_json j;
    j["recordingId"] = recording_id;
    j["trackId"] = f.track_id;
    j["crossingFrame"] = f.crossing_frame;
    j["status"] = f.status;
    if (f.fit) {
      const auto& r = *f.fit;
      j["t0"] = canon(r.t0);
      j["duration"] = canon(r.params.duration);
      j["dStart"] = canon(r.params.d_start);
      j["dEnd"] = canon(r.params.d_end);
      j["vStart"] = canon(r.params.v_start);
      j["vEnd"] = canon(r.params.v_end);
      j["side"] = std::string(to_string(r.params.side));
      j["lateralRmse"] = canon(r.lateral_rmse);
      j["longitudinalRmse"] = canon(r.longitudinal_rmse);
      j["converged"] = r.converged;
      j["iterations"] = r.iterations;
    }
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::string format_cut_ins_csv(int recording_id, std::span<const CutInScenario> scenarios) {
  std::string out =
      "recordingId,laneChangerId,tailingId,precedingId,crossingFrame,entryThw,tailSpeed,minDhw,minThw,minTtc,"
      "gapSize,side\n";
  for (const auto& s : scenarios) {
    const std::string cells[] = {std::to_string(recording_id),        std::to_string(s.lane_changer_id),
                                 std::to_string(s.tailing_id),        std::to_string(s.preceding_id),
                                 std::to_string(s.crossing_frame),    opt_cell(s.entry_thw),
                                 csv::format_double(s.tail_speed_at_entry), opt_cell(s.min_dhw),
                                 opt_cell(s.min_thw),                 opt_cell(s.min_ttc),
                                 opt_cell(s.gap_size),                std::string(to_string(s.side))};
    csv::append_row(out, cells);
  }
  return out;
}

std::string format_cut_ins_json(int recording_id, std::span<const CutInScenario> scenarios) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& s : scenarios) {
    nlohmann::ordered_json j;
    j["recordingId"] = recording_id;
    j["laneChangerId"] = s.lane_changer_id;
    j["tailingId"] = s.tailing_id;
    j["precedingId"] = s.preceding_id;
    j["crossingFrame"] = s.crossing_frame;
    j["entryThw"] = opt_json(s.entry_thw);
    j["tailSpeed"] = canon(s.tail_speed_at_entry);
    j["minDhw"] = opt_json(s.min_dhw);
    j["minThw"] = opt_json(s.min_thw);
    j["minTtc"] = opt_json(s.min_ttc);
    j["gapSize"] = opt_json(s.gap_size);
    j["side"] = std::string(to_string(s.side));
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

}  // namespace trajkit
