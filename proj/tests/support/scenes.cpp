#include "scenes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "trajkit/surround.hpp"

namespace scenes {

namespace fs = std::filesystem;

RecordingMeta highway_meta(int recording_id, double duration, double frame_rate) {
  RecordingMeta m;
  m.recording_id = recording_id;
  m.location_id = 1;
  m.frame_rate = frame_rate;
  m.duration = duration;
  m.upper_lane_markings = {8.0, 11.75, 15.5};
  m.lower_lane_markings = {20.0, 23.75, 27.5, 31.25};
  m.speed_limits = {std::nullopt, std::nullopt, 33.3, 33.3, 33.3};
  return m;
}

ScenarioScript empty_script(int recording_id, double duration, std::uint64_t seed) {
  ScenarioScript s;
  s.seed = seed;
  s.meta = highway_meta(recording_id, duration);
  return s;
}

VehicleSpec vehicle(int id, DrivingDirection dir, int lane, double speed, double entry_time) {
  VehicleSpec v;
  v.id = id;
  v.direction = dir;
  v.lane = lane;
  v.initial_speed = speed;
  v.entry_time = entry_time;
  return v;
}

ScenarioScript random_script(int recording_id, int vehicles, double duration, double lane_change_prob,
                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto chance = [&](double p) { return uni(0.0, 1.0) < p; };

  ScenarioScript script = empty_script(recording_id, duration, seed);
  int next_id = 1;
  for (int attempt = 0; attempt < vehicles * 6 && next_id <= vehicles; ++attempt) {
    VehicleSpec v;
    v.id = next_id;
    v.direction = chance(0.5) ? DrivingDirection::Upper : DrivingDirection::Lower;
    const int lanes = script.meta.lane_count(v.direction);
    v.lane = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(lanes));
    v.entry_time = std::round(uni(0.0, std::max(0.0, duration - 15.0)) * 25.0) / 25.0;
    v.initial_speed = uni(22.0, 36.0);
    if (chance(0.2)) {
      v.vehicle_class = VehicleClass::Truck;
      v.length = uni(12.0, 18.0);
      v.width = 2.5;
      v.initial_speed = uni(20.0, 26.0);
    } else {
      v.length = uni(4.0, 5.2);
      v.width = uni(1.7, 2.0);
    }
    v.lateral_offset = uni(-0.3, 0.3);
    double busy_until = v.entry_time;
    if (chance(0.4)) {
      SpeedSegment seg{uni(1.0, 4.0), uni(-0.8, 0.8)};
      v.profile.push_back(seg);
      busy_until += seg.duration;
    }
    std::vector<ScriptedLaneChange> lcs;
    if (chance(lane_change_prob)) {
      int lane = v.lane;
      const int count = chance(0.25) ? 2 : 1;
      double t = busy_until + uni(0.5, 4.0);
      for (int k = 0; k < count; ++k) {
        ScriptedLaneChange lc;
        lc.vehicle_id = v.id;
        lc.start_time = t;
        lc.duration = uni(3.5, 7.0);
        if (lane == 1) {
          lc.to_lane = 2;
        } else if (lane == lanes) {
          lc.to_lane = lanes - 1;
        } else {
          lc.to_lane = chance(0.5) ? lane - 1 : lane + 1;
        }
        lc.end_offset = uni(-0.3, 0.3);
        lcs.push_back(lc);
        lane = lc.to_lane;
        t += lc.duration + uni(0.0, 2.0);
      }
    }
    script.vehicles.push_back(v);
    script.lane_changes.insert(script.lane_changes.end(), lcs.begin(), lcs.end());
    try {
      (void)generate_truth(script);
      ++next_id;
    } catch (const ScriptError&) {
      script.vehicles.pop_back();
      script.lane_changes.resize(script.lane_changes.size() - lcs.size());
    }
  }
  return script;
}

std::vector<Track> track_and_smooth(std::span<const std::vector<Detection>> frames, const RecordingMeta& meta,
                                    const TrackerConfig& tcfg, const SmootherConfig& scfg) {
  TrackerConfig t = tcfg;
  t.frame_rate = meta.frame_rate;
  SmootherConfig s = scfg;
  s.dt = 1.0 / meta.frame_rate;
  std::vector<Track> out;
  for (const auto& raw : build_tracks(frames, t)) out.push_back(smooth_track(raw, meta, s));
  return out;
}

std::map<int, int> match_tracks(std::span<const Track> truth, std::span<const Track> built, double tolerance) {
  std::map<int, int> out;
  for (const auto& b : built) {
    int best = 0;
    double best_d = tolerance;
    for (const auto& t : truth) {
      if (t.direction != b.direction) continue;
      double sum = 0;
      std::size_t n = 0;
      for (const auto& s : b.states) {
        if (!t.alive_at(s.frame)) continue;
        const auto& ts = t.at(s.frame);
        sum += std::hypot(ts.x - s.x, ts.y - s.y);
        ++n;
      }
      if (n * 10 < b.states.size() * 9) continue;
      const double d = sum / static_cast<double>(n);
      if (d < best_d) {
        best_d = d;
        best = t.track_id;
      }
    }
    out[b.track_id] = best;
  }
  return out;
}

RandomRecording random_recording(std::mt19937_64& rng, int recording_id) {
  auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

  RandomRecording r;
  auto& m = r.meta;
  m.recording_id = recording_id;
  m.location_id = pick(1, 6);
  m.frame_rate = 25.0;
  m.duration = uni(4.0, 20.0);
  double y = uni(0.0, 5.0);
  const int upper = pick(2, 3), lower = pick(2, 3);
  for (int k = 0; k <= upper; ++k) m.upper_lane_markings.push_back(y += (k == 0 ? 0.0 : uni(3.0, 4.0)));
  y += uni(1.0, 4.0);
  for (int k = 0; k <= lower; ++k) m.lower_lane_markings.push_back(y += (k == 0 ? 0.0 : uni(3.0, 4.0)));
  for (int k = 0; k < upper + lower; ++k) {
    m.speed_limits.push_back(pick(0, 2) == 0 ? std::nullopt : std::optional<double>(uni(20.0, 40.0)));
  }

  const int n = pick(0, 8);
  int id = 0;
  for (int i = 0; i < n; ++i) {
    Track t;
    t.track_id = id += pick(1, 5);
    t.vehicle_class = pick(0, 3) == 0 ? VehicleClass::Truck : VehicleClass::Car;
    t.direction = pick(0, 1) == 0 ? DrivingDirection::Upper : DrivingDirection::Lower;
    t.length = uni(3.5, 18.0);
    t.width = uni(1.5, 2.6);
    const auto& mk = m.markings(t.direction);
    const int first = pick(0, m.max_frame());
    const int len = pick(1, std::min(60, m.max_frame() - first + 1));
    double x = uni(0.0, 400.0);
    const double sign = travel_sign(t.direction);
    for (int f = first; f < first + len; ++f) {
      KinematicState s;
      s.frame = f;
      s.x = x;
      x += sign * uni(0.5, 1.5);
      s.y = uni(mk.front(), mk.back() - 1e-3);
      s.vx = sign * uni(10.0, 40.0);
      s.vy = uni(-1.0, 1.0);
      s.ax = uni(-3.0, 3.0);
      s.ay = uni(-1.0, 1.0);
      s.lane_id = lane_id_of(s.y, m, t.direction).value_or(0);
      t.states.push_back(s);
    }
    t.mean_speed = compute_mean_speed(t.states);
    r.tracks.push_back(std::move(t));
  }
  r.surround = compute_surround(r.tracks, m);
  return r;
}

std::vector<VehicleSnapshot> random_frame(std::mt19937_64& rng, int max_vehicles) {
  auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const auto meta = highway_meta();
  const int n = pick(0, max_vehicles);
  std::vector<VehicleSnapshot> out;
  int id = 0;
  for (int i = 0; i < n; ++i) {
    VehicleSnapshot v;
    v.track_id = id += pick(1, 3);
    v.direction = pick(0, 1) == 0 ? DrivingDirection::Upper : DrivingDirection::Lower;
    const double lengths[] = {4.5, 5.0, 16.0};
    v.length = pick(0, 4) == 0 ? lengths[pick(0, 2)] : uni(3.5, 18.0);
    v.width = uni(1.6, 2.5);
    const auto& mk = meta.markings(v.direction);
    const int lane = pick(1, meta.lane_count(v.direction));
    v.state.frame = 7;
    // A coarse grid makes equal distances (tie-breaking) common.
    v.state.x = pick(0, 1) == 0 ? 2.5 * pick(0, 160) : uni(0.0, 400.0);
    v.state.y = 0.5 * (mk[static_cast<std::size_t>(lane - 1)] + mk[static_cast<std::size_t>(lane)]) + uni(-1.0, 1.0);
    v.state.lane_id = lane_id_of(v.state.y, meta, v.direction).value_or(0);
    const double speeds[] = {0.0, 0.05, 20.0};
    v.state.vx = travel_sign(v.direction) * (pick(0, 5) == 0 ? speeds[pick(0, 2)] : uni(0.0, 40.0));
    out.push_back(v);
  }
  return out;
}

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("trajkit_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::map<std::string, std::string> read_tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[fs::relative(e.path(), dir).generic_string()] = ss.str();
  }
  return out;
}

}  // namespace scenes
