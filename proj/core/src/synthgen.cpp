#include "trajkit/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <unordered_map>

#include <json.hpp>

#include "trajkit/csv.hpp"
#include "trajkit/surround.hpp"

namespace trajkit {

ScriptError::ScriptError(std::string location, const std::string& message)
    : std::runtime_error(location + ": " + message), location_(std::move(location)) {}

namespace {

// Distance, speed and acceleration along the travel direction since entry.
class SpeedProfile {
 public:
  SpeedProfile(double v0, const std::vector<SpeedSegment>& segments) {
    double tau = 0, s = 0, v = v0;
    for (const auto& seg : segments) {
      pieces_.push_back({tau, s, v, seg.acceleration});
      s += v * seg.duration + 0.5 * seg.acceleration * seg.duration * seg.duration;
      v += seg.acceleration * seg.duration;
      tau += seg.duration;
    }
    pieces_.push_back({tau, s, v, 0.0});
  }

  struct Sample {
    double s, v, a;
  };

  Sample at(double tau) const {
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), tau,
                               [](double t, const Piece& p) { return t < p.tau; });
    const Piece& p = it == pieces_.begin() ? pieces_.front() : *std::prev(it);
    const double d = tau - p.tau;
    return {p.s + p.v * d + 0.5 * p.a * d * d, p.v + p.a * d, p.a};
  }

  /// True if a segment boundary lies strictly inside (lo, hi).
  bool has_breakpoint_in(double lo, double hi) const {
    for (std::size_t i = 1; i < pieces_.size(); ++i) {
      if (pieces_[i].tau > lo + 1e-9 && pieces_[i].tau < hi - 1e-9) return true;
    }
    return false;
  }

  double min_speed() const {
    double m = pieces_.front().v;
    for (const auto& p : pieces_) m = std::min(m, p.v);
    return m;
  }

 private:
  struct Piece {
    double tau, s, v, a;
  };
  std::vector<Piece> pieces_;
};

std::string vehicle_loc(std::size_t i) { return "/vehicles/" + std::to_string(i); }

double lane_center(const RecordingMeta& meta, DrivingDirection dir, int lane) {
  const auto& m = meta.markings(dir);
  return 0.5 * (m[static_cast<std::size_t>(lane - 1)] + m[static_cast<std::size_t>(lane)]);
}

struct PlannedChange {
  ScriptedLaneChange lc;
  int from_lane;
  double y_start, y_end, marking;
  std::size_t script_index;
};

struct Built {
  Track track;
  std::vector<PlannedChange> changes;
};

Built build_vehicle(const ScenarioScript& script, std::size_t vi,
                    const std::vector<std::pair<std::size_t, ScriptedLaneChange>>& changes) {
  const auto& meta = script.meta;
  const auto& v = script.vehicles[vi];
  const std::string loc = vehicle_loc(vi);
  if (v.id < 1) throw ScriptError(loc + "/id", "vehicle ids start at 1");
  if (v.lane < 1 || v.lane > meta.lane_count(v.direction)) throw ScriptError(loc + "/lane", "lane outside carriageway");
  if (!(v.length > 0) || !(v.width > 0)) throw ScriptError(loc + "/length", "extents must be positive");
  if (!(v.initial_speed > 0)) throw ScriptError(loc + "/speed", "speed must be positive");
  for (const auto& seg : v.profile) {
    if (!(seg.duration > 0)) throw ScriptError(loc + "/profile", "segment durations must be positive");
  }
  const SpeedProfile profile(v.initial_speed, v.profile);
  if (!(profile.min_speed() > 0)) throw ScriptError(loc + "/profile", "speed profile reaches zero");

  const auto& marks = meta.markings(v.direction);
  const double half_lane_min = [&] {
    double m = INFINITY;
    for (std::size_t i = 1; i < marks.size(); ++i) m = std::min(m, 0.5 * (marks[i] - marks[i - 1]));
    return m;
  }();
  if (std::abs(v.lateral_offset) >= half_lane_min) throw ScriptError(loc + "/lateralOffset", "offset leaves the lane");

  Built b;
  int lane = v.lane;
  double y = lane_center(meta, v.direction, lane) + v.lateral_offset;
  double last_end = -INFINITY;
  for (const auto& [li, lc] : changes) {
    const std::string lloc = "/laneChanges/" + std::to_string(li);
    if (!(lc.duration > 0)) throw ScriptError(lloc + "/duration", "duration must be positive");
    if (lc.start_time < last_end) throw ScriptError(lloc + "/startTime", "overlaps the previous lane change");
    if (lc.start_time < v.entry_time) throw ScriptError(lloc + "/startTime", "starts before the vehicle enters");
    if (std::abs(lc.to_lane - lane) != 1 || lc.to_lane < 1 || lc.to_lane > meta.lane_count(v.direction)) {
      throw ScriptError(lloc + "/toLane", "target lane must be adjacent to lane " + std::to_string(lane));
    }
    if (std::abs(lc.end_offset) >= half_lane_min) throw ScriptError(lloc + "/endOffset", "offset leaves the lane");
    const double tau0 = lc.start_time - v.entry_time;
    if (profile.has_breakpoint_in(tau0, tau0 + lc.duration)) {
      throw ScriptError(lloc, "speed profile must keep one acceleration during the lane change");
    }
    PlannedChange pc;
    pc.lc = lc;
    pc.from_lane = lane;
    pc.y_start = y;
    pc.y_end = lane_center(meta, v.direction, lc.to_lane) + lc.end_offset;
    pc.marking = marks[static_cast<std::size_t>(std::min(lane, lc.to_lane))];
    pc.script_index = li;
    b.changes.push_back(pc);
    lane = lc.to_lane;
    y = pc.y_end;
    last_end = lc.start_time + lc.duration;
  }

  auto& t = b.track;
  t.track_id = v.id;
  t.vehicle_class = v.vehicle_class;
  t.direction = v.direction;
  t.length = v.length;
  t.width = v.width;
  const double sign = travel_sign(v.direction);
  const double x_entry = v.entry_x.value_or(v.direction == DrivingDirection::Lower ? 0.0 : script.road_length);
  const int first = static_cast<int>(std::ceil(v.entry_time * meta.frame_rate - 1e-9));
  const int last = meta.frame_count() - 1;
  for (int f = std::max(first, 0); f <= last; ++f) {
    const double time = f / meta.frame_rate;
    const auto lon = profile.at(time - v.entry_time);
    KinematicState s;
    s.frame = f;
    s.x = x_entry + sign * lon.s;
    if (s.x < 0.0 || s.x > script.road_length) {
      if (t.states.empty()) continue;
      break;
    }
    s.vx = sign * lon.v;
    s.ax = sign * lon.a;
    s.y = v.lateral_offset + lane_center(meta, v.direction, v.lane);
    for (const auto& pc : b.changes) {
      const double tau = time - pc.lc.start_time;
      if (tau < 0) break;
      const double T = pc.lc.duration;
      const double span = pc.y_end - pc.y_start;
      if (tau >= T) {
        s.y = pc.y_end;
        continue;
      }
      const double u = tau / T;
      s.y = pc.y_start + span * quintic_shape(u);
      s.vy = span * 30.0 * u * u * (1 - u) * (1 - u) / T;
      s.ay = span * 60.0 * u * (1 - u) * (1 - 2 * u) / (T * T);
      break;
    }
    s.lane_id = lane_id_of(s.y, meta, v.direction).value_or(0);
    t.states.push_back(s);
  }
  t.mean_speed = compute_mean_speed(t.states);
  return b;
}

void check_overlaps(const std::vector<Track>& tracks, int max_frame) {
  std::vector<std::vector<std::size_t>> alive(static_cast<std::size_t>(max_frame + 1));
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    for (const auto& s : tracks[i].states) alive[static_cast<std::size_t>(s.frame)].push_back(i);
  }
  for (int f = 0; f <= max_frame; ++f) {
    auto ids = alive[static_cast<std::size_t>(f)];
    std::sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) { return tracks[a].at(f).x < tracks[b].at(f).x; });
    double max_len = 0;
    for (auto i : ids) max_len = std::max(max_len, tracks[i].length);
    for (std::size_t p = 0; p < ids.size(); ++p) {
      const auto& a = tracks[ids[p]];
      const auto& sa = a.at(f);
      for (std::size_t q = p + 1; q < ids.size(); ++q) {
        const auto& b = tracks[ids[q]];
        const auto& sb = b.at(f);
        const double dx = sb.x - sa.x;
        if (dx >= 0.5 * (a.length + max_len)) break;
        if (a.direction != b.direction) continue;
        if (dx < 0.5 * (a.length + b.length) && std::abs(sb.y - sa.y) < 0.5 * (a.width + b.width)) {
          throw ScriptError("/vehicles", "vehicles " + std::to_string(a.track_id) + " and " +
                                             std::to_string(b.track_id) + " overlap at frame " + std::to_string(f));
        }
      }
    }
  }
}

std::optional<TruthLaneChange> truth_episode(const Track& t, const PlannedChange& pc, const ManeuverConfig& cfg,
                                             const SpeedProfile& profile, double entry_time, double frame_rate) {
  const auto& st = t.states;
  const std::size_t n = st.size();
  const double t_end = pc.lc.start_time + pc.lc.duration;
  std::size_t c = n;
  for (std::size_t k = 1; k < n; ++k) {
    const double time = st[k].frame / frame_rate;
    if (time < pc.lc.start_time || time > t_end) continue;
    if (st[k - 1].lane_id == pc.from_lane && st[k].lane_id == pc.lc.to_lane) {
      c = k;
      break;
    }
  }
  if (c == n) return std::nullopt;

  const auto dwell = static_cast<std::size_t>(cfg.lane_change_min_dwell);
  std::size_t to_run = 0;
  while (c + to_run < n && st[c + to_run].lane_id == pc.lc.to_lane) ++to_run;
  std::size_t from_run = 0;
  while (from_run < c && st[c - 1 - from_run].lane_id == pc.from_lane) ++from_run;
  if (to_run < dwell) return std::nullopt;
  if (from_run < c && from_run < dwell) return std::nullopt;

  TruthLaneChange out;
  auto& e = out.episode;
  e.track_id = t.track_id;
  e.kind = ManeuverKind::LaneChange;
  e.from_lane = pc.from_lane;
  e.to_lane = pc.lc.to_lane;
  e.crossing_frame = st[c].frame;
  std::size_t start = 0, end = n - 1;
  bool start_in = false, end_in = false;
  for (std::size_t k = c + 1; k-- > 0;) {
    if (std::abs(st[k].vy) < cfg.lateral_settle_speed) {
      start = k;
      start_in = k > 0;
      break;
    }
  }
  for (std::size_t k = c; k < n; ++k) {
    if (std::abs(st[k].vy) < cfg.lateral_settle_speed) {
      end = k;
      end_in = k + 1 < n;
      break;
    }
  }
  e.start_frame = st[start].frame;
  e.end_frame = st[end].frame;
  e.complete = start_in && end_in;

  const double sign = travel_sign(t.direction);
  auto& p = out.params;
  p.d_start = std::abs(pc.y_start - pc.marking);
  p.d_end = std::abs(pc.y_end - pc.marking);
  p.duration = pc.lc.duration;
  p.v_start = profile.at(pc.lc.start_time - entry_time).v;
  p.v_end = profile.at(t_end - entry_time).v;
  p.side = sign * (pc.y_end - pc.y_start) > 0 ? LateralSide::ToRight : LateralSide::ToLeft;
  out.t0 = pc.lc.start_time;
  return out;
}

std::optional<CutInScenario> truth_cut_in(const TruthLaneChange& lc, const std::vector<Track>& tracks,
                                          const std::unordered_map<int, std::size_t>& index) {
  const auto& e = lc.episode;
  const auto& changer = tracks[index.at(e.track_id)];
  const int c = e.crossing_frame;
  const DrivingDirection dir = changer.direction;
  const double sign = travel_sign(dir);
  const auto& cs = changer.at(c);

  int tail = 0, lead = 0;
  double tail_d = 0, lead_d = 0;
  for (const auto& o : tracks) {
    if (o.track_id == changer.track_id || o.direction != dir || !o.alive_at(c)) continue;
    const auto& os = o.at(c);
    if (os.lane_id != e.to_lane) continue;
    const double ds = sign * (os.x - cs.x);
    const double d = std::abs(ds);
    if (ds < 0 && (tail == 0 || d < tail_d || (d == tail_d && o.track_id < tail))) {
      tail = o.track_id;
      tail_d = d;
    } else if (ds > 0 && (lead == 0 || d < lead_d || (d == lead_d && o.track_id < lead))) {
      lead = o.track_id;
      lead_d = d;
    }
  }
  if (tail == 0) return std::nullopt;

  const auto& tt = tracks[index.at(tail)];
  CutInScenario sc;
  sc.lane_changer_id = changer.track_id;
  sc.tailing_id = tail;
  sc.preceding_id = lead;
  sc.crossing_frame = c;
  sc.tail_speed_at_entry = sign * tt.at(c).vx;
  const double gap = std::max(0.0, tail_d - 0.5 * (tt.length + changer.length));
  if (gap > 0 && std::abs(sc.tail_speed_at_entry) > kMinThwSpeed) sc.entry_thw = gap / std::abs(sc.tail_speed_at_entry);
  if (lead != 0) {
    const auto& lt = tracks[index.at(lead)];
    sc.gap_size = std::max(0.0, std::abs(lt.at(c).x - tt.at(c).x) - 0.5 * (lt.length + tt.length));
  }
  sc.side = e.from_lane == e.to_lane + left_lane_step(dir) ? CutInSide::FromLeft : CutInSide::FromRight;
  for (int f = e.start_frame; f <= e.end_frame; ++f) {
    if (!tt.alive_at(f) || !changer.alive_at(f)) continue;
    const auto& ts = tt.at(f);
    const auto& ls = changer.at(f);
    const double ds = sign * (ls.x - ts.x);
    if (ds <= 0) continue;
    const double dhw = std::max(0.0, ds - 0.5 * (tt.length + changer.length));
    const double v_tail = sign * ts.vx;
    const double closing = v_tail - sign * ls.vx;
    if (!sc.min_dhw || dhw < *sc.min_dhw) sc.min_dhw = dhw;
    if (std::abs(v_tail) > kMinThwSpeed) {
      const double thw = dhw / std::abs(v_tail);
      if (!sc.min_thw || thw < *sc.min_thw) sc.min_thw = thw;
    }
    if (closing > kMinClosingSpeed) {
      const double ttc = dhw / closing;
      if (!sc.min_ttc || ttc < *sc.min_ttc) sc.min_ttc = ttc;
    }
  }
  return sc;
}

}  // namespace

GroundTruth generate_truth(const ScenarioScript& script, const ManeuverConfig& cfg) {
  const auto meta_issues = check_invariants(script.meta);
  if (!meta_issues.empty()) throw ScriptError("/layout", meta_issues.front());
  if (!(script.road_length > 0)) throw ScriptError("/roadLength", "road length must be positive");

  std::unordered_map<int, std::size_t> index;
  for (std::size_t i = 0; i < script.vehicles.size(); ++i) {
    if (!index.emplace(script.vehicles[i].id, i).second) {
      throw ScriptError(vehicle_loc(i) + "/id", "duplicate vehicle id " + std::to_string(script.vehicles[i].id));
    }
  }
  std::vector<std::vector<std::pair<std::size_t, ScriptedLaneChange>>> per_vehicle(script.vehicles.size());
  for (std::size_t i = 0; i < script.lane_changes.size(); ++i) {
    const auto& lc = script.lane_changes[i];
    auto it = index.find(lc.vehicle_id);
    if (it == index.end()) throw ScriptError("/laneChanges/" + std::to_string(i) + "/vehicle", "unknown vehicle");
    per_vehicle[it->second].emplace_back(i, lc);
  }
  for (auto& v : per_vehicle) {
    std::stable_sort(v.begin(), v.end(),
                     [](const auto& a, const auto& b) { return a.second.start_time < b.second.start_time; });
  }

  GroundTruth gt;
  gt.meta = script.meta;
  std::vector<Built> built;
  built.reserve(script.vehicles.size());
  for (std::size_t i = 0; i < script.vehicles.size(); ++i) built.push_back(build_vehicle(script, i, per_vehicle[i]));
  for (auto& b : built) {
    if (!b.track.states.empty()) gt.tracks.push_back(b.track);
  }
  check_overlaps(gt.tracks, script.meta.frame_count() - 1);

  std::unordered_map<int, std::size_t> track_index;
  for (std::size_t i = 0; i < gt.tracks.size(); ++i) track_index.emplace(gt.tracks[i].track_id, i);
  for (std::size_t i = 0; i < built.size(); ++i) {
    if (built[i].track.states.empty()) continue;
    const auto& v = script.vehicles[i];
    const SpeedProfile profile(v.initial_speed, v.profile);
    for (const auto& pc : built[i].changes) {
      if (auto lc = truth_episode(built[i].track, pc, cfg, profile, v.entry_time, script.meta.frame_rate)) {
        gt.lane_changes.push_back(*lc);
      }
    }
  }
  std::stable_sort(gt.lane_changes.begin(), gt.lane_changes.end(), [](const auto& a, const auto& b) {
    return std::make_pair(a.episode.track_id, a.episode.crossing_frame) <
           std::make_pair(b.episode.track_id, b.episode.crossing_frame);
  });
  for (const auto& lc : gt.lane_changes) {
    if (auto sc = truth_cut_in(lc, gt.tracks, track_index)) gt.cut_ins.push_back(*sc);
  }
  return gt;
}

std::vector<std::vector<Detection>> corrupt(std::span<const Track> truth, const RecordingMeta& meta,
                                            const NoiseSpec& noise, std::uint64_t seed, double road_length) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, noise.position_sigma > 0 ? noise.position_sigma : 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int frames = meta.frame_count();
  std::vector<std::vector<Detection>> out(static_cast<std::size_t>(frames));

  std::map<int, std::vector<std::pair<int, int>>> scripted;
  for (const auto& b : noise.bursts) scripted[b.vehicle_id].emplace_back(b.start_frame, b.start_frame + b.length);

  std::vector<int> burst_left(truth.size(), 0);
  for (int f = 0; f < frames; ++f) {
    auto& dets = out[static_cast<std::size_t>(f)];
    for (std::size_t i = 0; i < truth.size(); ++i) {
      const auto& t = truth[i];
      if (!t.alive_at(f)) continue;
      bool drop = false;
      if (burst_left[i] > 0) {
        --burst_left[i];
        drop = true;
      } else if (noise.dropout_probability > 0 && unit(rng) < noise.dropout_probability) {
        burst_left[i] = std::max(noise.dropout_burst_length, 1) - 1;
        drop = true;
      }
      if (auto it = scripted.find(t.track_id); it != scripted.end()) {
        for (const auto& [lo, hi] : it->second) drop = drop || (f >= lo && f < hi);
      }
      if (drop) continue;
      const auto& s = t.at(f);
      Detection d;
      d.frame = f;
      d.cx = s.x;
      d.cy = s.y;
      if (noise.position_sigma > 0) {
        d.cx += gauss(rng);
        d.cy += gauss(rng);
      }
      d.length = t.length;
      d.width = t.width;
      d.class_hint = t.vehicle_class;
      dets.push_back(d);
    }
    if (noise.false_positive_rate > 0) {
      std::poisson_distribution<int> count(noise.false_positive_rate);
      const int n = count(rng);
      for (int k = 0; k < n; ++k) {
        const auto& m = unit(rng) < 0.5 ? meta.upper_lane_markings : meta.lower_lane_markings;
        Detection d;
        d.frame = f;
        d.cx = unit(rng) * road_length;
        d.cy = m.front() + unit(rng) * (m.back() - m.front());
        d.length = 4.5;
        d.width = 1.8;
        d.class_hint = VehicleClass::Car;
        dets.push_back(d);
      }
    }
  }
  return out;
}

namespace {

using nlohmann::json;

template <typename T>
T get(const json& j, const char* key, const std::string& loc) {
  if (!j.contains(key)) throw ScriptError(loc + "/" + key, "missing required key");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ScriptError(loc + "/" + key, std::string("wrong type: ") + e.what());
  }
}

template <typename T>
T get_or(const json& j, const char* key, const std::string& loc, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return get<T>(j, key, loc);
}

}  // namespace

ScenarioScript parse_script(const std::string& json_text, const std::string& source) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ScriptError(source + ":byte " + std::to_string(e.byte), "invalid JSON");
  }
  if (!root.is_object()) throw ScriptError(source, "top level must be an object");
  const std::string base = source + ":";
  ScenarioScript s;
  s.seed = get_or<std::uint64_t>(root, "seed", base, 1);
  auto& m = s.meta;
  m.recording_id = get_or<int>(root, "recordingId", base, 1);
  m.location_id = get_or<int>(root, "locationId", base, 1);
  m.frame_rate = get<double>(root, "frameRate", base);
  m.duration = get<double>(root, "duration", base);
  m.upper_lane_markings = get<std::vector<double>>(root, "upperLaneMarkings", base);
  m.lower_lane_markings = get<std::vector<double>>(root, "lowerLaneMarkings", base);
  s.road_length = get_or<double>(root, "roadLength", base, 420.0);
  if (root.contains("speedLimits")) {
    for (double v : get<std::vector<double>>(root, "speedLimits", base)) {
      m.speed_limits.push_back(v == -1.0 ? std::nullopt : std::optional<double>(v));
    }
  } else {
    m.speed_limits.assign(static_cast<std::size_t>(m.lane_count(DrivingDirection::Upper) +
                                                   m.lane_count(DrivingDirection::Lower)),
                          std::nullopt);
  }
  if (auto issues = check_invariants(m); !issues.empty()) throw ScriptError(base + "/layout", issues.front());

  const json vehicles = root.value("vehicles", json::array());
  if (!vehicles.is_array()) throw ScriptError(base + "/vehicles", "must be an array");
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    const auto& jv = vehicles[i];
    const std::string loc = base + vehicle_loc(i);
    VehicleSpec v;
    v.id = get<int>(jv, "id", loc);
    const auto cls = parse_vehicle_class(get_or<std::string>(jv, "class", loc, "Car"));
    if (!cls) throw ScriptError(loc + "/class", "expected Car or Truck");
    v.vehicle_class = *cls;
    const auto dir = get<std::string>(jv, "direction", loc);
    if (dir == "upper") {
      v.direction = DrivingDirection::Upper;
    } else if (dir == "lower") {
      v.direction = DrivingDirection::Lower;
    } else {
      throw ScriptError(loc + "/direction", "expected \"upper\" or \"lower\"");
    }
    v.lane = get<int>(jv, "lane", loc);
    if (v.lane < 1 || v.lane > m.lane_count(v.direction)) throw ScriptError(loc + "/lane", "lane outside carriageway");
    v.entry_time = get_or<double>(jv, "entryTime", loc, 0.0);
    if (jv.contains("entryX") && !jv.at("entryX").is_null()) v.entry_x = get<double>(jv, "entryX", loc);
    v.length = get_or<double>(jv, "length", loc, v.vehicle_class == VehicleClass::Truck ? 16.0 : 4.5);
    v.width = get_or<double>(jv, "width", loc, v.vehicle_class == VehicleClass::Truck ? 2.5 : 1.8);
    v.initial_speed = get<double>(jv, "speed", loc);
    v.lateral_offset = get_or<double>(jv, "lateralOffset", loc, 0.0);
    const json profile = jv.value("profile", json::array());
    for (std::size_t k = 0; k < profile.size(); ++k) {
      const std::string ploc = loc + "/profile/" + std::to_string(k);
      v.profile.push_back({get<double>(profile[k], "duration", ploc), get<double>(profile[k], "acceleration", ploc)});
    }
    s.vehicles.push_back(std::move(v));
  }

  const json changes = root.value("laneChanges", json::array());
  for (std::size_t i = 0; i < changes.size(); ++i) {
    const std::string loc = base + "/laneChanges/" + std::to_string(i);
    ScriptedLaneChange lc;
    lc.vehicle_id = get<int>(changes[i], "vehicle", loc);
    lc.start_time = get<double>(changes[i], "startTime", loc);
    lc.duration = get<double>(changes[i], "duration", loc);
    lc.to_lane = get<int>(changes[i], "toLane", loc);
    lc.end_offset = get_or<double>(changes[i], "endOffset", loc, 0.0);
    s.lane_changes.push_back(lc);
  }

  if (root.contains("noise")) {
    const auto& jn = root.at("noise");
    const std::string loc = base + "/noise";
    auto& n = s.noise;
    n.position_sigma = get_or<double>(jn, "positionSigma", loc, 0.0);
    n.dropout_probability = get_or<double>(jn, "dropoutProbability", loc, 0.0);
    n.dropout_burst_length = get_or<int>(jn, "dropoutBurstLength", loc, 1);
    n.false_positive_rate = get_or<double>(jn, "falsePositiveRate", loc, 0.0);
    if (n.position_sigma < 0 || n.dropout_probability < 0 || n.dropout_probability > 1 || n.false_positive_rate < 0 ||
        n.dropout_burst_length < 1) {
      throw ScriptError(loc, "noise parameters out of range");
    }
    const json bursts = jn.value("bursts", json::array());
    for (std::size_t k = 0; k < bursts.size(); ++k) {
      const std::string bloc = loc + "/bursts/" + std::to_string(k);
      n.bursts.push_back({get<int>(bursts[k], "vehicle", bloc), get<int>(bursts[k], "startFrame", bloc),
                          get<int>(bursts[k], "length", bloc)});
    }
  }
  return s;
}

ScenarioScript load_script(const std::filesystem::path& path) {
  std::string text;
  try {
    text = csv::read_file(path);
  } catch (const std::exception& e) {
    throw ScriptError(path.string(), e.what());
  }
  return parse_script(text, path.string());
}

std::vector<CutInScenario> sample_cut_in_population(std::size_t n, double intercept, double slope, double noise_sigma,
                                                    double speed_lo, double speed_hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> speed(speed_lo, speed_hi);
  std::normal_distribution<double> noise(0.0, noise_sigma > 0 ? noise_sigma : 1.0);
  std::vector<CutInScenario> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    CutInScenario sc;
    sc.lane_changer_id = static_cast<int>(2 * i + 1);
    sc.tailing_id = static_cast<int>(2 * i + 2);
    sc.tail_speed_at_entry = speed(rng);
    double thw = intercept + slope * sc.tail_speed_at_entry;
    if (noise_sigma > 0) thw += noise(rng);
    sc.entry_thw = std::max(thw, 0.05);
    out.push_back(sc);
  }
  return out;
}

}  // namespace trajkit
