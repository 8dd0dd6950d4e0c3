#include "trajkit/maneuvers.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "trajkit/csv.hpp"

namespace trajkit {

void ManeuverConfig::validate() const {
  if (!(following_thw_max > 0) || !(following_hysteresis > 0) || !(critical_ttc_max > 0) ||
      !(critical_thw_max > 0) || lane_change_min_dwell < 1 || !(lateral_settle_speed > 0)) {
    throw ContractViolation("ManeuverConfig: all thresholds must be positive");
  }
  if (!(following_hysteresis < following_thw_max)) {
    throw ContractViolation("ManeuverConfig: hysteresis must be below following_thw_max");
  }
}

std::string_view to_string(ManeuverKind k) noexcept {
  switch (k) {
    case ManeuverKind::FreeDriving: return "FreeDriving";
    case ManeuverKind::VehicleFollowing: return "VehicleFollowing";
    case ManeuverKind::Critical: return "Critical";
    case ManeuverKind::LaneChange: return "LaneChange";
  }
  return "Unknown";
}

namespace {

void require_aligned(const Track& track, std::span<const SurroundFrame> surround) {
  if (surround.size() != track.states.size()) {
    throw ContractViolation("maneuvers: surround frames not aligned with track " + std::to_string(track.track_id));
  }
  for (std::size_t i = 0; i < surround.size(); ++i) {
    if (surround[i].frame != track.states[i].frame) {
      throw ContractViolation("maneuvers: surround frame mismatch on track " + std::to_string(track.track_id));
    }
  }
}

// Maximal runs of `flag` become episodes of `kind`.
template <typename Pred>
std::vector<ManeuverEpisode> runs_of(const Track& track, ManeuverKind kind, Pred flag) {
  std::vector<ManeuverEpisode> out;
  const std::size_t n = track.states.size();
  std::size_t i = 0;
  while (i < n) {
    if (!flag(i)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && flag(j + 1)) ++j;
    ManeuverEpisode e;
    e.track_id = track.track_id;
    e.kind = kind;
    e.start_frame = track.states[i].frame;
    e.end_frame = track.states[j].frame;
    out.push_back(e);
    i = j + 1;
  }
  return out;
}

}  // namespace

std::vector<LongitudinalLabel> label_longitudinal(const Track& track, std::span<const SurroundFrame> surround,
                                                  const ManeuverConfig& cfg) {
  require_aligned(track, surround);
  std::vector<LongitudinalLabel> labels;
  labels.reserve(surround.size());
  auto state = LongitudinalLabel::FreeDriving;
  for (const auto& sf : surround) {
    if (sf.preceding == 0 || !sf.thw) {
      state = LongitudinalLabel::FreeDriving;
    } else if (state == LongitudinalLabel::FreeDriving) {
      if (*sf.thw < cfg.following_thw_max) state = LongitudinalLabel::VehicleFollowing;
    } else if (*sf.thw > cfg.following_thw_max + cfg.following_hysteresis) {
      state = LongitudinalLabel::FreeDriving;
    }
    labels.push_back(state);
  }
  return labels;
}

std::vector<ManeuverEpisode> longitudinal_episodes(const Track& track, std::span<const LongitudinalLabel> labels) {
  auto free = runs_of(track, ManeuverKind::FreeDriving,
                      [&](std::size_t i) { return labels[i] == LongitudinalLabel::FreeDriving; });
  auto following = runs_of(track, ManeuverKind::VehicleFollowing,
                           [&](std::size_t i) { return labels[i] == LongitudinalLabel::VehicleFollowing; });
  free.insert(free.end(), following.begin(), following.end());
  return free;
}

std::vector<ManeuverEpisode> detect_critical(const Track& track, std::span<const SurroundFrame> surround,
                                             const ManeuverConfig& cfg) {
  require_aligned(track, surround);
  return runs_of(track, ManeuverKind::Critical, [&](std::size_t i) {
    const auto& sf = surround[i];
    const bool low_ttc = sf.ttc && *sf.ttc > 0 && *sf.ttc < cfg.critical_ttc_max;
    const bool low_thw = sf.thw && *sf.thw > 0 && *sf.thw < cfg.critical_thw_max;
    return low_ttc || low_thw;
  });
}

std::vector<ManeuverEpisode> detect_lane_changes(const Track& track, const ManeuverConfig& cfg) {
  const auto& st = track.states;
  const std::size_t n = st.size();
  struct Run {
    int lane;
    std::size_t start;
    std::size_t len;
  };
  std::vector<Run> runs;
  for (std::size_t i = 0; i < n; ++i) {
    if (runs.empty() || runs.back().lane != st[i].lane_id) {
      runs.push_back({st[i].lane_id, i, 1});
    } else {
      ++runs.back().len;
    }
  }

  struct Pending {
    ManeuverEpisode ep;
    std::size_t crossing, start, end;
    bool start_inside, end_inside;
  };
  std::vector<Pending> found;
  const auto dwell = static_cast<std::size_t>(cfg.lane_change_min_dwell);
  auto settled = [&](std::size_t k) { return std::abs(st[k].vy) < cfg.lateral_settle_speed; };

  for (std::size_t r = 1; r < runs.size(); ++r) {
    const auto& from = runs[r - 1];
    const auto& to = runs[r];
    if (from.lane == 0 || to.lane == 0) continue;
    if (to.len < dwell) continue;
    if (r - 1 != 0 && from.len < dwell) continue;

    Pending p;
    p.crossing = to.start;
    p.start = 0;
    p.start_inside = false;
    for (std::size_t k = p.crossing + 1; k-- > 0;) {
      if (settled(k)) {
        p.start = k;
        p.start_inside = k > 0;
        break;
      }
    }
    p.end = n - 1;
    p.end_inside = false;
    for (std::size_t k = p.crossing; k < n; ++k) {
      if (settled(k)) {
        p.end = k;
        p.end_inside = k + 1 < n;
        break;
      }
    }
    p.ep.track_id = track.track_id;
    p.ep.kind = ManeuverKind::LaneChange;
    p.ep.from_lane = from.lane;
    p.ep.to_lane = to.lane;
    p.ep.crossing_frame = st[p.crossing].frame;
    found.push_back(p);
  }

  for (std::size_t i = 1; i < found.size(); ++i) {
    auto& a = found[i - 1];
    auto& b = found[i];
    if (a.end < b.start) continue;
    std::size_t m = a.crossing;
    for (std::size_t k = a.crossing; k < b.crossing; ++k) {
      if (std::abs(st[k].vy) < std::abs(st[m].vy)) m = k;
    }
    a.end = m;
    a.end_inside = true;
    b.start = m + 1;
    b.start_inside = true;
  }

  std::vector<ManeuverEpisode> out;
  out.reserve(found.size());
  for (auto& p : found) {
    p.ep.start_frame = st[p.start].frame;
    p.ep.end_frame = st[p.end].frame;
    p.ep.complete = p.start_inside && p.end_inside;
    out.push_back(p.ep);
  }
  return out;
}

std::vector<ManeuverEpisode> detect_maneuvers(const Track& track, std::span<const SurroundFrame> surround,
                                              const ManeuverConfig& cfg) {
  const auto labels = label_longitudinal(track, surround, cfg);
  auto out = longitudinal_episodes(track, labels);
  auto critical = detect_critical(track, surround, cfg);
  auto lane_changes = detect_lane_changes(track, cfg);
  out.insert(out.end(), critical.begin(), critical.end());
  out.insert(out.end(), lane_changes.begin(), lane_changes.end());
  std::stable_sort(out.begin(), out.end(), [](const ManeuverEpisode& a, const ManeuverEpisode& b) {
    return std::make_pair(static_cast<int>(a.kind), a.start_frame) <
           std::make_pair(static_cast<int>(b.kind), b.start_frame);
  });
  return out;
}

std::string format_episodes_csv(int recording_id, std::span<const ManeuverEpisode> episodes) {
  std::string out = "recordingId,trackId,kind,startFrame,endFrame,fromLane,toLane,crossingFrame,complete\n";
  for (const auto& e : episodes) {
    const std::string cells[] = {std::to_string(recording_id), std::to_string(e.track_id),
                                 std::string(to_string(e.kind)), std::to_string(e.start_frame),
                                 std::to_string(e.end_frame),    std::to_string(e.from_lane),
                                 std::to_string(e.to_lane),      std::to_string(e.crossing_frame),
                                 e.complete ? "1" : "0"};
    csv::append_row(out, cells);
  }
  return out;
}

std::string format_episodes_json(int recording_id, std::span<const ManeuverEpisode> episodes) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& e : episodes) {
    nlohmann::ordered_json j;
    j["recordingId"] = recording_id;
    j["trackId"] = e.track_id;
    j["kind"] = std::string(to_string(e.kind));
    j["startFrame"] = e.start_frame;
    j["endFrame"] = e.end_frame;
    j["fromLane"] = e.from_lane;
    j["toLane"] = e.to_lane;
    j["crossingFrame"] = e.crossing_frame;
    j["complete"] = e.complete;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

}  // namespace trajkit
