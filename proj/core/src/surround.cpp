#include "trajkit/surround.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

namespace trajkit {

double gap_size(const KinematicState& tail, double tail_length, const KinematicState& lead, double lead_length,
                DrivingDirection dir) {
  if (!ahead_of(lead, tail, dir)) {
    throw ContractViolation("gap_size: lead vehicle is not ahead at frame " + std::to_string(tail.frame));
  }
  return std::max(0.0, std::abs(lead.x - tail.x) - 0.5 * (lead_length + tail_length));
}

Headway headway_metrics(const KinematicState& ego, double ego_length, const KinematicState& lead, double lead_length,
                        DrivingDirection dir) {
  Headway h;
  h.dhw = gap_size(ego, ego_length, lead, lead_length, dir);
  const double sign = travel_sign(dir);
  const double v_ego = sign * ego.vx;
  const double v_lead = sign * lead.vx;
  if (std::abs(v_ego) > kMinThwSpeed) h.thw = h.dhw / std::abs(v_ego);
  const double closing = v_ego - v_lead;
  if (closing > kMinClosingSpeed) h.ttc = h.dhw / closing;
  return h;
}

namespace {

struct Candidate {
  double ds = 0;  // signed longitudinal offset along ego travel direction
  int id = 0;
};

// Strictly nearer, or equally near with a lower id.
bool better(const Candidate& c, double dist, int best_id, double best_dist) {
  return best_id == 0 || dist < best_dist || (dist == best_dist && c.id < best_id);
}

struct Slots {
  int preceding = 0;
  int alongside = 0;
  int following = 0;
};

// Adjacent lanes partition their vehicles into preceding / alongside /
// following. The own lane uses only preceding / following.
Slots pick(std::span<const VehicleSnapshot> vehicles, const std::vector<std::size_t>& lane, const VehicleSnapshot& ego,
           bool adjacent) {
  Slots out;
  double pre_d = 0, fol_d = 0, along_d = 0;
  const double sign = travel_sign(ego.direction);
  for (std::size_t j : lane) {
    const auto& other = vehicles[j];
    if (other.track_id == ego.track_id) continue;
    const Candidate c{sign * (other.state.x - ego.state.x), other.track_id};
    const double dist = std::abs(c.ds);
    if (adjacent && dist <= 0.5 * (other.length + ego.length)) {
      if (better(c, dist, out.alongside, along_d)) {
        out.alongside = c.id;
        along_d = dist;
      }
    } else if (c.ds > 0) {
      if (better(c, dist, out.preceding, pre_d)) {
        out.preceding = c.id;
        pre_d = dist;
      }
    } else if (c.ds < 0) {
      if (better(c, dist, out.following, fol_d)) {
        out.following = c.id;
        fol_d = dist;
      }
    }
  }
  return out;
}

}  // namespace

std::vector<SurroundFrame> assign_neighbors(std::span<const VehicleSnapshot> vehicles, const RecordingMeta& meta) {
  std::map<std::pair<DrivingDirection, int>, std::vector<std::size_t>> lanes;
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    const auto& v = vehicles[i];
    if (v.state.lane_id >= 1 && v.state.lane_id <= meta.lane_count(v.direction)) {
      lanes[{v.direction, v.state.lane_id}].push_back(i);
    }
  }
  static const std::vector<std::size_t> kEmpty;
  auto lane_of = [&](DrivingDirection d, int lane) -> const std::vector<std::size_t>& {
    auto it = lanes.find({d, lane});
    return it == lanes.end() ? kEmpty : it->second;
  };

  std::vector<SurroundFrame> out(vehicles.size());
  std::map<int, std::size_t> by_id;
  for (std::size_t i = 0; i < vehicles.size(); ++i) by_id.emplace(vehicles[i].track_id, i);

  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    const auto& ego = vehicles[i];
    auto& sf = out[i];
    sf.frame = ego.state.frame;
    sf.track_id = ego.track_id;
    const int lane = ego.state.lane_id;
    if (lane < 1 || lane > meta.lane_count(ego.direction)) continue;

    const Slots own = pick(vehicles, lane_of(ego.direction, lane), ego, false);
    sf.preceding = own.preceding;
    sf.following = own.following;

    const int step = left_lane_step(ego.direction);
    const Slots left = pick(vehicles, lane_of(ego.direction, lane + step), ego, true);
    const Slots right = pick(vehicles, lane_of(ego.direction, lane - step), ego, true);
    sf.left_preceding = left.preceding;
    sf.left_alongside = left.alongside;
    sf.left_following = left.following;
    sf.right_preceding = right.preceding;
    sf.right_alongside = right.alongside;
    sf.right_following = right.following;

    if (sf.preceding != 0) {
      const auto& lead = vehicles[by_id.at(sf.preceding)];
      const Headway h = headway_metrics(ego.state, ego.length, lead.state, lead.length, ego.direction);
      sf.dhw = h.dhw;
      sf.thw = h.thw;
      sf.ttc = h.ttc;
    }
  }
  return out;
}

std::vector<std::vector<SurroundFrame>> compute_surround(std::span<const Track> tracks, const RecordingMeta& meta) {
  std::vector<std::vector<SurroundFrame>> out(tracks.size());
  if (tracks.empty()) return out;

  int lo = tracks.front().states.empty() ? 0 : tracks.front().first_frame();
  int hi = lo - 1;
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    out[i].resize(tracks[i].states.size());
    if (tracks[i].states.empty()) continue;
    lo = std::min(lo, tracks[i].first_frame());
    hi = std::max(hi, tracks[i].last_frame());
  }
  if (hi < lo) return out;

  // Bucket tracks by frame so each frame sees only its live vehicles.
  std::vector<std::vector<std::size_t>> alive(static_cast<std::size_t>(hi - lo + 1));
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    for (const auto& s : tracks[i].states) alive[static_cast<std::size_t>(s.frame - lo)].push_back(i);
  }

  std::vector<VehicleSnapshot> snap;
  for (int f = lo; f <= hi; ++f) {
    const auto& ids = alive[static_cast<std::size_t>(f - lo)];
    if (ids.empty()) continue;
    snap.clear();
    for (std::size_t i : ids) {
      const auto& t = tracks[i];
      snap.push_back({t.track_id, t.direction, t.length, t.width, t.at(f)});
    }
    const auto frames = assign_neighbors(snap, meta);
    for (std::size_t k = 0; k < ids.size(); ++k) {
      const auto& t = tracks[ids[k]];
      out[ids[k]][static_cast<std::size_t>(f - t.first_frame())] = frames[k];
    }
  }
  return out;
}

}  // namespace trajkit
