#include "trajkit/track_builder.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "trajkit/csv.hpp"
#include "trajkit/dataset_io.hpp"

namespace trajkit {

void TrackerConfig::validate() const {
  if (!(gate_radius > 0)) throw ContractViolation("TrackerConfig: gate_radius must be > 0");
  if (min_hits_to_confirm < 1) throw ContractViolation("TrackerConfig: min_hits_to_confirm must be >= 1");
  if (max_coast < 0) throw ContractViolation("TrackerConfig: max_coast must be >= 0");
  if (!(frame_rate > 0)) throw ContractViolation("TrackerConfig: frame_rate must be > 0");
}

int RawTrack::measured_count() const noexcept {
  return static_cast<int>(std::count_if(observations.begin(), observations.end(),
                                        [](const Observation& o) { return !o.predicted; }));
}

int RawTrack::trailing_predicted() const noexcept {
  int n = 0;
  for (auto it = observations.rbegin(); it != observations.rend() && it->predicted; ++it) ++n;
  return n;
}

std::pair<double, double> RawTrack::predict(int frame) const {
  const auto& last = observations.back();
  if (observations.size() < 2) return {last.x, last.y};
  const auto& prev = observations[observations.size() - 2];
  const double steps = static_cast<double>(frame - last.frame) / static_cast<double>(last.frame - prev.frame);
  return {last.x + (last.x - prev.x) * steps, last.y + (last.y - prev.y) * steps};
}

VehicleClass RawTrack::vehicle_class() const noexcept {
  return truck_votes > car_votes ? VehicleClass::Truck : VehicleClass::Car;
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace

double RawTrack::median_length() const { return median(lengths); }
double RawTrack::median_width() const { return median(widths); }

Assignment associate_frame(std::span<const RawTrack> active, std::span<const Detection> detections,
                           const TrackerConfig& cfg) {
  Assignment out;
  if (!detections.empty()) {
    const int frame = detections.front().frame;
    for (const auto& d : detections) {
      if (d.frame != frame) throw ContractViolation("associate_frame: detections span several frames");
    }
    for (const auto& t : active) {
      if (t.last_frame() + 1 != frame) {
        throw ContractViolation("associate_frame: track " + std::to_string(t.track_id) + " ends at frame " +
                                std::to_string(t.last_frame()) + ", detections are at frame " + std::to_string(frame));
      }
    }
  }

  struct Pair {
    double dist;
    int track_id;
    std::size_t ti;
    std::size_t di;
  };
  std::vector<Pair> feasible;
  for (std::size_t ti = 0; ti < active.size(); ++ti) {
    if (detections.empty()) break;
    const auto [px, py] = active[ti].predict(detections.front().frame);
    for (std::size_t di = 0; di < detections.size(); ++di) {
      const double dist = std::hypot(detections[di].cx - px, detections[di].cy - py);
      if (dist <= cfg.gate_radius) feasible.push_back({dist, active[ti].track_id, ti, di});
    }
  }
  std::sort(feasible.begin(), feasible.end(), [](const Pair& a, const Pair& b) {
    return std::tie(a.dist, a.track_id, a.di) < std::tie(b.dist, b.track_id, b.di);
  });

  std::vector<bool> track_used(active.size(), false);
  std::vector<bool> det_used(detections.size(), false);
  for (const auto& p : feasible) {
    if (track_used[p.ti] || det_used[p.di]) continue;
    track_used[p.ti] = det_used[p.di] = true;
    out.matches.emplace_back(p.ti, p.di);
  }
  for (std::size_t ti = 0; ti < active.size(); ++ti) {
    if (!track_used[ti]) out.unmatched_tracks.push_back(ti);
  }
  for (std::size_t di = 0; di < detections.size(); ++di) {
    if (!det_used[di]) out.unmatched_detections.push_back(di);
  }
  return out;
}

Tracker::Tracker(TrackerConfig cfg) : cfg_(cfg) { cfg_.validate(); }

namespace {

void absorb(RawTrack& t, const Detection& d) {
  t.observations.push_back({d.frame, d.cx, d.cy, false});
  t.lengths.push_back(d.length);
  t.widths.push_back(d.width);
  if (d.class_hint == VehicleClass::Car) ++t.car_votes;
  if (d.class_hint == VehicleClass::Truck) ++t.truck_votes;
}

}  // namespace

void Tracker::step(std::span<const Detection> detections) {
  const int frame = next_frame_;
  for (const auto& d : detections) {
    if (d.frame != frame) {
      throw ContractViolation("Tracker::step: expected frame " + std::to_string(frame) + ", got " +
                              std::to_string(d.frame));
    }
  }
  const Assignment a = associate_frame(active_, detections, cfg_);
  for (const auto& [ti, di] : a.matches) absorb(active_[ti], detections[di]);

  std::vector<bool> expired(active_.size(), false);
  for (std::size_t ti : a.unmatched_tracks) {
    auto& t = active_[ti];
    const auto [px, py] = t.predict(frame);
    t.observations.push_back({frame, px, py, true});
    if (t.trailing_predicted() > cfg_.max_coast) expired[ti] = true;
  }

  std::vector<RawTrack> keep;
  keep.reserve(active_.size() + a.unmatched_detections.size());
  for (std::size_t ti = 0; ti < active_.size(); ++ti) {
    if (expired[ti]) {
      close(std::move(active_[ti]));
    } else {
      keep.push_back(std::move(active_[ti]));
    }
  }
  for (std::size_t di : a.unmatched_detections) {
    RawTrack t;
    t.track_id = next_id_++;
    absorb(t, detections[di]);
    keep.push_back(std::move(t));
  }
  active_ = std::move(keep);
  ++next_frame_;
}

void Tracker::close(RawTrack&& t) {
  while (!t.observations.empty() && t.observations.back().predicted) t.observations.pop_back();
  if (t.measured_count() >= cfg_.min_hits_to_confirm) done_.push_back(std::move(t));
}

std::vector<RawTrack> Tracker::finish() {
  for (auto& t : active_) close(std::move(t));
  active_.clear();
  std::vector<RawTrack> out = std::move(done_);
  done_.clear();
  std::sort(out.begin(), out.end(), [](const RawTrack& a, const RawTrack& b) {
    return std::make_pair(a.observations.front().frame, a.track_id) <
           std::make_pair(b.observations.front().frame, b.track_id);
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].track_id = static_cast<int>(i + 1);
  return out;
}

std::vector<RawTrack> build_tracks(std::span<const std::vector<Detection>> frames, const TrackerConfig& cfg) {
  Tracker tracker(cfg);
  for (const auto& dets : frames) tracker.step(dets);
  return tracker.finish();
}

std::string format_detections(std::span<const std::vector<Detection>> frames) {
  std::string out = "frame,cx,cy,length,width,class\n";
  for (const auto& dets : frames) {
    for (const auto& d : dets) {
      const std::string cells[] = {std::to_string(d.frame),         csv::format_double(d.cx),
                                   csv::format_double(d.cy),        csv::format_double(d.length),
                                   csv::format_double(d.width),
                                   d.class_hint ? std::string(to_string(*d.class_hint)) : std::string()};
      csv::append_row(out, cells);
    }
  }
  return out;
}

std::vector<std::vector<Detection>> parse_detections(const std::string& text, const std::string& source_name,
                                                     int frame_count) {
  csv::Document doc(text);
  static constexpr const char* kCols[] = {"frame", "cx", "cy", "length", "width", "class"};
  std::size_t idx[6];
  for (std::size_t i = 0; i < 6; ++i) {
    auto c = doc.column(kCols[i]);
    if (!c) throw DatasetError({IssueKind::MissingColumn, source_name, 1, kCols[i], "missing column"});
    idx[i] = *c;
  }
  std::vector<Detection> all;
  int max_frame = -1;
  while (doc.next()) {
    const auto& f = doc.fields();
    auto field = [&](std::size_t i) -> std::string_view {
      if (idx[i] >= f.size()) throw DatasetError({IssueKind::TypeMismatch, source_name, doc.line(), kCols[i], "missing field"});
      return f[idx[i]];
    };
    auto number = [&](std::size_t i) {
      auto v = csv::parse_double(field(i));
      if (!v) {
        throw DatasetError({IssueKind::TypeMismatch, source_name, doc.line(), kCols[i],
                            "expected number, got '" + std::string(field(i)) + "'"});
      }
      return *v;
    };
    Detection d;
    auto frame = csv::parse_int(field(0));
    if (!frame || *frame < 0) {
      throw DatasetError({IssueKind::TypeMismatch, source_name, doc.line(), "frame", "expected frame index >= 0"});
    }
    d.frame = static_cast<int>(*frame);
    d.cx = number(1);
    d.cy = number(2);
    d.length = number(3);
    d.width = number(4);
    if (!(d.length > 0) || !(d.width > 0)) {
      throw DatasetError({IssueKind::InvariantViolation, source_name, doc.line(), "length", "extents must be positive"});
    }
    const auto cls = field(5);
    if (!cls.empty()) {
      d.class_hint = parse_vehicle_class(cls);
      if (!d.class_hint) {
        throw DatasetError({IssueKind::TypeMismatch, source_name, doc.line(), "class",
                            "unknown vehicle class '" + std::string(cls) + "'"});
      }
    }
    max_frame = std::max(max_frame, d.frame);
    all.push_back(d);
  }
  const int n = frame_count > 0 ? frame_count : max_frame + 1;
  if (max_frame >= n) {
    throw DatasetError({IssueKind::InvariantViolation, source_name, 0, "frame", "frame beyond recording length"});
  }
  std::vector<std::vector<Detection>> frames(static_cast<std::size_t>(std::max(n, 0)));
  for (const auto& d : all) frames[static_cast<std::size_t>(d.frame)].push_back(d);
  return frames;
}

}  // namespace trajkit
