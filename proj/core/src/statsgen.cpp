#include "trajkit/statsgen.hpp"

#include <algorithm>
#include <cmath>

#include "trajkit/csv.hpp"

namespace trajkit {

long Histogram::total() const noexcept {
  long n = underflow + overflow;
  for (long c : counts) n += c;
  return n;
}

Histogram make_histogram(std::span<const double> values, std::vector<double> edges) {
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) throw ContractViolation("make_histogram: edges must be strictly increasing");
  }
  Histogram h;
  h.counts.assign(edges.size() > 1 ? edges.size() - 1 : 0, 0);
  h.bin_edges = std::move(edges);
  for (double v : values) {
    if (h.counts.empty() || v < h.bin_edges.front()) {
      ++h.underflow;
    } else if (v >= h.bin_edges.back()) {
      ++h.overflow;
    } else {
      const auto it = std::upper_bound(h.bin_edges.begin(), h.bin_edges.end(), v);
      ++h.counts[static_cast<std::size_t>(it - h.bin_edges.begin() - 1)];
    }
  }
  return h;
}

Histogram fixed_width_histogram(std::span<const double> values, double bin_width) {
  if (!(bin_width > 0)) throw ContractViolation("fixed_width_histogram: bin width must be positive");
  Histogram h;
  if (values.empty()) return h;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const auto first = static_cast<long>(std::floor(*lo_it / bin_width));
  const auto last = static_cast<long>(std::floor(*hi_it / bin_width));
  h.counts.assign(static_cast<std::size_t>(last - first + 1), 0);
  for (long k = first; k <= last + 1; ++k) h.bin_edges.push_back(static_cast<double>(k) * bin_width);
  for (double v : values) {
    const auto k = static_cast<long>(std::floor(v / bin_width));
    ++h.counts[static_cast<std::size_t>(k - first)];
  }
  return h;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ContractViolation("quantile: empty sample");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

DecileBand decile_band(std::span<const double> x, std::span<const double> y, double bin_width) {
  if (x.size() != y.size()) throw ContractViolation("decile_band: x and y differ in length");
  if (!(bin_width > 0)) throw ContractViolation("decile_band: bin width must be positive");
  std::map<long, std::vector<double>> bins;
  for (std::size_t i = 0; i < x.size(); ++i) bins[static_cast<long>(std::floor(x[i] / bin_width))].push_back(y[i]);

  DecileBand band;
  for (auto& [k, ys] : bins) {
    std::sort(ys.begin(), ys.end());
    std::array<double, 10> d{};
    for (std::size_t q = 0; q < 10; ++q) d[q] = quantile(ys, 0.1 * static_cast<double>(q + 1));
    band.x_bin_centers.push_back((static_cast<double>(k) + 0.5) * bin_width);
    band.deciles.push_back(d);
    band.counts.push_back(static_cast<long>(ys.size()));
    band.sparse.push_back(ys.size() < 10);
  }
  return band;
}

Histogram mean_speed_histogram(std::span<const Track> tracks, double bin_width) {
  std::vector<double> speeds;
  speeds.reserve(tracks.size());
  for (const auto& t : tracks) speeds.push_back(t.mean_speed);
  return fixed_width_histogram(speeds, bin_width);
}

std::vector<std::optional<double>> truck_ratio_over_time(std::span<const Track> tracks, const RecordingMeta& meta,
                                                         double window) {
  if (!(window > 0)) throw ContractViolation("truck_ratio_over_time: window must be positive");
  const auto windows = static_cast<std::size_t>(std::max(1.0, std::ceil(meta.duration / window - 1e-9)));
  std::vector<long> trucks(windows, 0), all(windows, 0);
  for (const auto& t : tracks) {
    if (t.states.empty()) continue;
    auto w = static_cast<std::size_t>(std::floor(t.first_frame() / meta.frame_rate / window));
    w = std::min(w, windows - 1);
    ++all[w];
    if (t.vehicle_class == VehicleClass::Truck) ++trucks[w];
  }
  std::vector<std::optional<double>> out(windows);
  for (std::size_t w = 0; w < windows; ++w) {
    if (all[w] > 0) out[w] = static_cast<double>(trucks[w]) / static_cast<double>(all[w]);
  }
  return out;
}

ManeuverSummary maneuver_summary(std::span<const ManeuverEpisode> episodes, long vehicle_count) {
  ManeuverSummary s;
  for (auto k : {ManeuverKind::FreeDriving, ManeuverKind::VehicleFollowing, ManeuverKind::Critical,
                 ManeuverKind::LaneChange}) {
    s.episode_counts[k] = 0;
  }
  for (const auto& e : episodes) {
    ++s.episode_counts[e.kind];
    if (e.kind == ManeuverKind::LaneChange) ++(e.complete ? s.lane_changes_complete : s.lane_changes_partial);
  }
  s.vehicles = vehicle_count;
  s.lane_change_rate =
      vehicle_count > 0 ? static_cast<double>(s.lane_changes_complete) / static_cast<double>(vehicle_count) : 0.0;
  return s;
}

CutInThwStats cut_in_thw_stats(std::span<const CutInScenario> scenarios, double speed_bin, double thw_bin) {
  if (!(speed_bin > 0)) throw ContractViolation("cut_in_thw_stats: speed bin must be positive");
  std::vector<double> thw, speed;
  for (const auto& s : scenarios) {
    if (!s.entry_thw) continue;
    thw.push_back(*s.entry_thw);
    speed.push_back(s.tail_speed_at_entry);
  }
  CutInThwStats out;
  out.entry_thw = fixed_width_histogram(thw, thw_bin);
  out.thw_vs_speed = decile_band(speed, thw, speed_bin);
  return out;
}

std::string format_histogram_csv(const Histogram& h) {
  std::string out = "binStart,binEnd,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    const std::string cells[] = {csv::format_double(h.bin_edges[i]), csv::format_double(h.bin_edges[i + 1]),
                                 std::to_string(h.counts[i])};
    csv::append_row(out, cells);
  }
  return out;
}

std::string format_decile_band_csv(const DecileBand& band) {
  std::string out = "binCenter,count,sparse,d1,d2,d3,d4,d5,d6,d7,d8,d9,d10\n";
  for (std::size_t i = 0; i < band.counts.size(); ++i) {
    std::vector<std::string> cells = {csv::format_double(band.x_bin_centers[i]), std::to_string(band.counts[i]),
                                      band.sparse[i] ? "1" : "0"};
    for (double d : band.deciles[i]) cells.push_back(csv::format_double(d));
    csv::append_row(out, cells);
  }
  return out;
}

std::string format_ratio_series_csv(std::span<const std::optional<double>> ratios, double window) {
  std::string out = "windowStart,windowEnd,truckRatio\n";
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const std::string cells[] = {csv::format_double(static_cast<double>(i) * window),
                                 csv::format_double(static_cast<double>(i + 1) * window),
                                 ratios[i] ? csv::format_double(*ratios[i]) : std::string("-1")};
    csv::append_row(out, cells);
  }
  return out;
}

}  // namespace trajkit
