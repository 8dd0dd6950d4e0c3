#pragma once

// Dataset statistics: histograms, truck ratio over time, maneuver tallies and
// cut-in headway distributions. Quantiles interpolate linearly between order
// statistics (position (n - 1) * q).

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trajkit/lane_change_fit.hpp"
#include "trajkit/maneuvers.hpp"
#include "trajkit/model.hpp"

namespace trajkit {

struct Histogram {
  std::vector<double> bin_edges;  // counts.size() + 1 entries, or empty
  std::vector<long> counts;
  long underflow = 0;
  long overflow = 0;

  long total() const noexcept;
};

/// Bins values into [edges[k], edges[k+1]); outside values go to under/overflow.
Histogram make_histogram(std::span<const double> values, std::vector<double> edges);

/// Fixed-width bins [k w, (k+1) w) spanning the occupied range of `values`.
Histogram fixed_width_histogram(std::span<const double> values, double bin_width);

/// Linear-interpolation quantile of an unsorted sample; q in [0, 1].
double quantile(std::vector<double> values, double q);

struct DecileBand {
  std::vector<double> x_bin_centers;
  std::vector<std::array<double, 10>> deciles;  // q = 0.1, 0.2, ..., 1.0
  std::vector<long> counts;
  std::vector<bool> sparse;  // fewer than 10 samples

  static constexpr std::size_t kMedianIndex = 4;
};

/// Deciles of y within fixed-width x bins; only populated bins are reported.
DecileBand decile_band(std::span<const double> x, std::span<const double> y, double bin_width);

Histogram mean_speed_histogram(std::span<const Track> tracks, double bin_width);

/// Per window of `window` seconds: trucks entering / vehicles entering, by the
/// window containing each track's first frame. nullopt for windows without
/// entries.
std::vector<std::optional<double>> truck_ratio_over_time(std::span<const Track> tracks, const RecordingMeta& meta,
                                                         double window);

struct ManeuverSummary {
  std::map<ManeuverKind, long> episode_counts;
  long lane_changes_complete = 0;
  long lane_changes_partial = 0;
  long vehicles = 0;
  double lane_change_rate = 0;  // complete lane changes per vehicle
};

ManeuverSummary maneuver_summary(std::span<const ManeuverEpisode> episodes, long vehicle_count);

struct CutInThwStats {
  Histogram entry_thw;
  DecileBand thw_vs_speed;
};

CutInThwStats cut_in_thw_stats(std::span<const CutInScenario> scenarios, double speed_bin, double thw_bin = 0.25);

/// Plot-ready CSV tables.
std::string format_histogram_csv(const Histogram& h);
std::string format_decile_band_csv(const DecileBand& band);
std::string format_ratio_series_csv(std::span<const std::optional<double>> ratios, double window);

}  // namespace trajkit
