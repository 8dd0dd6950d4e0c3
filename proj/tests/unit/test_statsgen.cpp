#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "scenes.hpp"
#include "trajkit/statsgen.hpp"

using namespace trajkit;

namespace {

Track entering(int id, int first_frame, VehicleClass cls, double mean_speed = 25) {
  Track t;
  t.track_id = id;
  t.vehicle_class = cls;
  KinematicState s;
  s.frame = first_frame;
  t.states.push_back(s);
  t.mean_speed = mean_speed;
  return t;
}

// Sort-free quantile by counting order statistics.
double quantile_oracle(const std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  auto kth = [&](std::size_t k) {
    for (double c : v) {
      const auto below = static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [&](double o) { return o < c; }));
      const auto equal = static_cast<std::size_t>(std::count(v.begin(), v.end(), c));
      if (below <= k && k < below + equal) return c;
    }
    return v.front();
  };
  const auto lo = static_cast<std::size_t>(pos);
  const auto hi = std::min(lo + 1, v.size() - 1);
  return kth(lo) + (pos - static_cast<double>(lo)) * (kth(hi) - kth(lo));
}

}  // namespace

TEST(Histogram, FixedWidthExample) {
  const std::vector<double> v = {22.2, 33.3, 33.4};
  const auto h = fixed_width_histogram(v, 5.0);
  EXPECT_EQ(h.bin_edges, (std::vector<double>{20, 25, 30, 35}));
  EXPECT_EQ(h.counts, (std::vector<long>{1, 0, 2}));
  EXPECT_EQ(h.total(), 3);
  EXPECT_EQ(format_histogram_csv(h), "binStart,binEnd,count\n20,25,1\n25,30,0\n30,35,2\n");
}

TEST(Histogram, EmptyInput) {
  const auto h = fixed_width_histogram({}, 1.0);
  EXPECT_TRUE(h.counts.empty());
  EXPECT_TRUE(h.bin_edges.empty());
  EXPECT_EQ(h.total(), 0);
  EXPECT_EQ(format_histogram_csv(h), "binStart,binEnd,count\n");
  EXPECT_THROW(fixed_width_histogram({}, 0.0), ContractViolation);
}

TEST(Histogram, BoundaryValueGoesToUpperBin) {
  const std::vector<double> v = {25.0};
  const auto h = fixed_width_histogram(v, 5.0);
  EXPECT_EQ(h.bin_edges, (std::vector<double>{25, 30}));
}

TEST(Histogram, CountsAreConserved) {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> d(30, 6);
  std::vector<double> v(10000);
  for (auto& x : v) x = d(rng);
  const auto h = fixed_width_histogram(v, 1.0);
  EXPECT_EQ(h.total(), 10000);
  EXPECT_EQ(h.underflow + h.overflow, 0);
  const auto explicit_bins = make_histogram(v, {20, 30, 40});
  EXPECT_EQ(explicit_bins.total(), 10000);
  EXPECT_EQ(explicit_bins.underflow, std::count_if(v.begin(), v.end(), [](double x) { return x < 20; }));
  EXPECT_EQ(explicit_bins.overflow, std::count_if(v.begin(), v.end(), [](double x) { return x >= 40; }));
  EXPECT_THROW(make_histogram(v, {1, 1}), ContractViolation);
}

TEST(Quantile, Examples) {
  EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2}, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2}, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(quantile({7}, 0.3), 7.0);
  EXPECT_THROW(quantile({}, 0.5), ContractViolation);
}

TEST(Quantile, MatchesOrderStatisticOracle) {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> n(1, 40), small(0, 9);
  for (int run = 0; run < 300; ++run) {
    std::vector<double> v(static_cast<std::size_t>(n(rng)));
    for (auto& x : v) x = small(rng) * 0.5;  // many ties
    for (double q : {0.0, 0.1, 0.25, 0.5, 0.9, 1.0}) EXPECT_NEAR(quantile(v, q), quantile_oracle(v, q), 1e-12);
  }
}

TEST(TruckRatio, AllCars) {
  const std::vector<Track> t = {entering(1, 0, VehicleClass::Car), entering(2, 2000, VehicleClass::Car)};
  const auto r = truck_ratio_over_time(t, scenes::highway_meta(1, 120.0), 60.0);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0], 0.0);
  EXPECT_EQ(r[1], 0.0);
}

TEST(TruckRatio, AlternatingClassesGiveHalf) {
  std::vector<Track> t;
  for (int i = 0; i < 100; ++i) t.push_back(entering(i + 1, i * 10, i % 2 ? VehicleClass::Truck : VehicleClass::Car));
  const auto r = truck_ratio_over_time(t, scenes::highway_meta(1, 40.0), 40.0);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_DOUBLE_EQ(*r[0], 0.5);
}

TEST(TruckRatio, EmptyWindowIsUndefined) {
  const std::vector<Track> t = {entering(1, 0, VehicleClass::Truck)};
  const auto r = truck_ratio_over_time(t, scenes::highway_meta(1, 125.0), 60.0);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0], 1.0);
  EXPECT_FALSE(r[1]);
  EXPECT_EQ(format_ratio_series_csv(r, 60.0),
            "windowStart,windowEnd,truckRatio\n0,60,1\n60,120,-1\n120,180,-1\n");
  EXPECT_THROW(truck_ratio_over_time(t, scenes::highway_meta(), 0.0), ContractViolation);
}

TEST(TruckRatio, ScriptedComposition) {
  // First minute: 3 trucks and 1 car enter. Second minute: 4 cars.
  auto script = scenes::empty_script(1, 120.0);
  int id = 0;
  for (int i = 0; i < 4; ++i) {
    auto v = scenes::vehicle(++id, DrivingDirection::Lower, 1 + i % 3, 25.0, 10.0 * i);
    if (i < 3) {
      v.vehicle_class = VehicleClass::Truck;
      v.length = 16;
      v.width = 2.5;
    }
    script.vehicles.push_back(v);
  }
  for (int i = 0; i < 4; ++i) script.vehicles.push_back(scenes::vehicle(++id, DrivingDirection::Upper, 1 + i % 2, 30.0, 65.0 + 10 * i));
  const auto truth = generate_truth(script);
  const auto r = truck_ratio_over_time(truth.tracks, truth.meta, 60.0);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_DOUBLE_EQ(*r[0], 0.75);
  EXPECT_DOUBLE_EQ(*r[1], 0.0);
}

TEST(Summary, LaneChangeRate) {
  std::vector<ManeuverEpisode> eps;
  for (int i = 0; i < 13; ++i) {
    ManeuverEpisode e;
    e.kind = ManeuverKind::LaneChange;
    e.complete = i < 10;
    eps.push_back(e);
  }
  eps.push_back({});
  const auto s = maneuver_summary(eps, 100);
  EXPECT_DOUBLE_EQ(s.lane_change_rate, 0.10);
  EXPECT_EQ(s.lane_changes_complete, 10);
  EXPECT_EQ(s.lane_changes_partial, 3);
  EXPECT_EQ(s.episode_counts.at(ManeuverKind::LaneChange), 13);
  EXPECT_EQ(s.episode_counts.at(ManeuverKind::FreeDriving), 1);
  EXPECT_EQ(s.episode_counts.at(ManeuverKind::Critical), 0);
  EXPECT_EQ(maneuver_summary({}, 0).lane_change_rate, 0.0);
}

TEST(Summary, MeanSpeedHistogram) {
  const std::vector<Track> t = {entering(1, 0, VehicleClass::Car, 22.2), entering(2, 0, VehicleClass::Car, 33.3),
                                entering(3, 0, VehicleClass::Truck, 33.4)};
  EXPECT_EQ(mean_speed_histogram(t, 5.0).counts, (std::vector<long>{1, 0, 2}));
}

TEST(Deciles, ConstantValue) {
  std::vector<double> x, y;
  for (int i = 0; i < 50; ++i) {
    x.push_back(20 + 0.2 * i);
    y.push_back(1.5);
  }
  const auto band = decile_band(x, y, 5.0);
  ASSERT_EQ(band.counts.size(), 2u);
  for (const auto& d : band.deciles) {
    for (double v : d) EXPECT_EQ(v, 1.5);
  }
  EXPECT_EQ(band.x_bin_centers, (std::vector<double>{22.5, 27.5}));
}

TEST(Deciles, MedianFollowsLinearTrend) {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> speed(15, 40), jitter(-0.5, 0.5);
  std::vector<double> x, y;
  for (int i = 0; i < 20000; ++i) {
    x.push_back(speed(rng));
    y.push_back(0.6 + 0.035 * x.back() + jitter(rng));
  }
  const auto band = decile_band(x, y, 1.0);
  std::vector<double> cx, med;
  for (std::size_t i = 0; i < band.counts.size(); ++i) {
    EXPECT_FALSE(band.sparse[i]);
    cx.push_back(band.x_bin_centers[i]);
    med.push_back(band.deciles[i][DecileBand::kMedianIndex]);
  }
  const auto line = oracle::fit_line(cx, med);
  EXPECT_NEAR(line.slope, 0.035, 0.005);
  EXPECT_NEAR(line.intercept, 0.6, 0.1);
}

TEST(Deciles, EmptyAndSparse) {
  const auto empty = decile_band({}, {}, 1.0);
  EXPECT_TRUE(empty.counts.empty());
  EXPECT_EQ(format_decile_band_csv(empty), "binCenter,count,sparse,d1,d2,d3,d4,d5,d6,d7,d8,d9,d10\n");
  const std::vector<double> x = {1.2, 1.4, 5.5}, y = {1, 2, 3};
  const auto band = decile_band(x, y, 1.0);
  ASSERT_EQ(band.counts, (std::vector<long>{2, 1}));
  EXPECT_TRUE(band.sparse[0]);
  EXPECT_DOUBLE_EQ(band.deciles[0][4], 1.5);
  EXPECT_DOUBLE_EQ(band.deciles[0][9], 2.0);
  const std::vector<double> shorter = {1.0};
  EXPECT_THROW(decile_band(x, shorter, 1.0), ContractViolation);
}

TEST(Deciles, PermutationInvariant) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 10);
  std::vector<std::pair<double, double>> pts(500);
  for (auto& p : pts) p = {u(rng), u(rng)};
  auto band_of = [](const std::vector<std::pair<double, double>>& v) {
    std::vector<double> x, y;
    for (const auto& [a, b] : v) {
      x.push_back(a);
      y.push_back(b);
    }
    return decile_band(x, y, 2.0);
  };
  const auto a = band_of(pts);
  std::shuffle(pts.begin(), pts.end(), rng);
  const auto b = band_of(pts);
  EXPECT_EQ(a.deciles, b.deciles);
  EXPECT_EQ(a.counts, b.counts);
}

TEST(CutInStats, SampledPopulation) {
  const auto pop = sample_cut_in_population(5000, 0.6, 0.035, 0.05, 15, 40, 3);
  const auto stats = cut_in_thw_stats(pop, 2.0);
  EXPECT_EQ(stats.entry_thw.total(), 5000);
  long n = 0;
  for (long c : stats.thw_vs_speed.counts) n += c;
  EXPECT_EQ(n, 5000);
  std::vector<CutInScenario> with_missing = pop;
  with_missing[0].entry_thw.reset();
  EXPECT_EQ(cut_in_thw_stats(with_missing, 2.0).entry_thw.total(), 4999);
  EXPECT_THROW(cut_in_thw_stats(pop, 0.0), ContractViolation);
}
