#include <gtest/gtest.h>

#include <random>

#include "scenes.hpp"
#include "trajkit/model.hpp"

using namespace trajkit;

namespace {

KinematicState at_x(double x, int frame = 3) {
  KinematicState s;
  s.frame = frame;
  s.x = x;
  return s;
}

}  // namespace

TEST(LaneIdOf, InsideFirstLane) { EXPECT_EQ(lane_id_of(1.0, {0.0, 3.5, 7.0}), 1); }

TEST(LaneIdOf, LowerEdgeIsInclusive) { EXPECT_EQ(lane_id_of(3.5, {0.0, 3.5, 7.0}), 2); }

TEST(LaneIdOf, OutsideIsOffRoad) {
  EXPECT_EQ(lane_id_of(8.0, {0.0, 3.5, 7.0}), std::nullopt);
  EXPECT_EQ(lane_id_of(7.0, {0.0, 3.5, 7.0}), std::nullopt);
  EXPECT_EQ(lane_id_of(-0.01, {0.0, 3.5, 7.0}), std::nullopt);
  EXPECT_EQ(lane_id_of(0.0, {0.0, 3.5, 7.0}), 1);
}

TEST(LaneIdOf, UsesTheRequestedCarriageway) {
  const auto meta = scenes::highway_meta();
  EXPECT_EQ(lane_id_of(9.0, meta, DrivingDirection::Upper), 1);
  EXPECT_EQ(lane_id_of(9.0, meta, DrivingDirection::Lower), std::nullopt);
  EXPECT_EQ(lane_id_of(28.0, meta, DrivingDirection::Lower), 3);
  EXPECT_EQ(carriageway_of(28.0, meta), DrivingDirection::Lower);
  EXPECT_EQ(carriageway_of(17.0, meta), std::nullopt);
}

TEST(AheadOf, LowerCarriagewayIncreasingX) {
  EXPECT_TRUE(ahead_of(at_x(100), at_x(90), DrivingDirection::Lower));
}

TEST(AheadOf, UpperCarriagewayFlipsSign) {
  EXPECT_FALSE(ahead_of(at_x(100), at_x(90), DrivingDirection::Upper));
  EXPECT_TRUE(ahead_of(at_x(90), at_x(100), DrivingDirection::Upper));
}

TEST(AheadOf, StrictOrder) {
  EXPECT_FALSE(ahead_of(at_x(50), at_x(50), DrivingDirection::Lower));
  EXPECT_FALSE(ahead_of(at_x(50), at_x(50), DrivingDirection::Upper));
}

TEST(AheadOf, FrameMismatchIsAContractViolation) {
  EXPECT_THROW(ahead_of(at_x(1, 1), at_x(0, 2), DrivingDirection::Lower), ContractViolation);
}

TEST(AheadOf, IsAStrictTotalOrderOnDistinctPositions) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> x(0, 400);
  for (int trial = 0; trial < 200; ++trial) {
    const auto dir = trial % 2 ? DrivingDirection::Upper : DrivingDirection::Lower;
    const auto a = at_x(x(rng)), b = at_x(x(rng)), c = at_x(x(rng));
    EXPECT_FALSE(ahead_of(a, a, dir));
    EXPECT_NE(ahead_of(a, b, dir), ahead_of(b, a, dir));
    if (ahead_of(a, b, dir) && ahead_of(b, c, dir)) EXPECT_TRUE(ahead_of(a, c, dir));
  }
}

TEST(VehicleClassText, RoundTripsAndRejectsUnknown) {
  EXPECT_EQ(parse_vehicle_class(to_string(VehicleClass::Car)), VehicleClass::Car);
  EXPECT_EQ(parse_vehicle_class(to_string(VehicleClass::Truck)), VehicleClass::Truck);
  EXPECT_EQ(parse_vehicle_class("Bus"), std::nullopt);
  EXPECT_EQ(parse_vehicle_class("car"), std::nullopt);
  EXPECT_EQ(parse_vehicle_class(""), std::nullopt);
}

TEST(Direction, SignsAndLeftSteps) {
  EXPECT_EQ(travel_sign(DrivingDirection::Lower), 1.0);
  EXPECT_EQ(travel_sign(DrivingDirection::Upper), -1.0);
  EXPECT_EQ(left_lane_step(DrivingDirection::Lower), -1);
  EXPECT_EQ(left_lane_step(DrivingDirection::Upper), 1);
}

TEST(RecordingMetaInvariants, ValidMetaHasNoIssues) {
  EXPECT_TRUE(check_invariants(scenes::highway_meta()).empty());
}

TEST(RecordingMetaInvariants, EachViolationIsReported) {
  auto m = scenes::highway_meta();
  m.frame_rate = 0;
  EXPECT_FALSE(check_invariants(m).empty());
  m = scenes::highway_meta();
  m.duration = -1;
  EXPECT_FALSE(check_invariants(m).empty());
  m = scenes::highway_meta();
  m.upper_lane_markings = {0.0, 3.5};
  EXPECT_FALSE(check_invariants(m).empty());
  m = scenes::highway_meta();
  m.lower_lane_markings = {20.0, 19.0, 23.0};
  EXPECT_FALSE(check_invariants(m).empty());
  m = scenes::highway_meta();
  m.speed_limits.pop_back();
  EXPECT_EQ(check_invariants(m).size(), 1u);
}

TEST(RecordingMeta, MaxFrameCoversTheDuration) {
  const auto m = scenes::highway_meta(1, 10.0, 25.0);
  EXPECT_EQ(m.max_frame(), 250);
  EXPECT_EQ(m.frame_count(), 250);
}

TEST(Track, MeanSpeedIsMeanLongitudinalMagnitude) {
  std::vector<KinematicState> s(3);
  s[0].vx = -20;
  s[1].vx = -22;
  s[2].vx = -24;
  EXPECT_DOUBLE_EQ(compute_mean_speed(s), 22.0);
  EXPECT_EQ(compute_mean_speed({}), 0.0);
}

TEST(Track, LaneTransitionsCounted) {
  std::vector<KinematicState> s(5);
  const int lanes[] = {1, 1, 2, 2, 1};
  for (int i = 0; i < 5; ++i) s[static_cast<std::size_t>(i)].lane_id = lanes[i];
  EXPECT_EQ(count_lane_transitions(s), 2);
}

TEST(Track, FrameAccess) {
  Track t;
  for (int f = 10; f < 15; ++f) t.states.push_back(at_x(f, f));
  EXPECT_EQ(t.first_frame(), 10);
  EXPECT_EQ(t.last_frame(), 14);
  EXPECT_TRUE(t.alive_at(12));
  EXPECT_FALSE(t.alive_at(15));
  EXPECT_EQ(t.at(13).x, 13.0);
}
