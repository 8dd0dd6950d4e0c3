#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "scenes.hpp"
#include "trajkit/surround.hpp"

using namespace trajkit;

namespace {

KinematicState at(double x, double vx, int lane = 1, double y = 21.0) {
  KinematicState s;
  s.frame = 3;
  s.x = x;
  s.y = y;
  s.vx = vx;
  s.lane_id = lane;
  return s;
}

VehicleSnapshot car(int id, double x, double vx, int lane, DrivingDirection dir = DrivingDirection::Lower,
                    double length = 4.0) {
  const auto meta = scenes::highway_meta();
  const auto& mk = meta.markings(dir);
  const double y = 0.5 * (mk[static_cast<std::size_t>(lane - 1)] + mk[static_cast<std::size_t>(lane)]);
  return {id, dir, length, 1.8, at(x, vx, lane, y)};
}

}  // namespace

TEST(Headway, FiftyMetreGapAtTwentyFiveIsTwoSeconds) {
  const auto h = headway_metrics(at(0, 25), 4.0, at(54, 25), 4.0, DrivingDirection::Lower);
  EXPECT_DOUBLE_EQ(h.dhw, 50.0);
  ASSERT_TRUE(h.thw);
  EXPECT_DOUBLE_EQ(*h.thw, 2.0);
  EXPECT_FALSE(h.ttc);
}

TEST(Headway, ClosingAtTenMetresPerSecond) {
  const auto h = headway_metrics(at(0, 30), 4.5, at(34.5, 20), 4.5, DrivingDirection::Lower);
  EXPECT_DOUBLE_EQ(h.dhw, 30.0);
  ASSERT_TRUE(h.ttc);
  EXPECT_DOUBLE_EQ(*h.ttc, 3.0);
  EXPECT_DOUBLE_EQ(*h.thw, 1.0);
}

TEST(Headway, UpperCarriagewayUsesReversedSign) {
  const auto h = headway_metrics(at(100, -30), 5.0, at(85, -20), 5.0, DrivingDirection::Upper);
  EXPECT_DOUBLE_EQ(h.dhw, 10.0);
  EXPECT_DOUBLE_EQ(*h.thw, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(*h.ttc, 1.0);
}

TEST(Headway, SpeedFloors) {
  auto h = headway_metrics(at(0, 0.1), 4.0, at(20, 0), 4.0, DrivingDirection::Lower);
  EXPECT_FALSE(h.thw);
  EXPECT_FALSE(h.ttc);
  h = headway_metrics(at(0, 0.11), 4.0, at(20, 0), 4.0, DrivingDirection::Lower);
  EXPECT_TRUE(h.thw);
  EXPECT_TRUE(h.ttc);
  // Opening gap: ttc undefined.
  h = headway_metrics(at(0, 20), 4.0, at(20, 25), 4.0, DrivingDirection::Lower);
  EXPECT_FALSE(h.ttc);
}

TEST(GapSize, Examples) {
  EXPECT_DOUBLE_EQ(gap_size(at(0, 0), 4.0, at(14, 0), 4.0, DrivingDirection::Lower), 10.0);
  EXPECT_DOUBLE_EQ(gap_size(at(0, 0), 16.0, at(12, 0), 4.5, DrivingDirection::Lower), 1.75);
  // Overlapping boxes clamp to contact.
  EXPECT_DOUBLE_EQ(gap_size(at(0, 0), 4.0, at(3, 0), 4.0, DrivingDirection::Lower), 0.0);
  EXPECT_DOUBLE_EQ(gap_size(at(20, 0), 4.0, at(6, 0), 4.0, DrivingDirection::Upper), 10.0);
}

TEST(GapSize, LeadMustBeAhead) {
  EXPECT_THROW(gap_size(at(14, 0), 4.0, at(0, 0), 4.0, DrivingDirection::Lower), ContractViolation);
  EXPECT_THROW(gap_size(at(5, 0), 4.0, at(5, 0), 4.0, DrivingDirection::Lower), ContractViolation);
  EXPECT_THROW(gap_size(at(0, 0), 4.0, at(14, 0), 4.0, DrivingDirection::Upper), ContractViolation);
  auto other_frame = at(14, 0);
  other_frame.frame = 4;
  EXPECT_THROW(gap_size(at(0, 0), 4.0, other_frame, 4.0, DrivingDirection::Lower), ContractViolation);
}

TEST(Neighbors, LoneVehicleHasNone) {
  const std::vector<VehicleSnapshot> v = {car(1, 50, 25, 2)};
  const auto out = assign_neighbors(v, scenes::highway_meta());
  ASSERT_EQ(out.size(), 1u);
  SurroundFrame expected;
  expected.frame = 3;
  expected.track_id = 1;
  EXPECT_EQ(out[0], expected);
}

TEST(Neighbors, TwoVehiclesSameLane) {
  const std::vector<VehicleSnapshot> v = {car(1, 30, 25, 2), car(2, 0, 25, 2)};
  const auto out = assign_neighbors(v, scenes::highway_meta());
  EXPECT_EQ(out[0].following, 2);
  EXPECT_EQ(out[0].preceding, 0);
  EXPECT_FALSE(out[0].dhw);
  EXPECT_EQ(out[1].preceding, 1);
  EXPECT_DOUBLE_EQ(*out[1].dhw, 26.0);
  EXPECT_DOUBLE_EQ(*out[1].thw, 26.0 / 25.0);
}

TEST(Neighbors, LeftIsLowerLaneIdOnLowerCarriageway) {
  // Lower carriageway: lane 1 is left of lane 2.
  const std::vector<VehicleSnapshot> v = {car(1, 100, 25, 2), car(2, 102, 25, 1), car(3, 150, 25, 3),
                                          car(4, 60, 25, 3), car(5, 98, 25, 3)};
  const auto out = assign_neighbors(v, scenes::highway_meta());
  EXPECT_EQ(out[0].left_alongside, 2);
  EXPECT_EQ(out[0].right_alongside, 5);
  EXPECT_EQ(out[0].right_preceding, 3);
  EXPECT_EQ(out[0].right_following, 4);
  EXPECT_EQ(out[1].right_alongside, 1);
  EXPECT_EQ(out[1].left_alongside, 0);
}

TEST(Neighbors, LeftIsHigherLaneIdOnUpperCarriageway) {
  const auto dir = DrivingDirection::Upper;
  const std::vector<VehicleSnapshot> v = {car(1, 100, -25, 1, dir), car(2, 80, -25, 2, dir)};
  const auto out = assign_neighbors(v, scenes::highway_meta());
  EXPECT_EQ(out[0].left_preceding, 2);
  EXPECT_EQ(out[1].right_following, 1);
}

TEST(Neighbors, AlongsideBoundaryIsInclusive) {
  // Centres 4 m apart with 4 m lengths: boxes touch.
  const std::vector<VehicleSnapshot> v = {car(1, 100, 25, 2), car(2, 104, 25, 1)};
  EXPECT_EQ(assign_neighbors(v, scenes::highway_meta())[0].left_alongside, 2);
  const std::vector<VehicleSnapshot> w = {car(1, 100, 25, 2), car(2, 104.01, 25, 1)};
  EXPECT_EQ(assign_neighbors(w, scenes::highway_meta())[0].left_preceding, 2);
}

TEST(Neighbors, EqualDistanceTieGoesToLowerId) {
  const std::vector<VehicleSnapshot> v = {car(1, 100, 25, 2), car(9, 130, 25, 1), car(4, 130, 25, 1)};
  EXPECT_EQ(assign_neighbors(v, scenes::highway_meta())[0].left_preceding, 4);
}

TEST(Neighbors, OppositeCarriagewayIgnored) {
  const std::vector<VehicleSnapshot> v = {car(1, 100, 25, 1), car(2, 110, -25, 3, DrivingDirection::Upper)};
  const auto out = assign_neighbors(v, scenes::highway_meta());
  EXPECT_EQ(out[0].left_preceding + out[0].right_preceding + out[0].preceding, 0);
  EXPECT_EQ(out[1].left_following + out[1].right_following + out[1].following, 0);
}

TEST(Neighbors, OffRoadVehicleNeitherHasNorIsNeighbor) {
  auto off = car(2, 110, 25, 1);
  off.state.lane_id = 0;
  const std::vector<VehicleSnapshot> v = {car(1, 100, 25, 1), off};
  const auto out = assign_neighbors(v, scenes::highway_meta());
  EXPECT_EQ(out[0].preceding, 0);
  EXPECT_EQ(out[1].following, 0);
}

TEST(Neighbors, MatchesPairwiseOracle) {
  std::mt19937_64 rng(99);
  const auto meta = scenes::highway_meta();
  for (int i = 0; i < 2000; ++i) {
    const auto frame = scenes::random_frame(rng, 12);
    ASSERT_EQ(assign_neighbors(frame, meta), oracle::neighbors(frame, meta)) << "frame " << i;
  }
}

TEST(Neighbors, RelationsAreMutual) {
  std::mt19937_64 rng(4);
  const auto meta = scenes::highway_meta();
  for (int i = 0; i < 500; ++i) {
    const auto frame = scenes::random_frame(rng, 15);
    const auto out = assign_neighbors(frame, meta);
    std::map<int, const SurroundFrame*> by;
    for (const auto& sf : out) by[sf.track_id] = &sf;
    for (const auto& sf : out) {
      if (sf.preceding) {
        // The nearest vehicle behind my lead is at least as close as I am.
        EXPECT_NE(by.at(sf.preceding)->following, 0);
      }
      for (int id : {sf.preceding, sf.following, sf.left_preceding, sf.left_alongside, sf.left_following,
                     sf.right_preceding, sf.right_alongside, sf.right_following}) {
        EXPECT_NE(id, sf.track_id);
      }
      EXPECT_EQ(sf.dhw.has_value(), sf.preceding != 0);
    }
  }
}

TEST(ComputeSurround, AgreesWithPerFrameAssignment) {
  std::mt19937_64 rng(12);
  for (int r = 0; r < 30; ++r) {
    const auto rec = scenes::random_recording(rng, 1);
    ASSERT_EQ(rec.surround.size(), rec.tracks.size());
    std::map<int, std::vector<VehicleSnapshot>> frames;
    for (const auto& t : rec.tracks) {
      for (const auto& s : t.states) frames[s.frame].push_back({t.track_id, t.direction, t.length, t.width, s});
    }
    for (std::size_t i = 0; i < rec.tracks.size(); ++i) {
      ASSERT_EQ(rec.surround[i].size(), rec.tracks[i].states.size());
      for (std::size_t k = 0; k < rec.surround[i].size(); ++k) {
        const auto& snap = frames.at(rec.tracks[i].states[k].frame);
        const auto expected = oracle::neighbors(snap, rec.meta);
        const auto it = std::find_if(expected.begin(), expected.end(),
                                     [&](const SurroundFrame& f) { return f.track_id == rec.tracks[i].track_id; });
        EXPECT_EQ(rec.surround[i][k], *it);
      }
    }
  }
}

TEST(ComputeSurround, EmptyInput) {
  EXPECT_TRUE(compute_surround({}, scenes::highway_meta()).empty());
}
