#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <cstring>
#include <random>

#include "scenes.hpp"
#include "trajkit/csv.hpp"
#include "trajkit/dataset_io.hpp"
#include "trajkit/surround.hpp"

using namespace trajkit;
namespace fs = std::filesystem;

namespace {

Track straight(int id, DrivingDirection dir, double x0, double y, double v, int first, int frames, double length = 4.5) {
  const auto meta = scenes::highway_meta();
  Track t;
  t.track_id = id;
  t.direction = dir;
  t.length = length;
  t.width = 1.8;
  for (int f = first; f < first + frames; ++f) {
    KinematicState s;
    s.frame = f;
    s.x = x0 + travel_sign(dir) * v * (f - first) / 25.0;
    s.y = y;
    s.vx = travel_sign(dir) * v;
    s.lane_id = *lane_id_of(y, meta, dir);
    t.states.push_back(s);
  }
  t.mean_speed = compute_mean_speed(t.states);
  return t;
}

struct Fixture {
  RecordingMeta meta = scenes::highway_meta(3, 20.0);
  std::vector<Track> tracks;
  std::vector<std::vector<SurroundFrame>> surround;

  Fixture() {
    tracks.push_back(straight(1, DrivingDirection::Lower, 130, 21.8, 25, 0, 40));
    tracks.push_back(straight(2, DrivingDirection::Lower, 100, 21.9, 28, 5, 40, 16.0));
    tracks[1].vehicle_class = VehicleClass::Truck;
    // Files carry 6 significant digits; start from values that survive that.
    auto canon = [](double& v) { v = *csv::parse_double(csv::format_double(v)); };
    for (auto& t : tracks) {
      for (auto& st : t.states) {
        for (double* v : {&st.x, &st.y, &st.vx, &st.vy, &st.ax, &st.ay}) canon(*v);
      }
      canon(t.mean_speed);
    }
    surround = compute_surround(tracks, meta);
    for (auto& frames : surround) {
      for (auto& sf : frames) {
        for (auto* m : {&sf.dhw, &sf.thw, &sf.ttc}) {
          if (*m) canon(**m);
        }
      }
    }
  }

  RecordingFileSet write(const fs::path& dir) const { return write_recording(dir, meta, tracks, surround); }
};

void replace_in(const fs::path& p, const std::string& from, const std::string& to) {
  auto text = csv::read_file(p);
  const auto pos = text.find(from);
  ASSERT_NE(pos, std::string::npos) << from;
  text.replace(pos, from.size(), to);
  csv::write_file(p, text);
}

std::vector<IssueKind> kinds(const ValidationReport& r) {
  std::vector<IssueKind> out;
  for (const auto& i : r.issues) out.push_back(i.kind);
  return out;
}

}  // namespace

TEST(RecordingFiles, ConventionalNames) {
  const auto fsn = RecordingFileSet::in_directory("d", 7);
  EXPECT_EQ(fsn.recording_meta_path, fs::path("d/07_recordingMeta.csv"));
  EXPECT_EQ(fsn.tracks_meta_path, fs::path("d/07_tracksMeta.csv"));
  EXPECT_EQ(fsn.tracks_path, fs::path("d/07_tracks.csv"));
}

TEST(RoundTrip, TwoTrackRecordingReadsBackIdentically) {
  Fixture fx;
  const auto dir = scenes::temp_dir("io_roundtrip");
  const auto rec = read_recording(fx.write(dir));
  EXPECT_EQ(rec.meta.recording_id, 3);
  EXPECT_EQ(rec.meta.upper_lane_markings, fx.meta.upper_lane_markings);
  EXPECT_EQ(rec.meta.speed_limits, fx.meta.speed_limits);
  EXPECT_EQ(rec.tracks, fx.tracks);
  EXPECT_EQ(rec.surround, fx.surround);
}

TEST(RoundTrip, WriteReadWriteIsByteIdentical) {
  Fixture fx;
  for (auto& t : fx.tracks) {
    for (auto& s : t.states) s.x += 1.0 / 3.0;
  }
  fx.surround = compute_surround(fx.tracks, fx.meta);
  const auto a = scenes::temp_dir("io_bytes_a"), b = scenes::temp_dir("io_bytes_b");
  const auto rec = read_recording(fx.write(a));
  write_recording(b, rec.meta, rec.tracks, rec.surround);
  EXPECT_EQ(scenes::read_tree(a), scenes::read_tree(b));
}

TEST(RoundTrip, EmptyTrackListGivesHeaderOnlyFiles) {
  const auto dir = scenes::temp_dir("io_empty");
  const auto files = write_recording(dir, scenes::highway_meta(), {}, {});
  const auto text = csv::read_file(files.tracks_path);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
  const auto rec = read_recording(files);
  EXPECT_TRUE(rec.tracks.empty());
  EXPECT_TRUE(validate(files).ok());
}

TEST(RoundTrip, SingleFrameTrack) {
  const auto meta = scenes::highway_meta();
  std::vector<Track> tracks = {straight(4, DrivingDirection::Upper, 200, 9.0, 30, 12, 1)};
  const auto dir = scenes::temp_dir("io_single");
  const auto files = write_recording(dir, meta, tracks, compute_surround(tracks, meta));
  const auto rec = read_recording(files);
  ASSERT_EQ(rec.tracks.size(), 1u);
  EXPECT_EQ(rec.tracks[0].states.size(), 1u);
  EXPECT_EQ(rec.tracks[0].first_frame(), 12);
}

TEST(RoundTrip, BackgroundImagePathIsEchoed) {
  Fixture fx;
  const auto dir = scenes::temp_dir("io_bg");
  auto files = write_recording(dir, fx.meta, fx.tracks, fx.surround, dir / "03_highway.png");
  EXPECT_EQ(files.background_image_path, dir / "03_highway.png");
  EXPECT_EQ(read_recording(files).background_image_path, dir / "03_highway.png");
}

TEST(RoundTrip, EmptySurroundWritesSentinels) {
  Fixture fx;
  const auto dir = scenes::temp_dir("io_nosurround");
  const auto files = write_recording(dir, fx.meta, fx.tracks, {});
  const auto rec = read_recording(files);
  for (const auto& frames : rec.surround) {
    for (const auto& sf : frames) {
      EXPECT_EQ(sf.preceding, 0);
      EXPECT_FALSE(sf.dhw);
    }
  }
}

TEST(Reader, DanglingNeighborReference) {
  Fixture fx;
  const auto dir = scenes::temp_dir("io_dangling");
  const auto files = fx.write(dir);
  // Track 2 follows track 1; retarget its preceding id at a missing track.
  auto text = csv::read_file(files.tracks_path);
  const std::string needle = "\n5,2,";
  const auto row = text.find(needle);
  ASSERT_NE(row, std::string::npos);
  auto end = text.find('\n', row + 1);
  std::vector<std::string_view> cells;
  std::string line = text.substr(row + 1, end - row - 1);
  csv::split(line, ',', cells);
  std::vector<std::string> owned(cells.begin(), cells.end());
  owned[9] = "99";
  std::string rebuilt;
  csv::append_row(rebuilt, owned);
  rebuilt.pop_back();
  text.replace(row + 1, end - row - 1, rebuilt);
  csv::write_file(files.tracks_path, text);
  try {
    read_recording(files);
    FAIL() << "expected DatasetError";
  } catch (const DatasetError& e) {
    EXPECT_EQ(e.issue().kind, IssueKind::DanglingReference);
    EXPECT_EQ(e.issue().column, "precedingId");
    EXPECT_GT(e.issue().row, 1u);
  }
}

TEST(Reader, FrameGapIsNonMonotone) {
  const auto meta = scenes::highway_meta();
  std::vector<Track> tracks = {straight(1, DrivingDirection::Lower, 10, 21, 25, 5, 4)};
  const auto dir = scenes::temp_dir("io_gap");
  const auto files = write_recording(dir, meta, tracks, {});
  // Frames 5,6,7,8 -> drop frame 7 so the track reads 5,6,8.
  auto text = csv::read_file(files.tracks_path);
  const auto row = text.find("\n7,1,");
  text.erase(row, text.find('\n', row + 1) - row);
  csv::write_file(files.tracks_path, text);
  const auto report = validate(files);
  ASSERT_FALSE(report.ok());
  EXPECT_EQ(report.issues.front().kind, IssueKind::NonMonotoneFrames);
  EXPECT_THROW(read_recording(files), DatasetError);
}

TEST(Validate, ValidFilesGiveEmptyReport) {
  Fixture fx;
  EXPECT_TRUE(validate(fx.write(scenes::temp_dir("io_valid"))).ok());
}

TEST(Validate, SpeedLimitCountMismatchIsOneEntry) {
  Fixture fx;
  const auto files = fx.write(scenes::temp_dir("io_limits"));
  replace_in(files.recording_meta_path, "-1;-1;33.3;33.3;33.3", "-1;-1;33.3;33.3");
  const auto report = validate(files);
  ASSERT_EQ(report.issues.size(), 1u);
  EXPECT_EQ(report.issues[0].kind, IssueKind::InvariantViolation);
  EXPECT_EQ(report.issues[0].row, 2u);
}

TEST(Validate, DuplicateTrackIdIsOneEntry) {
  Fixture fx;
  const auto files = fx.write(scenes::temp_dir("io_dup"));
  auto text = csv::read_file(files.tracks_meta_path);
  const auto second = text.find("\n2,");
  text.replace(second + 1, 1, "1");
  csv::write_file(files.tracks_meta_path, text);
  const auto k = kinds(validate(files));
  EXPECT_EQ(std::count(k.begin(), k.end(), IssueKind::DuplicateId), 1);
}

TEST(Validate, MissingFileAndColumnAndType) {
  Fixture fx;
  auto files = fx.write(scenes::temp_dir("io_missing"));
  fs::remove(files.tracks_meta_path);
  EXPECT_EQ(kinds(validate(files)), std::vector<IssueKind>{IssueKind::MissingFile});

  files = fx.write(scenes::temp_dir("io_column"));
  replace_in(files.tracks_path, "xVelocity", "vx");
  auto report = validate(files);
  ASSERT_FALSE(report.ok());
  EXPECT_EQ(report.issues[0].kind, IssueKind::MissingColumn);
  EXPECT_EQ(report.issues[0].column, "xVelocity");

  files = fx.write(scenes::temp_dir("io_type"));
  replace_in(files.tracks_meta_path, "Truck", "Lorry");
  report = validate(files);
  ASSERT_FALSE(report.ok());
  EXPECT_EQ(report.issues[0].kind, IssueKind::TypeMismatch);
  EXPECT_EQ(report.issues[0].column, "class");
  EXPECT_EQ(report.issues[0].row, 3u);
  EXPECT_NE(report.issues[0].describe().find("class"), std::string::npos);
}

TEST(Validate, EmptyReportIffReadSucceeds) {
  std::mt19937_64 rng(21);
  const auto root = scenes::temp_dir("io_equiv");
  const char* edits[][2] = {{"laneId", "lane"}, {",1,", ",x,"}, {"\n", "\n\n"}, {"Car", "Van"}, {";", ";;"}};
  for (int i = 0; i < 40; ++i) {
    const auto rec = scenes::random_recording(rng, i + 1);
    const auto files = write_recording(root / std::to_string(i), rec.meta, rec.tracks, rec.surround);
    const auto& edit = edits[i % 5];
    const fs::path& target = i % 3 == 0 ? files.tracks_path : i % 3 == 1 ? files.tracks_meta_path
                                                                       : files.recording_meta_path;
    auto text = csv::read_file(target);
    if (auto pos = text.find(edit[0]); pos != std::string::npos && i % 4 != 0) {
      text.replace(pos, std::strlen(edit[0]), edit[1]);
      csv::write_file(target, text);
    }
    bool read_ok = true;
    try {
      (void)read_recording(files);
    } catch (const DatasetError&) {
      read_ok = false;
    }
    EXPECT_EQ(validate(files).ok(), read_ok) << "case " << i;
  }
}

TEST(Discovery, FindsRecordingIdsSorted) {
  Fixture fx;
  const auto dir = scenes::temp_dir("io_discover");
  write_recording(dir, scenes::highway_meta(12), {}, {});
  write_recording(dir, scenes::highway_meta(2), {}, {});
  csv::write_file(dir / "notes.csv", "x\n");
  EXPECT_EQ(discover_recordings(dir), (std::vector<int>{2, 12}));
  EXPECT_TRUE(discover_recordings(dir / "nope").empty());
}

TEST(ReaderThroughput, LinearInFileSize) {
  auto build = [](int vehicles, const fs::path& dir) {
    const auto meta = scenes::highway_meta(1, 400.0);  // room for 40 blocks of 200 frames
    std::vector<Track> tracks;
    for (int i = 0; i < vehicles; ++i) {
      // Blocks of 150 vehicles with 4-digit ids keep rows alike across sizes.
      tracks.push_back(straight(1000 + i, DrivingDirection::Lower, 5.0 * (i % 50), 20.5 + 3.75 * (i % 3), 25,
                                (i / 150) * 200, 200));
    }
    return write_recording(dir, meta, tracks, compute_surround(tracks, meta));
  };
  const auto small = build(400, scenes::temp_dir("io_small"));
  const auto large = build(4000, scenes::temp_dir("io_large"));
  // Interleaved best-of runs so both sizes see the same machine state. Both
  // inputs are well beyond L2 so the ratio reflects the parser, not caching.
  auto once = [](const RecordingFileSet& f) {
    const auto t0 = std::chrono::steady_clock::now();
    (void)read_recording(f);
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  double ts = 1e9, tl = 1e9;
  for (int k = 0; k < 5; ++k) {
    ts = std::min(ts, once(small));
    tl = std::min(tl, once(large));
  }
  const double ratio = tl / ts;
  const double size_ratio = static_cast<double>(fs::file_size(large.tracks_path)) /
                            static_cast<double>(fs::file_size(small.tracks_path));
  ASSERT_NEAR(size_ratio, 10.0, 0.25);
  EXPECT_LE(ratio, 12.0) << "small " << ts << " s, large " << tl << " s";
}
