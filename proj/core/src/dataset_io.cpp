#include "trajkit/dataset_io.hpp"

#include <algorithm>
#include <cstdint>
#include <array>
#include <cmath>
#include <cstdio>
#include <regex>
#include <unordered_map>

#include "trajkit/csv.hpp"

namespace trajkit {

namespace fs = std::filesystem;

namespace {

constexpr std::array<const char*, 7> kRecordingMetaColumns = {
    "id", "locationId", "frameRate", "duration", "upperLaneMarkings", "lowerLaneMarkings", "speedLimits"};
constexpr std::array<const char*, 10> kTracksMetaColumns = {
    "id",         "length",     "width",        "class",       "drivingDirection",
    "meanSpeed",  "numFrames",  "initialFrame", "finalFrame",  "numLaneChanges"};
constexpr std::array<const char*, 20> kTracksColumns = {
    "frame",           "id",              "x",               "y",                "xVelocity",
    "yVelocity",       "xAcceleration",   "yAcceleration",   "laneId",           "precedingId",
    "followingId",     "leftPrecedingId", "leftAlongsideId", "leftFollowingId",  "rightPrecedingId",
    "rightAlongsideId", "rightFollowingId", "dhw",           "thw",              "ttc"};

// Tolerance for quantities that went through 6-significant-digit formatting.
double canonical_tol(double v) { return 1e-5 * std::max(1.0, std::abs(v)); }

std::string fmt_metric(const std::optional<double>& v) { return v ? csv::format_double(*v) : std::string("-1"); }

template <std::size_t N>
std::string header_line(const std::array<const char*, N>& cols) {
  std::string out;
  for (std::size_t i = 0; i < N; ++i) {
    if (i) out.push_back(',');
    out += cols[i];
  }
  out.push_back('\n');
  return out;
}

// Collects issues while turning one file set into a Recording.
class Loader {
 public:
  explicit Loader(const RecordingFileSet& paths) : paths_(paths) {}

  // Only the recording-meta table; used for detection inputs.
  ValidationReport run_meta(RecordingMeta* out) {
    if (!fs::is_regular_file(paths_.recording_meta_path)) {
      add(IssueKind::MissingFile, paths_.recording_meta_path.string(), 0, "", "file not found");
    } else {
      load_recording_meta();
    }
    if (report_.ok() && out) *out = std::move(rec_.meta);
    return std::move(report_);
  }

  ValidationReport run(Recording* out) {
    rec_.background_image_path = paths_.background_image_path;
    bool files_ok = true;
    for (const auto* p : {&paths_.recording_meta_path, &paths_.tracks_meta_path, &paths_.tracks_path}) {
      if (!fs::is_regular_file(*p)) {
        add(IssueKind::MissingFile, p->string(), 0, "", "file not found");
        files_ok = false;
      }
    }
    if (files_ok) {
      load_recording_meta();
      load_tracks_meta();
      load_tracks();
      cross_check();
    }
    if (report_.ok() && out) *out = std::move(rec_);
    return std::move(report_);
  }

 private:
  struct MetaRow {
    std::size_t line = 0;
    long long num_frames = 0, initial_frame = 0, final_frame = 0, num_lane_changes = 0;
  };

  const RecordingFileSet& paths_;
  ValidationReport report_;
  Recording rec_;
  bool meta_ok_ = false;
  std::unordered_map<int, std::size_t> index_;  // track id -> position in rec_.tracks
  std::vector<MetaRow> meta_rows_;
  std::vector<bool> seen_rows_;
  std::vector<std::vector<std::uint32_t>> lines_;  // source line of each state, parallel to rec_.surround

  void add(IssueKind k, std::string file, std::size_t row, std::string col, std::string msg) {
    report_.issues.push_back({k, std::move(file), row, std::move(col), std::move(msg)});
  }

  template <std::size_t N>
  bool require_columns(const csv::Document& doc, const std::array<const char*, N>& cols, const std::string& file,
                       std::array<std::size_t, N>& idx) {
    bool ok = true;
    for (std::size_t i = 0; i < N; ++i) {
      auto c = doc.column(cols[i]);
      if (!c) {
        add(IssueKind::MissingColumn, file, 1, cols[i], "missing column");
        ok = false;
      } else {
        idx[i] = *c;
      }
    }
    return ok;
  }

  // Field access with type checks; failures are recorded and reported as nullopt.
  struct Row {
    Loader& self;
    const csv::Document& doc;
    const std::string& file;
    bool ok = true;

    std::string_view raw(std::size_t col, const char* name) {
      const auto& f = doc.fields();
      if (col >= f.size()) {
        self.add(IssueKind::TypeMismatch, file, doc.line(), name, "missing field");
        ok = false;
        return {};
      }
      return f[col];
    }
    long long integer(std::size_t col, const char* name) {
      auto s = raw(col, name);
      if (!ok) return 0;
      auto v = csv::parse_int(s);
      if (!v) {
        self.add(IssueKind::TypeMismatch, file, doc.line(), name, "expected integer, got '" + std::string(s) + "'");
        ok = false;
        return 0;
      }
      return *v;
    }
    double real(std::size_t col, const char* name) {
      auto s = raw(col, name);
      if (!ok) return 0;
      auto v = csv::parse_double(s);
      if (!v) {
        self.add(IssueKind::TypeMismatch, file, doc.line(), name, "expected number, got '" + std::string(s) + "'");
        ok = false;
        return 0;
      }
      return *v;
    }
    std::vector<double> list(std::size_t col, const char* name) {
      auto s = raw(col, name);
      if (!ok) return {};
      auto v = csv::parse_list(s);
      if (!v) {
        self.add(IssueKind::TypeMismatch, file, doc.line(), name, "expected ';'-separated numbers");
        ok = false;
        return {};
      }
      return *v;
    }
  };

  void load_recording_meta() {
    const std::string file = paths_.recording_meta_path.string();
    csv::Document doc(csv::read_file(paths_.recording_meta_path));
    std::array<std::size_t, kRecordingMetaColumns.size()> c{};
    if (!require_columns(doc, kRecordingMetaColumns, file, c)) return;
    if (!doc.next()) {
      add(IssueKind::InvariantViolation, file, 0, "", "no data row");
      return;
    }
    Row r{*this, doc, file};
    auto& m = rec_.meta;
    m.recording_id = static_cast<int>(r.integer(c[0], kRecordingMetaColumns[0]));
    m.location_id = static_cast<int>(r.integer(c[1], kRecordingMetaColumns[1]));
    m.frame_rate = r.real(c[2], kRecordingMetaColumns[2]);
    m.duration = r.real(c[3], kRecordingMetaColumns[3]);
    m.upper_lane_markings = r.list(c[4], kRecordingMetaColumns[4]);
    m.lower_lane_markings = r.list(c[5], kRecordingMetaColumns[5]);
    for (double v : r.list(c[6], kRecordingMetaColumns[6])) {
      m.speed_limits.push_back(v == -1.0 ? std::nullopt : std::optional<double>(v));
    }
    const std::size_t line = doc.line();
    if (doc.next()) add(IssueKind::InvariantViolation, file, doc.line(), "", "more than one recording row");
    if (!r.ok) return;
    for (auto& msg : check_invariants(m)) add(IssueKind::InvariantViolation, file, line, "", std::move(msg));
    meta_ok_ = report_.ok();
  }

  void load_tracks_meta() {
    const std::string file = paths_.tracks_meta_path.string();
    csv::Document doc(csv::read_file(paths_.tracks_meta_path));
    std::array<std::size_t, kTracksMetaColumns.size()> c{};
    if (!require_columns(doc, kTracksMetaColumns, file, c)) return;
    while (doc.next()) {
      Row r{*this, doc, file};
      Track t;
      MetaRow mr;
      mr.line = doc.line();
      t.track_id = static_cast<int>(r.integer(c[0], "id"));
      t.length = r.real(c[1], "length");
      t.width = r.real(c[2], "width");
      const auto cls_text = r.raw(c[3], "class");
      const long long dir = r.integer(c[4], "drivingDirection");
      t.mean_speed = r.real(c[5], "meanSpeed");
      mr.num_frames = r.integer(c[6], "numFrames");
      mr.initial_frame = r.integer(c[7], "initialFrame");
      mr.final_frame = r.integer(c[8], "finalFrame");
      mr.num_lane_changes = r.integer(c[9], "numLaneChanges");
      if (!r.ok) continue;
      if (auto cls = parse_vehicle_class(cls_text)) {
        t.vehicle_class = *cls;
      } else {
        add(IssueKind::TypeMismatch, file, mr.line, "class", "unknown vehicle class '" + std::string(cls_text) + "'");
        continue;
      }
      if (dir != 1 && dir != 2) {
        add(IssueKind::TypeMismatch, file, mr.line, "drivingDirection", "expected 1 or 2");
        continue;
      }
      t.direction = static_cast<DrivingDirection>(dir);
      if (t.track_id < 1) add(IssueKind::InvariantViolation, file, mr.line, "id", "track ids start at 1");
      if (!(t.length > 0) || !(t.width > 0)) {
        add(IssueKind::InvariantViolation, file, mr.line, "length", "extents must be positive");
      }
      if (index_.contains(t.track_id)) {
        add(IssueKind::DuplicateId, file, mr.line, "id", "duplicate track id " + std::to_string(t.track_id));
        continue;
      }
      index_.emplace(t.track_id, rec_.tracks.size());
      rec_.tracks.push_back(std::move(t));
      meta_rows_.push_back(mr);
    }
    rec_.surround.resize(rec_.tracks.size());
    lines_.resize(rec_.tracks.size());
    // numFrames is only a hint here; it is cross-checked after the tracks table.
    for (std::size_t i = 0; i < rec_.tracks.size(); ++i) {
      const auto n = static_cast<std::size_t>(std::clamp<long long>(meta_rows_[i].num_frames, 0, 1 << 20));
      rec_.tracks[i].states.reserve(n);
      rec_.surround[i].reserve(n);
      lines_[i].reserve(n);
    }
  }

  void load_tracks() {
    const std::string file = paths_.tracks_path.string();
    auto doc = csv::Document::open(paths_.tracks_path);
    std::array<std::size_t, kTracksColumns.size()> c{};
    if (!require_columns(doc, kTracksColumns, file, c)) return;
    const int max_frame = meta_ok_ ? rec_.meta.max_frame() : -1;
    std::vector<bool> broken(rec_.tracks.size(), false);
    while (doc.next()) {
      Row r{*this, doc, file};
      KinematicState s;
      SurroundFrame sf;
      s.frame = static_cast<int>(r.integer(c[0], "frame"));
      const int id = static_cast<int>(r.integer(c[1], "id"));
      s.x = r.real(c[2], "x");
      s.y = r.real(c[3], "y");
      s.vx = r.real(c[4], "xVelocity");
      s.vy = r.real(c[5], "yVelocity");
      s.ax = r.real(c[6], "xAcceleration");
      s.ay = r.real(c[7], "yAcceleration");
      s.lane_id = static_cast<int>(r.integer(c[8], "laneId"));
      int* slots[8] = {&sf.preceding,       &sf.following,       &sf.left_preceding,  &sf.left_alongside,
                       &sf.left_following, &sf.right_preceding, &sf.right_alongside, &sf.right_following};
      for (std::size_t k = 0; k < 8; ++k) *slots[k] = static_cast<int>(r.integer(c[9 + k], kTracksColumns[9 + k]));
      const double dhw = r.real(c[17], "dhw");
      const double thw = r.real(c[18], "thw");
      const double ttc = r.real(c[19], "ttc");
      if (!r.ok) continue;

      const std::size_t line = doc.line();
      auto it = index_.find(id);
      if (it == index_.end()) {
        add(IssueKind::DanglingReference, file, line, "id", "track " + std::to_string(id) + " not in tracks meta");
        continue;
      }
      const std::size_t ti = it->second;
      auto& track = rec_.tracks[ti];
      if (broken[ti]) continue;
      if (!track.states.empty() && s.frame != track.states.back().frame + 1) {
        add(IssueKind::NonMonotoneFrames, file, line, "frame",
            "track " + std::to_string(id) + ": frame " + std::to_string(s.frame) + " follows " +
                std::to_string(track.states.back().frame));
        broken[ti] = true;
        continue;
      }
      if (s.frame < 0 || (max_frame >= 0 && s.frame > max_frame)) {
        add(IssueKind::InvariantViolation, file, line, "frame", "frame outside recording");
      }
      if (meta_ok_) check_lane(s, track.direction, line);

      sf.frame = s.frame;
      sf.track_id = id;
      for (std::size_t k = 0; k < 8; ++k) {
        if (*slots[k] == id) add(IssueKind::InvariantViolation, file, line, kTracksColumns[9 + k], "neighbor equals ego");
      }
      const std::pair<double, std::optional<double>*> metrics[] = {{dhw, &sf.dhw}, {thw, &sf.thw}, {ttc, &sf.ttc}};
      for (std::size_t k = 0; k < 3; ++k) {
        const double v = metrics[k].first;
        if (v == -1.0) continue;
        if (v < 0) {
          add(IssueKind::InvariantViolation, file, line, kTracksColumns[17 + k], "negative metric");
        } else if (sf.preceding == 0) {
          add(IssueKind::InvariantViolation, file, line, kTracksColumns[17 + k], "metric defined without preceding");
        }
        *metrics[k].second = v;
      }
      track.states.push_back(s);
      rec_.surround[ti].push_back(sf);
      lines_[ti].push_back(static_cast<std::uint32_t>(line));
    }
  }

  void check_lane(const KinematicState& s, DrivingDirection dir, std::size_t line) {
    const auto& m = rec_.meta.markings(dir);
    const int expected = lane_id_of(s.y, m).value_or(0);
    if (expected == s.lane_id) return;
    // Accept the neighbouring lane when y sits on a marking up to formatting precision.
    const double tol = canonical_tol(s.y);
    if (lane_id_of(s.y - tol, m).value_or(0) == s.lane_id || lane_id_of(s.y + tol, m).value_or(0) == s.lane_id) {
      return;
    }
    add(IssueKind::InvariantViolation, paths_.tracks_path.string(), line, "laneId",
        "laneId " + std::to_string(s.lane_id) + " inconsistent with y (expected " + std::to_string(expected) + ")");
  }

  void cross_check() {
    const std::string tfile = paths_.tracks_path.string();
    std::vector<Issue> refs;
    for (std::size_t i = 0; i < rec_.surround.size(); ++i) {
      for (std::size_t j = 0; j < rec_.surround[i].size(); ++j) {
        const auto& sf = rec_.surround[i][j];
        const int slots[8] = {sf.preceding,      sf.following,       sf.left_preceding,  sf.left_alongside,
                              sf.left_following, sf.right_preceding, sf.right_alongside, sf.right_following};
        for (std::size_t k = 0; k < 8; ++k) {
          const int other = slots[k];
          if (other == 0 || other == sf.track_id) continue;
          auto it = index_.find(other);
          if (it == index_.end()) {
            refs.push_back({IssueKind::DanglingReference, tfile, lines_[i][j], kTracksColumns[9 + k],
                            "track " + std::to_string(other) + " does not exist"});
          } else if (!rec_.tracks[it->second].alive_at(sf.frame)) {
            refs.push_back({IssueKind::InvariantViolation, tfile, lines_[i][j], kTracksColumns[9 + k],
                            "track " + std::to_string(other) + " not alive at frame " + std::to_string(sf.frame)});
          }
        }
      }
    }
    // Report in file order, as a single pass over the rows would.
    std::stable_sort(refs.begin(), refs.end(), [](const Issue& a, const Issue& b) { return a.row < b.row; });
    for (auto& r : refs) report_.issues.push_back(std::move(r));
    const std::string mfile = paths_.tracks_meta_path.string();
    for (std::size_t i = 0; i < rec_.tracks.size(); ++i) {
      const auto& t = rec_.tracks[i];
      const auto& mr = meta_rows_[i];
      if (t.states.empty()) {
        add(IssueKind::InvariantViolation, mfile, mr.line, "numFrames", "track has no frames");
        continue;
      }
      auto check = [&](long long stored, long long actual, const char* col) {
        if (stored != actual) {
          add(IssueKind::InvariantViolation, mfile, mr.line, col,
              std::string(col) + " is " + std::to_string(stored) + ", tracks table implies " + std::to_string(actual));
        }
      };
      check(mr.num_frames, static_cast<long long>(t.states.size()), "numFrames");
      check(mr.initial_frame, t.first_frame(), "initialFrame");
      check(mr.final_frame, t.last_frame(), "finalFrame");
      check(mr.num_lane_changes, count_lane_transitions(t.states), "numLaneChanges");
      const double mean = compute_mean_speed(t.states);
      if (std::abs(mean - t.mean_speed) > canonical_tol(mean)) {
        add(IssueKind::InvariantViolation, mfile, mr.line, "meanSpeed",
            "meanSpeed " + csv::format_double(t.mean_speed) + " differs from recomputed " + csv::format_double(mean));
      }
    }
  }
};

}  // namespace

std::string_view to_string(IssueKind k) noexcept {
  switch (k) {
    case IssueKind::MissingFile: return "MissingFile";
    case IssueKind::MissingColumn: return "MissingColumn";
    case IssueKind::TypeMismatch: return "TypeMismatch";
    case IssueKind::DanglingReference: return "DanglingReference";
    case IssueKind::NonMonotoneFrames: return "NonMonotoneFrames";
    case IssueKind::InvariantViolation: return "InvariantViolation";
    case IssueKind::DuplicateId: return "DuplicateId";
  }
  return "Unknown";
}

std::string Issue::describe() const {
  std::string out(to_string(kind));
  out += ": " + file;
  if (row) out += ":" + std::to_string(row);
  if (!column.empty()) out += " [" + column + "]";
  out += " " + message;
  return out;
}

DatasetError::DatasetError(Issue issue) : std::runtime_error(issue.describe()), issue_(std::move(issue)) {}

std::string recording_prefix(int recording_id) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d", recording_id);
  return buf;
}

RecordingFileSet RecordingFileSet::in_directory(const fs::path& dir, int recording_id) {
  const std::string p = recording_prefix(recording_id);
  RecordingFileSet s;
  s.recording_meta_path = dir / (p + "_recordingMeta.csv");
  s.tracks_meta_path = dir / (p + "_tracksMeta.csv");
  s.tracks_path = dir / (p + "_tracks.csv");
  return s;
}

std::vector<int> discover_recordings(const fs::path& dir) {
  std::vector<int> ids;
  if (!fs::is_directory(dir)) return ids;
  static const std::regex pattern(R"((\d+)_recordingMeta\.csv)");
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && std::regex_match(name, m, pattern)) ids.push_back(std::stoi(m[1].str()));
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

Recording read_recording(const RecordingFileSet& paths) {
  Recording rec;
  auto report = Loader(paths).run(&rec);
  if (!report.ok()) throw DatasetError(report.issues.front());
  return rec;
}

ValidationReport validate(const RecordingFileSet& paths) { return Loader(paths).run(nullptr); }

RecordingMeta read_recording_meta(const fs::path& path) {
  RecordingFileSet paths;
  paths.recording_meta_path = path;
  RecordingMeta meta;
  auto report = Loader(paths).run_meta(&meta);
  if (!report.ok()) throw DatasetError(report.issues.front());
  return meta;
}

std::string format_recording_meta(const RecordingMeta& meta) {
  std::string out = header_line(kRecordingMetaColumns);
  std::vector<double> limits;
  for (const auto& l : meta.speed_limits) limits.push_back(l ? *l : -1.0);
  const std::string cells[] = {std::to_string(meta.recording_id),
                               std::to_string(meta.location_id),
                               csv::format_double(meta.frame_rate),
                               csv::format_double(meta.duration),
                               csv::format_list(meta.upper_lane_markings),
                               csv::format_list(meta.lower_lane_markings),
                               csv::format_list(limits)};
  csv::append_row(out, cells);
  return out;
}

std::string format_tracks_meta(std::span<const Track> tracks) {
  std::string out = header_line(kTracksMetaColumns);
  for (const auto& t : tracks) {
    const std::string cells[] = {std::to_string(t.track_id),
                                 csv::format_double(t.length),
                                 csv::format_double(t.width),
                                 std::string(to_string(t.vehicle_class)),
                                 std::to_string(static_cast<int>(t.direction)),
                                 csv::format_double(t.mean_speed),
                                 std::to_string(t.states.size()),
                                 std::to_string(t.states.empty() ? 0 : t.first_frame()),
                                 std::to_string(t.states.empty() ? 0 : t.last_frame()),
                                 std::to_string(count_lane_transitions(t.states))};
    csv::append_row(out, cells);
  }
  return out;
}

std::string format_tracks(std::span<const Track> tracks, std::span<const std::vector<SurroundFrame>> surround) {
  if (!surround.empty() && surround.size() != tracks.size()) {
    throw ContractViolation("format_tracks: surround must be empty or parallel to tracks");
  }
  std::string out = header_line(kTracksColumns);
  std::vector<std::string> cells(kTracksColumns.size());
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    const auto& t = tracks[i];
    if (!surround.empty() && surround[i].size() != t.states.size()) {
      throw ContractViolation("format_tracks: surround frames misaligned for track " + std::to_string(t.track_id));
    }
    for (std::size_t k = 0; k < t.states.size(); ++k) {
      const auto& s = t.states[k];
      const SurroundFrame sf = surround.empty() ? SurroundFrame{} : surround[i][k];
      cells[0] = std::to_string(s.frame);
      cells[1] = std::to_string(t.track_id);
      cells[2] = csv::format_double(s.x);
      cells[3] = csv::format_double(s.y);
      cells[4] = csv::format_double(s.vx);
      cells[5] = csv::format_double(s.vy);
      cells[6] = csv::format_double(s.ax);
      cells[7] = csv::format_double(s.ay);
      cells[8] = std::to_string(s.lane_id);
      const int ids[8] = {sf.preceding,      sf.following,       sf.left_preceding,  sf.left_alongside,
                          sf.left_following, sf.right_preceding, sf.right_alongside, sf.right_following};
      for (std::size_t j = 0; j < 8; ++j) cells[9 + j] = std::to_string(ids[j]);
      cells[17] = fmt_metric(sf.dhw);
      cells[18] = fmt_metric(sf.thw);
      cells[19] = fmt_metric(sf.ttc);
      csv::append_row(out, cells);
    }
  }
  return out;
}

RecordingFileSet write_recording(const fs::path& dir, const RecordingMeta& meta, std::span<const Track> tracks,
                                 std::span<const std::vector<SurroundFrame>> surround,
                                 std::optional<fs::path> background_image) {
  auto paths = RecordingFileSet::in_directory(dir, meta.recording_id);
  paths.background_image_path = std::move(background_image);
  csv::write_file(paths.recording_meta_path, format_recording_meta(meta));
  csv::write_file(paths.tracks_meta_path, format_tracks_meta(tracks));
  csv::write_file(paths.tracks_path, format_tracks(tracks, surround));
  return paths;
}

}  // namespace trajkit
