#include "trajkit/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <regex>
#include <set>
#include <thread>

#include "trajkit/csv.hpp"
#include "trajkit/dataset_io.hpp"
#include "trajkit/statsgen.hpp"
#include "trajkit/surround.hpp"
#include "trajkit/synthgen.hpp"

namespace trajkit {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;
using nlohmann::json;

void StatsConfig::validate() const {
  if (!(speed_bin > 0) || !(truck_window > 0) || !(cut_in_speed_bin > 0) || !(thw_bin > 0)) {
    throw ContractViolation("StatsConfig: bin widths must be positive");
  }
}

void PipelineConfig::validate() const {
  tracker.validate();
  smoother.validate();
  maneuver.validate();
  stats.validate();
  if (!(fit.min_duration > 0) || !(fit.max_duration >= fit.min_duration) || !(fit.duration_step > 0) ||
      !(fit.time_tolerance > 0) || fit.max_iterations < 1 || !(fit.longitudinal_weight >= 0) ||
      !(fit.window_padding >= 0)) {
    throw ContractViolation("FitConfig: invalid parameters");
  }
  if (jobs < 1) throw ContractViolation("PipelineConfig: jobs must be >= 1");
}

namespace {

// Reads the keys of one section, rejecting unknown ones.
class Section {
 public:
  Section(const json& root, const char* name) : name_(name) {
    if (!root.contains(name)) return;
    node_ = &root.at(name);
    if (!node_->is_object()) throw ConfigError(std::string("config: '") + name + "' must be an object");
  }

  template <typename T>
  void read(const char* key, T& target) {
    seen_.insert(key);
    if (!node_ || !node_->contains(key)) return;
    try {
      target = node_->at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(std::string("config: ") + name_ + "." + key + " has the wrong type");
    }
  }

  void finish() const {
    if (!node_) return;
    for (const auto& [k, v] : node_->items()) {
      if (!seen_.count(k)) throw ConfigError(std::string("config: unknown key ") + name_ + "." + k);
    }
  }

 private:
  const char* name_;
  const json* node_ = nullptr;
  std::set<std::string> seen_;
};

}  // namespace

PipelineConfig parse_pipeline_config(const std::string& json_text, PipelineConfig base) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON at byte ") + std::to_string(e.byte));
  }
  if (!root.is_object()) throw ConfigError("config: top level must be an object");
  static const std::set<std::string> top = {"input", "output", "jobs", "seed", "tracker",
                                            "smoother", "maneuver", "fit", "stats"};
  for (const auto& [k, v] : root.items()) {
    if (!top.count(k)) throw ConfigError("config: unknown key " + k);
  }
  auto& c = base;
  try {
    if (root.contains("input")) c.input = root.at("input").get<std::string>();
    if (root.contains("output")) c.output = root.at("output").get<std::string>();
    if (root.contains("jobs")) c.jobs = root.at("jobs").get<int>();
    if (root.contains("seed")) c.seed = root.at("seed").get<std::uint64_t>();
  } catch (const json::exception&) {
    throw ConfigError("config: input/output/jobs/seed have the wrong type");
  }

  Section t(root, "tracker");
  t.read("gateRadius", c.tracker.gate_radius);
  t.read("minHits", c.tracker.min_hits_to_confirm);
  t.read("maxCoast", c.tracker.max_coast);
  t.finish();

  Section s(root, "smoother");
  s.read("measurementSigma", c.smoother.measurement_sigma);
  s.read("jerkSigma", c.smoother.jerk_sigma);
  s.read("initialVelocitySigma", c.smoother.initial_velocity_sigma);
  s.read("initialAccelSigma", c.smoother.initial_accel_sigma);
  s.finish();

  Section m(root, "maneuver");
  m.read("followingThwMax", c.maneuver.following_thw_max);
  m.read("followingHysteresis", c.maneuver.following_hysteresis);
  m.read("criticalTtcMax", c.maneuver.critical_ttc_max);
  m.read("criticalThwMax", c.maneuver.critical_thw_max);
  m.read("laneChangeMinDwell", c.maneuver.lane_change_min_dwell);
  m.read("lateralSettleSpeed", c.maneuver.lateral_settle_speed);
  m.finish();

  Section f(root, "fit");
  f.read("longitudinalWeight", c.fit.longitudinal_weight);
  f.read("minDuration", c.fit.min_duration);
  f.read("maxDuration", c.fit.max_duration);
  f.read("durationStep", c.fit.duration_step);
  f.read("timeTolerance", c.fit.time_tolerance);
  f.read("maxIterations", c.fit.max_iterations);
  f.read("minSamples", c.fit.min_samples);
  f.read("minLateralSpan", c.fit.min_lateral_span);
  f.read("windowPadding", c.fit.window_padding);
  f.finish();

  Section st(root, "stats");
  st.read("speedBin", c.stats.speed_bin);
  st.read("truckWindow", c.stats.truck_window);
  st.read("cutInSpeedBin", c.stats.cut_in_speed_bin);
  st.read("thwBin", c.stats.thw_bin);
  st.finish();
  return c;
}

PipelineConfig load_pipeline_config(const fs::path& path, PipelineConfig base) {
  std::string text;
  try {
    text = csv::read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError("config: cannot read " + path.string());
  }
  return parse_pipeline_config(text, std::move(base));
}

ojson ErrorReport::to_json() const {
  ojson j;
  j["kind"] = kind;
  j["message"] = message;
  if (recording_id) j["recordingId"] = *recording_id;
  if (!file.empty()) j["file"] = file;
  if (row > 0) j["row"] = row;
  if (!column.empty()) j["column"] = column;
  return j;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const auto workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

fs::path detections_path(const fs::path& dir, int recording_id) {
  return dir / (recording_prefix(recording_id) + "_detections.csv");
}

std::vector<int> discover_detection_sets(const fs::path& dir) {
  std::vector<int> ids;
  if (!fs::is_directory(dir)) return ids;
  static const std::regex pattern(R"((\d+)_detections\.csv)");
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && std::regex_match(name, m, pattern)) ids.push_back(std::stoi(m[1].str()));
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

namespace {

ErrorReport from_issue(const Issue& i, std::optional<int> rec) {
  return {std::string(to_string(i.kind)), i.message, rec, i.file, i.row, i.column};
}

ErrorReport simple_error(std::string kind, std::string message, std::optional<int> rec = std::nullopt,
                         std::string file = {}) {
  return {std::move(kind), std::move(message), rec, std::move(file), 0, {}};
}

// Converts whatever a per-recording stage throws into a report.
ErrorReport describe_exception(std::optional<int> rec) {
  try {
    throw;
  } catch (const DatasetError& e) {
    return from_issue(e.issue(), rec);
  } catch (const ScriptError& e) {
    ErrorReport r = simple_error("ScriptError", e.what(), rec);
    r.column = e.location();
    return r;
  } catch (const ContractViolation& e) {
    return simple_error("ContractViolation", e.what(), rec);
  } catch (const NumericalFailure& e) {
    return simple_error("NumericalFailure", e.what(), rec);
  } catch (const fs::filesystem_error& e) {
    return simple_error("IoError", e.what(), rec, e.path1().string());
  } catch (const std::exception& e) {
    return simple_error("InternalError", e.what(), rec);
  }
}

bool require_dir(const fs::path& dir, const char* what, CommandResult& result) {
  if (dir.empty()) {
    result.errors.push_back(simple_error("UsageError", std::string("no ") + what + " directory given"));
    return false;
  }
  return true;
}

ojson fit_counts(const std::vector<EpisodeFit>& fits) {
  std::map<std::string, long> counts;
  for (const auto& f : fits) ++counts[f.status];
  ojson j = ojson::object();
  for (const auto& [k, v] : counts) j[k] = v;
  return j;
}

// ---------------------------------------------------------------- track

struct TrackOutcome {
  std::optional<ErrorReport> error;
  ojson summary;
};

TrackOutcome track_one(const PipelineConfig& cfg, int id) {
  TrackOutcome out;
  try {
    const auto meta = read_recording_meta(cfg.input / (recording_prefix(id) + "_recordingMeta.csv"));
    if (meta.recording_id != id) {
      throw DatasetError({IssueKind::InvariantViolation, recording_prefix(id) + "_recordingMeta.csv", 2, "id",
                          "recording id does not match the file name"});
    }
    const auto det_path = detections_path(cfg.input, id);
    const auto frames = parse_detections(csv::read_file(det_path), det_path.string(), meta.max_frame() + 1);

    TrackerConfig tcfg = cfg.tracker;
    tcfg.frame_rate = meta.frame_rate;
    SmootherConfig scfg = cfg.smoother;
    scfg.dt = 1.0 / meta.frame_rate;
    const auto raw = build_tracks(frames, tcfg);

    std::vector<Track> tracks;
    tracks.reserve(raw.size());
    ojson diag = ojson::array();
    for (const auto& r : raw) {
      SmoothingDiagnostics d;
      tracks.push_back(smooth_track(r, meta, scfg, &d));
      ojson jd;
      jd["trackId"] = r.track_id;
      jd["measured"] = r.measured_count();
      jd["residualRms"] = std::stod(csv::format_double(d.residual_rms));
      jd["minEigenvalue"] = std::stod(csv::format_double(d.min_eigenvalue));
      jd["usedPseudoInverse"] = d.used_pseudo_inverse;
      diag.push_back(jd);
    }
    const auto surround = compute_surround(tracks, meta);
    write_recording(cfg.output, meta, tracks, surround);

    std::size_t detections = 0;
    for (const auto& f : frames) detections += f.size();
    ojson report;
    report["recordingId"] = id;
    report["detections"] = detections;
    report["tracks"] = tracks.size();
    report["smoothing"] = diag;
    csv::write_file(cfg.output / (recording_prefix(id) + "_trackReport.json"), report.dump(2) + "\n");

    out.summary["recordingId"] = id;
    out.summary["detections"] = detections;
    out.summary["tracks"] = tracks.size();
  } catch (...) {
    out.error = describe_exception(id);
  }
  return out;
}

// ---------------------------------------------------------------- extract / stats

struct Analysis {
  std::optional<ErrorReport> error;
  Recording rec;
  std::vector<ManeuverEpisode> episodes;
  std::vector<EpisodeFit> fits;
  std::vector<CutInScenario> cut_ins;
};

Analysis analyze(const PipelineConfig& cfg, int id, bool with_fits) {
  Analysis a;
  try {
    a.rec = read_recording(RecordingFileSet::in_directory(cfg.input, id));
    const auto& tracks = a.rec.tracks;
    for (std::size_t i = 0; i < tracks.size(); ++i) {
      auto eps = detect_maneuvers(tracks[i], a.rec.surround[i], cfg.maneuver);
      a.episodes.insert(a.episodes.end(), eps.begin(), eps.end());
    }
    std::vector<ManeuverEpisode> lane_changes;
    std::copy_if(a.episodes.begin(), a.episodes.end(), std::back_inserter(lane_changes),
                 [](const ManeuverEpisode& e) { return e.kind == ManeuverKind::LaneChange; });
    if (with_fits) {
      std::unordered_map<int, std::size_t> index;
      for (std::size_t i = 0; i < tracks.size(); ++i) index.emplace(tracks[i].track_id, i);
      for (const auto& e : lane_changes) {
        EpisodeFit f;
        f.track_id = e.track_id;
        f.crossing_frame = e.crossing_frame;
        try {
          f.fit = fit_episode(tracks[index.at(e.track_id)], e, a.rec.meta, cfg.fit);
        } catch (const InsufficientData&) {
          f.status = "InsufficientData";
        } catch (const DegenerateEpisode&) {
          f.status = "DegenerateEpisode";
        } catch (const NumericalFailure&) {
          f.status = "NumericalFailure";
        }
        a.fits.push_back(std::move(f));
      }
    }
    a.cut_ins = extract_cut_ins(lane_changes, tracks, a.rec.surround, a.rec.meta);
  } catch (...) {
    a.error = describe_exception(id);
  }
  return a;
}

ojson summary_json(const ManeuverSummary& s) {
  ojson j;
  ojson counts = ojson::object();
  for (const auto& [k, v] : s.episode_counts) counts[std::string(to_string(k))] = v;
  j["episodes"] = counts;
  j["laneChangesComplete"] = s.lane_changes_complete;
  j["laneChangesPartial"] = s.lane_changes_partial;
  j["vehicles"] = s.vehicles;
  j["laneChangeRate"] = std::stod(csv::format_double(s.lane_change_rate));
  return j;
}

// Writes the statistics over all successfully analyzed recordings.
ojson write_stats(const PipelineConfig& cfg, const std::vector<Analysis>& all) {
  std::vector<Track> tracks;
  std::vector<ManeuverEpisode> episodes;
  std::vector<CutInScenario> cut_ins;
  long vehicles = 0;
  for (const auto& a : all) {
    if (a.error) continue;
    tracks.insert(tracks.end(), a.rec.tracks.begin(), a.rec.tracks.end());
    episodes.insert(episodes.end(), a.episodes.begin(), a.episodes.end());
    cut_ins.insert(cut_ins.end(), a.cut_ins.begin(), a.cut_ins.end());
    vehicles += static_cast<long>(a.rec.tracks.size());
    const auto ratio = truck_ratio_over_time(a.rec.tracks, a.rec.meta, cfg.stats.truck_window);
    csv::write_file(cfg.output / (recording_prefix(a.rec.meta.recording_id) + "_truckRatio.csv"),
                    format_ratio_series_csv(ratio, cfg.stats.truck_window));
  }
  csv::write_file(cfg.output / "meanSpeedHistogram.csv",
                  format_histogram_csv(mean_speed_histogram(tracks, cfg.stats.speed_bin)));
  const auto thw = cut_in_thw_stats(cut_ins, cfg.stats.cut_in_speed_bin, cfg.stats.thw_bin);
  csv::write_file(cfg.output / "cutInThwHistogram.csv", format_histogram_csv(thw.entry_thw));
  csv::write_file(cfg.output / "cutInThwBySpeed.csv", format_decile_band_csv(thw.thw_vs_speed));
  ojson s = summary_json(maneuver_summary(episodes, vehicles));
  s["cutIns"] = cut_ins.size();
  csv::write_file(cfg.output / "summary.json", s.dump(2) + "\n");
  return s;
}

CommandResult run_analysis(const PipelineConfig& cfg, bool full) {
  CommandResult result;
  if (!require_dir(cfg.input, "input", result) || !require_dir(cfg.output, "output", result)) return result;
  const auto ids = discover_recordings(cfg.input);
  if (ids.empty()) {
    result.errors.push_back(simple_error("EmptyInput", "no recordings found in " + cfg.input.string()));
    return result;
  }
  std::vector<Analysis> all(ids.size());
  parallel_for(ids.size(), cfg.jobs, [&](std::size_t i) {
    all[i] = analyze(cfg, ids[i], full);
    if (!full || all[i].error) return;
    const int id = ids[i];
    const auto& a = all[i];
    const auto prefix = cfg.output / recording_prefix(id);
    try {
      csv::write_file(prefix.string() + "_episodes.csv", format_episodes_csv(id, a.episodes));
      csv::write_file(prefix.string() + "_episodes.json", format_episodes_json(id, a.episodes));
      csv::write_file(prefix.string() + "_fits.csv", format_fits_csv(id, a.fits));
      csv::write_file(prefix.string() + "_fits.json", format_fits_json(id, a.fits));
      csv::write_file(prefix.string() + "_cutIns.csv", format_cut_ins_csv(id, a.cut_ins));
      csv::write_file(prefix.string() + "_cutIns.json", format_cut_ins_json(id, a.cut_ins));
    } catch (...) {
      all[i].error = describe_exception(id);
    }
  });

  ojson recs = ojson::array();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto& a = all[i];
    ojson r;
    r["recordingId"] = ids[i];
    if (a.error) {
      r["status"] = "failed";
      result.errors.push_back(*a.error);
    } else {
      r["status"] = "ok";
      r["tracks"] = a.rec.tracks.size();
      r["episodes"] = a.episodes.size();
      if (full) r["fits"] = fit_counts(a.fits);
      r["cutIns"] = a.cut_ins.size();
    }
    recs.push_back(r);
  }
  try {
    result.summary["statistics"] = write_stats(cfg, all);
  } catch (...) {
    result.errors.push_back(describe_exception(std::nullopt));
  }
  result.summary["recordings"] = recs;
  return result;
}

// ---------------------------------------------------------------- synth

std::string format_truth_lane_changes_csv(int recording_id, std::span<const TruthLaneChange> lcs) {
  std::string out =
      "recordingId,trackId,crossingFrame,t0,dStart,dEnd,vStart,vEnd,duration,side\n";
  for (const auto& lc : lcs) {
    const auto& p = lc.params;
    const std::string cells[] = {std::to_string(recording_id),  std::to_string(lc.episode.track_id),
                                 std::to_string(lc.episode.crossing_frame), csv::format_double(lc.t0),
                                 csv::format_double(p.d_start),   csv::format_double(p.d_end),
                                 csv::format_double(p.v_start),   csv::format_double(p.v_end),
                                 csv::format_double(p.duration),  std::string(to_string(p.side))};
    csv::append_row(out, cells);
  }
  return out;
}

struct SynthOutcome {
  std::optional<ErrorReport> error;
  int recording_id = 0;
  ojson summary;
};

SynthOutcome synth_one(const PipelineConfig& cfg, const fs::path& script_path) {
  SynthOutcome out;
  try {
    auto script = load_script(script_path);
    if (cfg.seed) script.seed = *cfg.seed;
    const int id = script.meta.recording_id;
    out.recording_id = id;
    const auto truth = generate_truth(script, cfg.maneuver);
    const auto detections = corrupt(truth.tracks, truth.meta, script.noise, script.seed, script.road_length);

    csv::write_file(cfg.output / (recording_prefix(id) + "_recordingMeta.csv"), format_recording_meta(truth.meta));
    csv::write_file(detections_path(cfg.output, id), format_detections(detections));

    const fs::path truth_dir = cfg.output / "truth";
    const auto surround = compute_surround(truth.tracks, truth.meta);
    write_recording(truth_dir, truth.meta, truth.tracks, surround);
    std::vector<ManeuverEpisode> episodes;
    for (const auto& lc : truth.lane_changes) episodes.push_back(lc.episode);
    const auto prefix = (truth_dir / recording_prefix(id)).string();
    csv::write_file(prefix + "_episodes.csv", format_episodes_csv(id, episodes));
    csv::write_file(prefix + "_laneChanges.csv", format_truth_lane_changes_csv(id, truth.lane_changes));
    csv::write_file(prefix + "_cutIns.csv", format_cut_ins_csv(id, truth.cut_ins));

    std::size_t n = 0;
    for (const auto& f : detections) n += f.size();
    out.summary["recordingId"] = id;
    out.summary["seed"] = script.seed;
    out.summary["vehicles"] = truth.tracks.size();
    out.summary["detections"] = n;
    out.summary["laneChanges"] = truth.lane_changes.size();
    out.summary["cutIns"] = truth.cut_ins.size();
  } catch (...) {
    out.error = describe_exception(std::nullopt);
    if (out.error->file.empty()) out.error->file = script_path.string();
  }
  return out;
}

}  // namespace

CommandResult run_track(const PipelineConfig& cfg) {
  CommandResult result;
  if (!require_dir(cfg.input, "input", result) || !require_dir(cfg.output, "output", result)) return result;
  const auto ids = discover_detection_sets(cfg.input);
  if (ids.empty()) {
    result.errors.push_back(simple_error("EmptyInput", "no detection files found in " + cfg.input.string()));
    return result;
  }
  std::vector<TrackOutcome> outcomes(ids.size());
  parallel_for(ids.size(), cfg.jobs, [&](std::size_t i) { outcomes[i] = track_one(cfg, ids[i]); });
  ojson recs = ojson::array();
  for (auto& o : outcomes) {
    if (o.error) {
      result.errors.push_back(*o.error);
    } else {
      recs.push_back(o.summary);
    }
  }
  result.summary["recordings"] = recs;
  return result;
}

CommandResult run_extract(const PipelineConfig& cfg) { return run_analysis(cfg, true); }

CommandResult run_stats(const PipelineConfig& cfg) { return run_analysis(cfg, false); }

CommandResult run_synth(const PipelineConfig& cfg) {
  CommandResult result;
  if (!require_dir(cfg.input, "input", result) || !require_dir(cfg.output, "output", result)) return result;
  std::vector<fs::path> scripts;
  if (fs::is_directory(cfg.input)) {
    for (const auto& e : fs::directory_iterator(cfg.input)) {
      if (e.is_regular_file() && e.path().extension() == ".json") scripts.push_back(e.path());
    }
    std::sort(scripts.begin(), scripts.end());
  } else if (fs::is_regular_file(cfg.input)) {
    scripts.push_back(cfg.input);
  }
  if (scripts.empty()) {
    result.errors.push_back(simple_error("EmptyInput", "no scenario scripts at " + cfg.input.string()));
    return result;
  }
  std::vector<SynthOutcome> outcomes(scripts.size());
  parallel_for(scripts.size(), cfg.jobs, [&](std::size_t i) { outcomes[i] = synth_one(cfg, scripts[i]); });
  std::map<int, std::string> seen;
  ojson recs = ojson::array();
  for (std::size_t i = 0; i < scripts.size(); ++i) {
    auto& o = outcomes[i];
    if (o.error) {
      result.errors.push_back(*o.error);
      continue;
    }
    if (auto [it, fresh] = seen.emplace(o.recording_id, scripts[i].string()); !fresh) {
      result.errors.push_back(simple_error("DuplicateId", "recording id also produced by " + it->second,
                                           o.recording_id, scripts[i].string()));
      continue;
    }
    recs.push_back(o.summary);
  }
  result.summary["recordings"] = recs;
  return result;
}

CommandResult run_validate(const PipelineConfig& cfg) {
  CommandResult result;
  if (!require_dir(cfg.input, "input", result)) return result;
  std::set<int> found;
  if (fs::is_directory(cfg.input)) {
    static const std::regex pattern(R"((\d+)_(recordingMeta|tracksMeta|tracks)\.csv)");
    for (const auto& entry : fs::directory_iterator(cfg.input)) {
      std::smatch m;
      const std::string name = entry.path().filename().string();
      if (entry.is_regular_file() && std::regex_match(name, m, pattern)) found.insert(std::stoi(m[1].str()));
    }
  }
  if (found.empty()) {
    result.errors.push_back(simple_error("EmptyInput", "no recordings found in " + cfg.input.string()));
    return result;
  }
  const std::vector<int> ids(found.begin(), found.end());
  std::vector<ValidationReport> reports(ids.size());
  parallel_for(ids.size(), cfg.jobs, [&](std::size_t i) {
    try {
      reports[i] = validate(RecordingFileSet::in_directory(cfg.input, ids[i]));
    } catch (...) {
      const auto e = describe_exception(ids[i]);
      reports[i].issues.push_back({IssueKind::InvariantViolation, e.file, 0, "", e.message});
    }
  });
  ojson recs = ojson::array();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    ojson r;
    r["recordingId"] = ids[i];
    r["issues"] = reports[i].issues.size();
    recs.push_back(r);
    for (const auto& issue : reports[i].issues) result.errors.push_back(from_issue(issue, ids[i]));
  }
  result.summary["recordings"] = recs;
  return result;
}

}  // namespace trajkit
