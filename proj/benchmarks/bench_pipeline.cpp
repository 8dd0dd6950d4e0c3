#include <benchmark/benchmark.h>

#include <algorithm>
#include <filesystem>
#include <random>

#include "trajkit/dataset_io.hpp"
#include "trajkit/kinematics.hpp"
#include "trajkit/lane_change_fit.hpp"
#include "trajkit/surround.hpp"
#include "trajkit/synthgen.hpp"
#include "trajkit/track_builder.hpp"

namespace {

using namespace trajkit;
namespace fs = std::filesystem;

// Dense traffic: six lane streams, one car per stream every 0.8 s.
ScenarioScript traffic(int vehicles, double duration) {
  ScenarioScript s;
  s.seed = 11;
  auto& m = s.meta;
  m.recording_id = 1;
  m.location_id = 1;
  m.frame_rate = 25.0;
  m.duration = duration;
  m.upper_lane_markings = {8.0, 11.75, 15.5, 19.25};
  m.lower_lane_markings = {22.0, 25.75, 29.5, 33.25};
  m.speed_limits.assign(6, std::nullopt);
  for (int i = 0; i < vehicles; ++i) {
    VehicleSpec v;
    v.id = i + 1;
    v.direction = i % 2 ? DrivingDirection::Upper : DrivingDirection::Lower;
    v.lane = 1 + (i / 2) % 3;
    v.entry_time = 0.8 * (i / 6);
    v.initial_speed = 22.0 + 2.0 * v.lane;
    s.vehicles.push_back(v);
  }
  s.noise.position_sigma = 0.1;
  s.noise.false_positive_rate = 0.2;
  return s;
}

struct Scene {
  GroundTruth truth;
  std::vector<std::vector<Detection>> frames;
  std::vector<RawTrack> raw;
  std::vector<Track> tracks;
};

const Scene& scene() {
  static const Scene s = [] {
    Scene out;
    const auto script = traffic(240, 120.0);
    out.truth = generate_truth(script);
    out.frames = corrupt(out.truth.tracks, out.truth.meta, script.noise, script.seed);
    out.raw = build_tracks(out.frames, TrackerConfig{});
    for (const auto& r : out.raw) out.tracks.push_back(smooth_track(r, out.truth.meta, SmootherConfig{}));
    return out;
  }();
  return s;
}

void BM_BuildTracks(benchmark::State& state) {
  const auto& s = scene();
  for (auto _ : state) benchmark::DoNotOptimize(build_tracks(s.frames, TrackerConfig{}));
  std::size_t n = 0;
  for (const auto& f : s.frames) n += f.size();
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_BuildTracks)->Unit(benchmark::kMillisecond);

void BM_SmoothTrack(benchmark::State& state) {
  const auto& s = scene();
  const auto& r = s.raw.front();
  for (auto _ : state) benchmark::DoNotOptimize(smooth_track(r, s.truth.meta, SmootherConfig{}));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * r.observations.size()));
}
BENCHMARK(BM_SmoothTrack)->Unit(benchmark::kMicrosecond);

void BM_ComputeSurround(benchmark::State& state) {
  const auto& s = scene();
  for (auto _ : state) benchmark::DoNotOptimize(compute_surround(s.tracks, s.truth.meta));
}
BENCHMARK(BM_ComputeSurround)->Unit(benchmark::kMillisecond);

void BM_ReadRecording(benchmark::State& state) {
  const auto& s = scene();
  const fs::path dir = fs::temp_directory_path() / "trajkit_bench_read";
  fs::remove_all(dir);
  const auto files = write_recording(dir, s.truth.meta, s.tracks, compute_surround(s.tracks, s.truth.meta));
  for (auto _ : state) benchmark::DoNotOptimize(read_recording(files));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * fs::file_size(files.tracks_path)));
  fs::remove_all(dir);
}
BENCHMARK(BM_ReadRecording)->Unit(benchmark::kMillisecond);

void BM_FitLaneChange(benchmark::State& state) {
  LaneChangeParams p;
  p.d_start = 1.8;
  p.d_end = 1.7;
  p.v_start = 30.0;
  p.v_end = 31.0;
  p.duration = 5.0;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 0.05);
  std::vector<TimedSample> samples;
  for (int k = -25; k <= 150; ++k) {
    const double t = k / 25.0;
    const double tc = std::clamp(t, 0.0, p.duration);
    const auto m = evaluate_model(p, tc);
    samples.push_back({t, 100.0 + m.x + (t - tc) * (t < 0 ? p.v_start : p.v_end), 20.0 + m.y + noise(rng)});
  }
  for (auto _ : state) benchmark::DoNotOptimize(fit_lane_change(samples, 20.0, FitConfig{}));
}
BENCHMARK(BM_FitLaneChange)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
