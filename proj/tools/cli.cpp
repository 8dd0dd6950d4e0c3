#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include "trajkit/pipeline.hpp"

namespace trajkit {

namespace {

using ojson = nlohmann::ordered_json;

void print_errors(std::ostream& err, const std::vector<ErrorReport>& errors) {
  ojson j;
  j["errors"] = ojson::array();
  for (const auto& e : errors) j["errors"].push_back(e.to_json());
  err << j.dump(2) << "\n";
}

int usage_error(std::ostream& err, const std::string& message) {
  print_errors(err, {ErrorReport{"UsageError", message, std::nullopt, {}, 0, {}}});
  return 2;
}

struct Flags {
  std::string config;
  std::string input;
  std::string output;
  int jobs = 0;
  std::uint64_t seed = 0;
};

void add_flags(CLI::App* cmd, Flags& f, bool with_output) {
  cmd->add_option("--config", f.config, "JSON config file");
  cmd->add_option("--input", f.input, "input directory (synth: script file or directory)");
  if (with_output) cmd->add_option("--output", f.output, "output directory");
  cmd->add_option("--jobs", f.jobs, "worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Highway trajectory pipeline: tracking, smoothing, maneuvers, lane-change fits, statistics"};
  app.require_subcommand(1);
  Flags f;
  auto* track = app.add_subcommand("track", "build smoothed recordings from detection sets");
  auto* extract = app.add_subcommand("extract", "maneuvers, lane-change fits, cut-ins and statistics");
  auto* synth = app.add_subcommand("synth", "synthetic detections and ground truth from scenario scripts");
  auto* validate = app.add_subcommand("validate", "check recording files");
  auto* stats = app.add_subcommand("stats", "dataset statistics tables");
  for (auto* c : {track, extract, synth, stats}) add_flags(c, f, true);
  add_flags(validate, f, false);
  synth->add_option("--seed-override", f.seed, "replace the seed of every script");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    return usage_error(err, e.what());
  }

  PipelineConfig cfg;
  try {
    if (!f.config.empty()) cfg = load_pipeline_config(f.config);
    if (!f.input.empty()) cfg.input = f.input;
    if (!f.output.empty()) cfg.output = f.output;
    if (f.jobs > 0) cfg.jobs = f.jobs;
    if (synth->count("--seed-override") > 0) cfg.seed = f.seed;
    cfg.validate();
  } catch (const std::exception& e) {
    print_errors(err, {ErrorReport{"ConfigError", e.what(), std::nullopt, f.config, 0, {}}});
    return 1;
  }
  if (cfg.input.empty()) return usage_error(err, "--input is required (flag or config)");
  if (cfg.output.empty() && !validate->parsed()) return usage_error(err, "--output is required (flag or config)");

  CommandResult result;
  try {
    if (track->parsed()) {
      result = run_track(cfg);
    } else if (extract->parsed()) {
      result = run_extract(cfg);
    } else if (synth->parsed()) {
      result = run_synth(cfg);
    } else if (validate->parsed()) {
      result = run_validate(cfg);
    } else {
      result = run_stats(cfg);
    }
  } catch (const std::exception& e) {
    result.errors.push_back({"InternalError", e.what(), std::nullopt, {}, 0, {}});
  }
  result.summary["ok"] = result.errors.empty();
  out << result.summary.dump(2) << "\n";
  if (!result.errors.empty()) print_errors(err, result.errors);
  return result.exit_code();
}

}  // namespace trajkit
