// Copyright 2026 The DP Mobility Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dpmob/cli.h"

#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "dpmob/aggregation.h"
#include "dpmob/errors.h"
#include "dpmob/io.h"
#include "dpmob/metrics.h"
#include "dpmob/noise.h"
#include "dpmob/privatizer.h"
#include "dpmob/synthetic.h"

namespace dpmob {
namespace {

namespace fs = std::filesystem;

struct WindowOptions {
  std::string hours = "0-24";
  std::string days = "M,T,W,Th,F,Sa,Su";
  std::string dates;
  double utc_offset_h = kDefaultUtcOffsetMinutes / 60.0;
};

struct MatchOptions {
  double gap_s = kDefaultTripGapS;
  double snap_radius_m = 50.0;
  int max_node_skip = 3;
  int threads = 0;
};

struct PrivacyOptions {
  double epsilon = 1.0;
  BufferConfig buffer;
  std::uint64_t seed = kDefaultGlobalSeed;
  bool no_perturb_repeated = false;
};

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int OffsetMinutes(double hours) {
  if (!std::isfinite(hours) || hours < -14.0 || hours > 14.0) {
    throw DomainError("utc offset must be within +-14 hours");
  }
  return static_cast<int>(std::lround(hours * 60.0));
}

std::pair<int, int> ParseHours(const std::string& text) {
  const std::size_t dash = text.find('-');
  int a = -1, b = -1;
  try {
    if (dash == std::string::npos) throw std::invalid_argument(text);
    std::size_t pa = 0, pb = 0;
    a = std::stoi(text.substr(0, dash), &pa);
    b = std::stoi(text.substr(dash + 1), &pb);
    if (pa != dash || pb != text.size() - dash - 1) {
      throw std::invalid_argument(text);
    }
  } catch (const std::logic_error&) {
    throw DomainError("hour window must look like 13-14, got '" + text + "'");
  }
  if (a < 0 || b > 24 || a >= b) {
    throw DomainError("hour window must satisfy 0 <= start < end <= 24");
  }
  return {a, b};
}

void AddWindowOptions(CLI::App* app, WindowOptions& w) {
  app->add_option("--hour-window", w.hours, "Local hour range, e.g. 13-14");
  app->add_option("--days", w.days, "Weekdays, e.g. T,W,Th");
  app->add_option("--dates", w.dates, "Comma-separated YYYY-MM-DD days");
  app->add_option("--utc-offset", w.utc_offset_h, "Local UTC offset in hours");
}

TimeWindow MakeWindow(const WindowOptions& w) {
  TimeWindow window;
  std::tie(window.hour_start, window.hour_end) = ParseHours(w.hours);
  window.days = ParseWeekdays(w.days);
  for (const std::string& d : SplitList(w.dates)) {
    window.dates.push_back(ParseDate(d));
  }
  window.utc_offset_minutes = OffsetMinutes(w.utc_offset_h);
  return window;
}

void AddMatchOptions(CLI::App* app, MatchOptions& m) {
  app->add_option("--gap", m.gap_s, "Trip split gap in seconds");
  app->add_option("--snap-radius", m.snap_radius_m, "Node snap radius in m");
  app->add_option("--max-node-skip", m.max_node_skip,
                  "Longest run of unsnappable samples");
  app->add_option("--threads", m.threads, "Worker threads (0 = auto)");
}

MatchConfig MakeMatchConfig(const MatchOptions& m, const TimeWindow& window) {
  MatchConfig cfg;
  cfg.snap_radius_m = m.snap_radius_m;
  cfg.max_node_skip = m.max_node_skip;
  cfg.utc_offset_minutes = window.utc_offset_minutes;
  return cfg;
}

void AddPrivacyOptions(CLI::App* app, PrivacyOptions& p) {
  app->add_option("--h1", p.buffer.h1, "Links required in the buffer");
  app->add_option("--h2", p.buffer.h2,
                  "Same-class links required in the buffer");
  app->add_option("--initial-buffer", p.buffer.initial_m,
                  "Initial buffer range in m");
  app->add_option("--buffer-step", p.buffer.step_m, "Buffer increment in m");
  app->add_option("--max-buffer", p.buffer.max_m, "Buffer cap in m");
  app->add_option("--seed", p.seed, "Global noise seed");
  app->add_flag("--no-perturb-repeated", p.no_perturb_repeated,
                "Leave repeated trips alone unless single-count");
}

PrivacyConfig MakePrivacyConfig(const PrivacyOptions& p, const MatchOptions& m,
                                const TimeWindow& window) {
  PrivacyConfig cfg;
  cfg.epsilon = p.epsilon;
  cfg.buffer = p.buffer;
  cfg.global_seed = p.seed;
  cfg.gap_s = m.gap_s;
  cfg.perturb_repeated = !p.no_perturb_repeated;
  cfg.match = MakeMatchConfig(m, window);
  cfg.threads = m.threads;
  Validate(cfg);
  return cfg;
}

std::vector<GpsTrajectory> LoadTrips(const std::string& path, double gap_s) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path, 0, "cannot open trips file");
  return BuildTrips(ReadGpsCsv(in, path), gap_s);
}

std::ofstream OpenOutput(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(path.string(), 0, "cannot open output file");
  return out;
}

// Echo of every option of `app`: given values, else defaults.
std::map<std::string, std::string> EchoConfig(const CLI::App& app) {
  std::map<std::string, std::string> config;
  for (const CLI::Option* opt : app.get_options()) {
    if (opt->get_lnames().empty() || opt->get_lnames()[0] == "help") continue;
    std::string value;
    if (opt->count() > 0) {
      for (const std::string& r : opt->results()) {
        if (!value.empty()) value += ',';
        value += r;
      }
    } else {
      value = opt->get_default_str();
    }
    config[opt->get_lnames()[0]] = value;
  }
  return config;
}

RunManifest MakeManifest(const std::string& command, const CLI::App& app,
                         const std::vector<std::string>& args,
                         const std::vector<std::string>& inputs,
                         std::uint64_t seed) {
  RunManifest m;
  m.command = command;
  m.args.assign(args.begin() + (args.empty() ? 0 : 1), args.end());
  m.config = EchoConfig(app);
  for (const std::string& path : inputs) m.inputs[path] = FileDigest(path);
  m.global_seed = seed;
  return m;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Differentially private link-level mobility networks",
               "dp_mobility"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", ArtifactVersion());

  std::string network_path, trips_path, out_path, speeds_path, extra_path;
  WindowOptions window_opts;
  MatchOptions match_opts;
  PrivacyOptions privacy_opts;

  CLI::App* privatize = app.add_subcommand(
      "privatize", "Apply DP-ANI to a GPS corpus and write the released network");
  privatize->add_option("--network", network_path, "Road network")->required();
  privatize->add_option("--trips", trips_path, "GPS samples CSV")->required();
  privatize->add_option("--epsilon", privacy_opts.epsilon, "Privacy level")
      ->required();
  privatize->add_option("--out", out_path, "Output directory")->required();
  AddPrivacyOptions(privatize, privacy_opts);
  AddWindowOptions(privatize, window_opts);
  AddMatchOptions(privatize, match_opts);

  std::string models = "raw,dp-ani,trip-remove,od-remove,od-successive";
  std::string epsilons = "0.05,0.1,1,1.5,2,5,10,15";
  CLI::App* compare = app.add_subcommand(
      "compare", "Utility metrics for each privacy model and epsilon");
  compare->add_option("--network", network_path, "Road network")->required();
  compare->add_option("--trips", trips_path, "GPS samples CSV")->required();
  compare->add_option("--models", models, "Comma-separated model names");
  compare->add_option("--epsilons", epsilons, "Comma-separated epsilons");
  compare->add_option("--speeds", speeds_path, "Observed link speeds CSV");
  compare->add_option("--out", out_path, "Output CSV (stdout when absent)");
  AddPrivacyOptions(compare, privacy_opts);
  AddWindowOptions(compare, window_opts);
  AddMatchOptions(compare, match_opts);

  CLI::App* aggregate = app.add_subcommand(
      "aggregate", "Raw link counts of a GPS corpus");
  aggregate->add_option("--network", network_path, "Road network")->required();
  aggregate->add_option("--trips", trips_path, "GPS samples CSV")->required();
  aggregate->add_option("--out", out_path, "Aggregation CSV")->required();
  aggregate->add_option("--geojson", extra_path, "Optional GeoJSON overlay");
  AddWindowOptions(aggregate, window_opts);
  AddMatchOptions(aggregate, match_opts);

  CLI::App* metrics = app.add_subcommand(
      "metrics", "Utility metrics of the raw network");
  metrics->add_option("--network", network_path, "Road network")->required();
  metrics->add_option("--trips", trips_path, "GPS samples CSV")->required();
  metrics->add_option("--speeds", speeds_path, "Observed link speeds CSV");
  metrics->add_option("--out", out_path, "Metrics CSV (stdout when absent)");
  metrics->add_option("--density-out", extra_path,
                      "Intersection density histogram CSV");
  AddWindowOptions(metrics, window_opts);
  AddMatchOptions(metrics, match_opts);

  CLI::App* synth = app.add_subcommand("synth", "Synthetic inputs");
  synth->require_subcommand(1);
  SynthCityConfig city;
  CLI::App* synth_network =
      synth->add_subcommand("network", "Grid city road network");
  synth_network->add_option("--rows", city.rows, "Grid rows");
  synth_network->add_option("--cols", city.cols, "Grid columns");
  synth_network->add_option("--spacing", city.spacing_m, "Block length in m");
  synth_network->add_option("--arterial-every", city.arterial_every,
                            "Arterial spacing in blocks");
  synth_network->add_option("--seed", city.seed, "Generator seed");
  synth_network->add_option("--out", out_path, "GeoJSON or .csv output")
      ->required();

  SynthTripConfig trips_cfg;
  std::string synth_days = "2019-01-15,2019-01-16,2019-01-17,2019-01-22,"
                           "2019-01-23,2019-01-24";
  std::string synth_hours = "13-14";
  double synth_offset_h = kDefaultUtcOffsetMinutes / 60.0;
  CLI::App* synth_trips =
      synth->add_subcommand("trips", "GPS corpus over a road network");
  synth_trips->add_option("--network", network_path, "Road network")
      ->required();
  synth_trips->add_option("--trips-per-day", trips_cfg.n_trips, "Trips per day");
  synth_trips->add_option("--devices", trips_cfg.n_devices, "Device count");
  synth_trips->add_option("--days", synth_days, "Comma-separated YYYY-MM-DD");
  synth_trips->add_option("--hour-window", synth_hours, "Local hour range");
  synth_trips->add_option("--utc-offset", synth_offset_h, "UTC offset in hours");
  synth_trips->add_option("--alpha", trips_cfg.od_popularity_alpha,
                          "Zipf exponent of OD popularity");
  synth_trips->add_option("--interval", trips_cfg.gps_interval_s,
                          "GPS interval in s");
  synth_trips->add_option("--jitter", trips_cfg.jitter_sigma_m,
                          "GPS jitter sigma in m");
  synth_trips->add_option("--repeat-fraction", trips_cfg.repeat_fraction,
                          "Fraction of devices repeating one OD daily");
  synth_trips->add_option("--seed", trips_cfg.seed, "Generator seed");
  synth_trips->add_option("--threads", trips_cfg.threads,
                          "Worker threads (0 = auto)");
  synth_trips->add_option("--out", out_path, "GPS samples CSV")->required();
  synth_trips->add_option("--truth", extra_path, "Ground-truth link trips CSV");

  double radius = 100.0, distance = 100.0, cell = 20.0, slack = 0.3;
  double verify_eps = 1.0;
  std::size_t samples = 1000000, min_count = 50;
  std::uint64_t verify_seed = kDefaultGlobalSeed;
  CLI::App* verify = app.add_subcommand(
      "verify-dp", "Monte-Carlo check of the geo-indistinguishability bound");
  verify->add_option("--epsilon", verify_eps, "Privacy level")->required();
  verify->add_option("--radius", radius, "Noise radius R in m");
  verify->add_option("--distance", distance, "Distance between the points in m");
  verify->add_option("--samples", samples, "Draws per point");
  verify->add_option("--cell", cell, "Histogram cell size in m");
  verify->add_option("--min-count", min_count, "Samples required per cell");
  verify->add_option("--slack", slack, "Allowed statistical slack");
  verify->add_option("--seed", verify_seed, "Sampling seed");

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (privatize->parsed()) {
      const TimeWindow window = MakeWindow(window_opts);
      const PrivacyConfig cfg =
          MakePrivacyConfig(privacy_opts, match_opts, window);
      const RoadNetwork net = LoadNetwork(network_path);
      const auto in_window =
          WindowFilter(LoadTrips(trips_path, cfg.gap_s), window);
      if (in_window.empty()) {
        err << "no trips in the selected window\n";
        return kExitEmptyWindow;
      }
      const MatchedCorpus matched =
          MatchCorpus(in_window, net, cfg.match, cfg.threads);
      const PrivatizationResult res = DpAni(matched, net, cfg, window);

      const fs::path dir(out_path);
      fs::create_directories(dir);
      RunManifest manifest = MakeManifest("privatize", *privatize, args,
                                          {network_path, trips_path},
                                          cfg.global_seed);
      auto emit = [&](const std::string& name, auto&& write) {
        std::ofstream f = OpenOutput(dir / name);
        write(f);
        manifest.outputs.push_back(name);
      };
      emit("aggregation.csv",
           [&](std::ostream& f) { WriteAggregationCsv(res.sigma, net, f); });
      emit("overlay.geojson",
           [&](std::ostream& f) { WriteOverlayGeoJson(res.sigma, net, f); });
      emit("report.csv", [&](std::ostream& f) { WriteReportCsv(res.report, f); });
      emit("report_summary.csv",
           [&](std::ostream& f) { WriteReportSummaryCsv(res.report, f); });
      WriteManifest(manifest, dir / "manifest.json");

      out << "trips_in=" << res.report.trips_in
          << " trips_out=" << res.report.trips_out
          << " excluded=" << res.report.trips_excluded()
          << " endpoints_perturbed=" << res.report.endpoints_perturbed
          << " unchanged_single_count="
          << res.report.endpoints_unchanged_single_count << "\n";
      if (res.sigma.counts.empty()) {
        err << "privatized network is empty\n";
        return kExitEmptyWindow;
      }
      return kExitOk;
    }

    if (compare->parsed()) {
      std::vector<Model> model_list;
      for (const std::string& m : SplitList(models)) {
        model_list.push_back(ParseModel(m));
      }
      std::vector<double> eps_list;
      for (const std::string& e : SplitList(epsilons)) {
        std::size_t used = 0;
        double v = 0.0;
        try {
          v = std::stod(e, &used);
        } catch (const std::logic_error&) {
          used = 0;
        }
        if (used != e.size() || !(v > 0.0) || !std::isfinite(v)) {
          throw DomainError("invalid epsilon '" + e + "'");
        }
        eps_list.push_back(v);
      }
      const TimeWindow window = MakeWindow(window_opts);
      const PrivacyConfig cfg =
          MakePrivacyConfig(privacy_opts, match_opts, window);
      const RoadNetwork net = LoadNetwork(network_path);
      std::optional<SpeedMap> speeds;
      std::vector<std::string> inputs{network_path, trips_path};
      if (!speeds_path.empty()) {
        std::ifstream in(speeds_path, std::ios::binary);
        if (!in) throw InputError(speeds_path, 0, "cannot open speeds file");
        speeds = ReadSpeedsCsv(in, speeds_path, net);
        inputs.push_back(speeds_path);
      }
      const auto in_window =
          WindowFilter(LoadTrips(trips_path, cfg.gap_s), window);
      if (in_window.empty()) {
        err << "no trips in the selected window\n";
        return kExitEmptyWindow;
      }
      const MatchedCorpus matched =
          MatchCorpus(in_window, net, cfg.match, cfg.threads);
      const std::vector<CompareRow> rows =
          Compare(matched, net, cfg, eps_list, model_list, window,
                  speeds ? &*speeds : nullptr);
      if (out_path.empty()) {
        WriteCompareCsv(rows, out);
      } else {
        std::ofstream f = OpenOutput(out_path);
        WriteCompareCsv(rows, f);
        RunManifest manifest = MakeManifest("compare", *compare, args, inputs,
                                            cfg.global_seed);
        manifest.outputs.push_back(fs::path(out_path).filename().string());
        WriteManifest(manifest, out_path + ".manifest.json");
      }
      return kExitOk;
    }

    if (aggregate->parsed() || metrics->parsed()) {
      CLI::App* cmd = aggregate->parsed() ? aggregate : metrics;
      const TimeWindow window = MakeWindow(window_opts);
      const MatchConfig match = MakeMatchConfig(match_opts, window);
      const RoadNetwork net = LoadNetwork(network_path);
      std::vector<std::string> inputs{network_path, trips_path};
      std::optional<SpeedMap> speeds;
      if (!speeds_path.empty()) {
        std::ifstream in(speeds_path, std::ios::binary);
        if (!in) throw InputError(speeds_path, 0, "cannot open speeds file");
        speeds = ReadSpeedsCsv(in, speeds_path, net);
        inputs.push_back(speeds_path);
      }
      const auto in_window =
          WindowFilter(LoadTrips(trips_path, match_opts.gap_s), window);
      if (in_window.empty()) {
        err << "no trips in the selected window\n";
        return kExitEmptyWindow;
      }
      const MatchedCorpus matched =
          MatchCorpus(in_window, net, match, match_opts.threads);
      const AggregatedMobilityNetwork raw =
          Aggregate(matched.matched, window, "raw");
      RunManifest manifest =
          MakeManifest(cmd->get_name(), *cmd, args, inputs, 0);

      if (aggregate->parsed()) {
        std::ofstream f = OpenOutput(out_path);
        WriteAggregationCsv(raw, net, f);
        manifest.outputs.push_back(fs::path(out_path).filename().string());
        if (!extra_path.empty()) {
          std::ofstream g = OpenOutput(extra_path);
          WriteOverlayGeoJson(raw, net, g);
          manifest.outputs.push_back(fs::path(extra_path).filename().string());
        }
        WriteManifest(manifest, out_path + ".manifest.json");
        return kExitOk;
      }

      const PrivacyConfig cfg;
      const std::vector<Model> raw_only{Model::kRaw};
      const std::vector<CompareRow> rows =
          Compare(matched, net, cfg, {}, raw_only, window,
                  speeds ? &*speeds : nullptr);
      if (out_path.empty()) {
        WriteCompareCsv(rows, out);
      } else {
        std::ofstream f = OpenOutput(out_path);
        WriteCompareCsv(rows, f);
        manifest.outputs.push_back(fs::path(out_path).filename().string());
      }
      if (!extra_path.empty()) {
        std::ofstream f = OpenOutput(extra_path);
        WriteDensityCsv(ComputeIntersectionDensity(raw, net), f);
        manifest.outputs.push_back(fs::path(extra_path).filename().string());
      }
      if (!out_path.empty()) {
        WriteManifest(manifest, out_path + ".manifest.json");
      }
      return kExitOk;
    }

    if (synth_network->parsed()) {
      const RoadNetwork net = GenerateCity(city);
      SaveNetwork(net, out_path);
      RunManifest manifest =
          MakeManifest("synth network", *synth_network, args, {}, city.seed);
      manifest.outputs.push_back(fs::path(out_path).filename().string());
      WriteManifest(manifest, out_path + ".manifest.json");
      out << "nodes=" << net.node_count() << " links=" << net.link_count()
          << "\n";
      return kExitOk;
    }

    if (synth_trips->parsed()) {
      trips_cfg.days.clear();
      for (const std::string& d : SplitList(synth_days)) {
        trips_cfg.days.push_back(ParseDate(d));
      }
      std::tie(trips_cfg.hour_start, trips_cfg.hour_end) =
          ParseHours(synth_hours);
      trips_cfg.utc_offset_minutes = OffsetMinutes(synth_offset_h);
      const RoadNetwork net = LoadNetwork(network_path);
      const SynthCorpus corpus = GenerateTrips(net, trips_cfg);
      RunManifest manifest = MakeManifest("synth trips", *synth_trips, args,
                                          {network_path}, trips_cfg.seed);
      {
        std::ofstream f = OpenOutput(out_path);
        WriteGpsCsv(corpus.gps, f);
        manifest.outputs.push_back(fs::path(out_path).filename().string());
      }
      if (!extra_path.empty()) {
        std::ofstream f = OpenOutput(extra_path);
        WriteLinkTrajectoriesCsv(corpus.truth, net, f);
        manifest.outputs.push_back(fs::path(extra_path).filename().string());
      }
      WriteManifest(manifest, out_path + ".manifest.json");
      out << "trips=" << corpus.gps.size() << "\n";
      return kExitOk;
    }

    if (verify->parsed()) {
      const NoiseParams params{verify_eps, radius};
      Validate(params);
      if (!(distance >= 0.0) || !(cell > 0.0) || samples == 0 ||
          !std::isfinite(slack)) {
        throw DomainError("distance, cell, samples and slack must be valid");
      }
      const GeoPoint x0 = SynthCityConfig{}.center;
      const GeoPoint x1 = Displace(x0, distance, 0.0);
      const GeoIndistinguishabilityResult r = VerifyGeoIndistinguishability(
          x0, x1, params, samples, cell, verify_seed, min_count);
      const double bound = verify_eps / radius * distance;
      out << "max_log_ratio=" << FormatNumber(r.max_log_ratio)
          << " bound=" << FormatNumber(bound)
          << " cells=" << r.cells_compared << "\n";
      return r.max_log_ratio <= bound + slack ? kExitOk : kExitCheckFailed;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace dpmob
