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

// Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero when
// any criterion fails; with --report-only, only when a criterion could not
// be evaluated.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <unistd.h>

#include "dpmob/aggregation.h"
#include "dpmob/cli.h"
#include "dpmob/errors.h"
#include "dpmob/matcher.h"
#include "dpmob/metrics.h"
#include "dpmob/noise.h"
#include "dpmob/privatizer.h"
#include "dpmob/synthetic.h"
#include "../test_util.h"

namespace dpmob {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

// Default synthetic city and six-day corpus, built once.
struct City {
  RoadNetwork net = GenerateCity({});
  SynthCorpus corpus = GenerateTrips(net, {});
};

const City& DefaultCity() {
  static const City* city = new City();
  return *city;
}

TimeWindow Window(std::vector<std::int64_t> dates) {
  TimeWindow w;
  w.hour_start = 13;
  w.hour_end = 14;
  w.dates = std::move(dates);
  return w;
}

std::vector<CompareRow> CityCompare(const TimeWindow& window,
                                    std::span<const Model> models) {
  const City& city = DefaultCity();
  const auto trips = WindowFilter(city.corpus.gps, window);
  const MatchedCorpus matched = MatchCorpus(trips, city.net, {});
  const auto eps = DefaultEpsilons();
  return Compare(matched, city.net, {}, eps, models, window);
}

// Average ranks, ties sharing the mean rank.
std::vector<double> Ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = (i + j) / 2.0 + 1.0;
    i = j + 1;
  }
  return rank;
}

double Spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = Ranks(x);
  const auto ry = Ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = (n + 1) / 2, my = (n + 1) / 2;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

Outcome SamplerCorrectness() {
  const auto start = Clock::now();
  constexpr std::size_t kDraws = 1000000;
  constexpr int kBins = 36;
  NoiseRng rng(42);
  std::vector<double> r(kDraws);
  std::vector<double> bins(kBins, 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < kDraws; ++i) {
    const PolarNoise p = SamplePlanarLaplace({1.0, 1.0}, rng);
    r[i] = p.r;
    sum += p.r;
    const int b = static_cast<int>(p.theta / (2 * std::numbers::pi) * kBins);
    bins[std::min(b, kBins - 1)] += 1;
  }
  std::sort(r.begin(), r.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < kDraws; ++i) {
    const double f = 1.0 - (1.0 + r[i]) * std::exp(-r[i]);
    ks = std::max({ks, f - static_cast<double>(i) / kDraws,
                   static_cast<double>(i + 1) / kDraws - f});
  }
  const double mean = sum / kDraws;
  const double expected = static_cast<double>(kDraws) / kBins;
  double chi2 = 0.0;
  for (double c : bins) chi2 += (c - expected) * (c - expected) / expected;
  const double p_value =
      boost::math::cdf(boost::math::complement(
          boost::math::chi_squared(kBins - 1), chi2));
  const double secs = Seconds(start);
  return {ks < 0.005 && std::abs(mean - 2.0) <= 0.01 && p_value > 0.01 &&
              secs < 10.0,
          Fmt("ks=%.5f mean=%.5f chi2_p=%.4f time=%.2fs", ks, mean, p_value,
              secs)};
}

Outcome LambertW() {
  const double lo = -1.0 / std::numbers::e + 1e-12;
  const double hi = -1e-12;
  constexpr int kN = 10000;
  double worst = 0.0;
  for (int i = 0; i < kN; ++i) {
    // Log-spaced in |x| from |hi| to |lo|.
    const double t = static_cast<double>(i) / (kN - 1);
    const double x =
        -std::exp(std::log(-hi) + t * (std::log(-lo) - std::log(-hi)));
    const double w = LambertWMinus1(x);
    worst = std::max(worst, std::abs(w * std::exp(w) - x) / std::abs(x));
  }
  const double at_branch = LambertWMinus1(-1.0 / std::numbers::e);
  return {worst <= 1e-12 && std::abs(at_branch + 1.0) <= 1e-8,
          Fmt("max_rel_residual=%.3g w(-1/e)=%.12f", worst, at_branch)};
}

Outcome GeoIndistinguishability() {
  std::ostringstream out, err;
  const int code = RunCli({"dp_mobility", "verify-dp", "--epsilon", "1",
                           "--radius", "100", "--distance", "100", "--samples",
                           "1000000", "--cell", "20"},
                          out, err);
  const std::string text = out.str();
  double ratio = INFINITY;
  const auto pos = text.find("max_log_ratio=");
  if (pos != std::string::npos) ratio = std::stod(text.substr(pos + 14));
  return {code == kExitOk && ratio <= 1.3,
          Fmt("exit=%d max_log_ratio=%.4f limit=1.3", code, ratio)};
}

Outcome UnchangedTrend() {
  const auto days = DefaultSynthDays();
  const std::vector<Model> dp{Model::kDpAni};
  const auto eps = DefaultEpsilons();
  bool pass = true;
  std::string detail;
  for (std::size_t n : {1u, 3u, 6u}) {
    const auto rows =
        CityCompare(Window({days.begin(), days.begin() + n}), dp);
    std::vector<double> unchanged;
    std::string series;
    for (const auto& row : rows) {
      unchanged.push_back(static_cast<double>(row.unchanged_slc_od));
      series += (series.empty() ? "" : ",") + std::to_string(row.unchanged_slc_od);
    }
    const double rho = Spearman(eps, unchanged);
    pass = pass && rho >= 0.9;
    detail += Fmt("%zu-day rho=%.3f [%s] ", n, rho, series.c_str());
  }
  detail.pop_back();
  return {pass, detail};
}

const std::vector<CompareRow>& FullSweep() {
  static const auto* rows = [] {
    const auto models = AllModels();
    return new std::vector<CompareRow>(
        CityCompare(Window(DefaultSynthDays()), models));
  }();
  return *rows;
}

std::vector<CompareRow> RowsOf(const std::string& model) {
  std::vector<CompareRow> out;
  for (const auto& row : FullSweep()) {
    if (row.model == model) out.push_back(row);
  }
  return out;
}

Outcome PrivatizedRatio() {
  const auto dp = RowsOf("dp-ani");
  const double low = dp.front().privatized_ratio;
  const double high = dp.back().privatized_ratio;
  return {low >= 0.85 && low >= high + 0.2,
          Fmt("ratio(0.05)=%.3f ratio(15)=%.3f", low, high)};
}

Outcome NetworkLength() {
  const double raw = RowsOf("raw").at(0).network_length_mi;
  const double trip_remove =
      std::abs(RowsOf("trip-remove").at(0).network_length_mi - raw) / raw;
  bool pass = true;
  double worst = 0.0;
  for (const auto& row : RowsOf("dp-ani")) {
    const double dev = std::abs(row.network_length_mi - raw) / raw;
    worst = std::max(worst, dev);
    pass = pass && dev <= 0.06 && trip_remove > dev;
  }
  // Baselines do not take epsilon: rerunning with a different sweep must
  // reproduce their rows exactly.
  const City& city = DefaultCity();
  const TimeWindow window = Window(DefaultSynthDays());
  const MatchedCorpus matched =
      MatchCorpus(WindowFilter(city.corpus.gps, window), city.net, {});
  const std::vector<Model> baselines{Model::kTripRemove, Model::kOdRemove,
                                     Model::kOdSuccessive};
  bool constant = true;
  for (double e : {0.05, 15.0}) {
    const std::vector<double> one{e};
    const auto rows = Compare(matched, city.net, {}, one, baselines, window);
    for (const auto& row : rows) constant = constant && row == RowsOf(row.model).at(0);
  }
  return {pass && constant,
          Fmt("raw=%.3fmi max_dp_ani_dev=%.2f%% trip_remove_dev=%.2f%% "
              "baselines_constant=%s",
              raw, 100 * worst, 100 * trip_remove, constant ? "yes" : "no")};
}

Outcome Vmt() {
  const double raw = RowsOf("raw").at(0).vmt_mi;
  double worst = 0.0;
  for (const auto& row : RowsOf("dp-ani")) {
    worst = std::max(worst, std::abs(row.vmt_mi - raw) / raw);
  }
  return {worst <= 0.04, Fmt("raw=%.1fmi max_dev=%.2f%%", raw, 100 * worst)};
}

Outcome RepeatedDeterminism() {
  const City& city = DefaultCity();
  const TimeWindow window = Window(DefaultSynthDays());
  const MatchedCorpus matched =
      MatchCorpus(WindowFilter(city.corpus.gps, window), city.net, {});

  // Repeated groups spanning all six days.
  std::map<std::tuple<std::string, LinkIdx, LinkIdx>, std::vector<std::size_t>>
      groups;
  for (std::size_t i = 0; i < matched.matched.size(); ++i) {
    const auto& t = matched.matched[i];
    groups[{t.device, t.origin_link(), t.destination_link()}].push_back(i);
  }
  std::erase_if(groups, [&](const auto& g) {
    std::set<std::int64_t> days;
    for (std::size_t i : g.second) days.insert(matched.matched[i].day);
    return days.size() < 6;
  });
  if (groups.empty()) return {false, "no device repeats an OD on all six days"};

  auto endpoints = [&](std::uint64_t seed, bool* consistent) {
    PrivacyConfig cfg;
    cfg.global_seed = seed;
    const auto r = DpAni(matched, city.net, cfg, window);
    std::vector<std::string> out;
    for (const auto& [key, members] : groups) {
      for (int e = 0; e < 2; ++e) {
        const auto& first = r.report.records[2 * members[0] + e];
        for (std::size_t i : members) {
          const auto& rec = r.report.records[2 * i + e];
          *consistent = *consistent && rec.perturbed &&
                        rec.matched_link == first.matched_link &&
                        rec.new_link == first.new_link;
        }
        out.push_back(first.matched_link);
      }
    }
    return out;
  };
  bool consistent = true;
  const auto a = endpoints(kDefaultGlobalSeed, &consistent);
  const auto b = endpoints(kDefaultGlobalSeed + 1, &consistent);
  std::size_t changed = 0;
  for (std::size_t i = 0; i < a.size(); ++i) changed += a[i] != b[i];
  return {consistent && changed > 0,
          Fmt("groups=%zu identical_across_days=%s endpoints_changed_by_seed=%zu/%zu",
              groups.size(), consistent ? "yes" : "no", changed, a.size())};
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct SweepTiming {
  double seconds = 0.0;
  bool ok = false;
};
SweepTiming g_sweep;

Outcome PipelineDeterminism() {
  const fs::path dir =
      fs::temp_directory_path() / ("dpmob_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::ostringstream out, err;
  auto run = [&](std::vector<std::string> args) {
    args.insert(args.begin(), "dp_mobility");
    return RunCli(args, out, err);
  };
  const std::string net = (dir / "net.geojson").string();
  const std::string trips = (dir / "trips.csv").string();
  bool ok = run({"synth", "network", "--out", net}) == kExitOk &&
            run({"synth", "trips", "--network", net, "--out", trips}) == kExitOk;
  // Same command line both times; only the worker count differs.
  const std::string path = (dir / "compare.csv").string();
  std::vector<std::string> csv, manifest;
  for (const char* threads : {"1", "4"}) {
    ::setenv("DP_MOBILITY_THREADS", threads, 1);
    const auto start = Clock::now();
    const int code = run({"compare", "--network", net, "--trips", trips,
                          "--hour-window", "13-14", "--days", "T,W,Th", "--out",
                          path});
    if (g_sweep.seconds == 0.0) g_sweep = {Seconds(start), code == kExitOk};
    ok = ok && code == kExitOk;
    csv.push_back(Slurp(path));
    manifest.push_back(Slurp(path + ".manifest.json"));
    fs::remove(path);
    fs::remove(path + ".manifest.json");
  }
  ::unsetenv("DP_MOBILITY_THREADS");
  fs::remove_all(dir);
  const bool same = ok && !csv[0].empty() && csv[0] == csv[1] &&
                    manifest[0] == manifest[1];
  return {same, Fmt("threads 1 vs 4: csv %s, manifest %s%s",
                    csv[0] == csv[1] ? "identical" : "differ",
                    manifest[0] == manifest[1] ? "identical" : "differ",
                    ok ? "" : " (a run failed)")};
}

std::vector<LinkIdx> BruteWithin(const RoadNetwork& net, const GeoPoint& c,
                                 double r) {
  std::vector<LinkIdx> out;
  for (LinkIdx l = 0; l < net.link_count(); ++l) {
    if (net.DistanceToLink(l, c) <= r) out.push_back(l);
  }
  return out;
}

Outcome OracleEquivalences() {
  std::mt19937_64 rng(2024);
  const LocalFrame frame(testing::kTestAnchor);

  std::size_t index_mismatch = 0;
  std::uniform_real_distribution<double> pos(-300.0, 1800.0);
  std::uniform_real_distribution<double> radius(0.0, 400.0);
  for (int n = 0; n < 10; ++n) {
    const RoadNetwork net = testing::RandomNetwork(rng, 40, 120, 1500.0);
    for (int q = 0; q < 100; ++q) {
      const GeoPoint c = frame.Unproject({pos(rng), pos(rng)});
      const double r = radius(rng);
      index_mismatch += net.LinksWithin(c, r) != BruteWithin(net, c, r);
    }
  }

  std::size_t path_mismatch = 0, path_checks = 0;
  std::uniform_int_distribution<int> sizes(4, 12);
  for (int g = 0; g < 30; ++g) {
    const int n = sizes(rng);
    const RoadNetwork net = testing::RandomNetwork(rng, n, 2 * n + 4, 800.0);
    for (NodeIdx s = 0; s < net.node_count(); ++s) {
      for (NodeIdx t = 0; t < net.node_count(); ++t) {
        if (s == t) continue;
        ++path_checks;
        const auto best = testing::ExhaustiveShortestPath(net, s, t);
        try {
          const auto got = net.ShortestPath(s, t);
          path_mismatch += !best || got != *best;
        } catch (const NoPathError&) {
          path_mismatch += best.has_value();
        }
      }
    }
  }

  std::size_t tally_mismatch = 0;
  const City& city = DefaultCity();
  const auto& truth = city.corpus.truth;
  const LinkCounts beta = ComputeLinkCounts(truth);
  for (LinkIdx l = 0; l < city.net.link_count(); ++l) {
    std::uint32_t n = 0;
    for (const auto& t : truth) {
      for (LinkIdx x : t.links) n += x == l;
    }
    tally_mismatch += CountOf(beta, l) != n;
  }

  auto recovery = [&](double jitter) {
    SynthTripConfig cfg;
    cfg.n_trips = 300;
    cfg.days = {DefaultSynthDays()[0]};
    cfg.gps_interval_s = 10.0;
    cfg.jitter_sigma_m = jitter;
    const SynthCorpus c = GenerateTrips(city.net, cfg);
    std::size_t hit = 0, total = 0;
    for (std::size_t i = 0; i < c.gps.size(); ++i) {
      const auto& want = c.truth[i].links;
      total += want.size();
      try {
        const auto got = MatchTrajectory(c.gps[i], city.net, {}).links;
        std::multiset<LinkIdx> pool(got.begin(), got.end());
        for (LinkIdx l : want) {
          if (auto it = pool.find(l); it != pool.end()) {
            ++hit;
            pool.erase(it);
          }
        }
      } catch (const UnmatchableError&) {
      }
    }
    return static_cast<double>(hit) / static_cast<double>(total);
  };
  const double noisy = recovery(5.0);
  const double clean = recovery(0.0);

  return {index_mismatch == 0 && path_mismatch == 0 && tally_mismatch == 0 &&
              noisy >= 0.95 && clean == 1.0,
          Fmt("index_mismatch=%zu/1000 path_mismatch=%zu/%zu tally_mismatch=%zu "
              "recovery_5m=%.4f recovery_0m=%.4f",
              index_mismatch, path_mismatch, path_checks, tally_mismatch, noisy,
              clean)};
}

Outcome DeskScale() {
  return {g_sweep.ok && g_sweep.seconds < 300.0,
          Fmt("full compare sweep %.2fs (limit 300s)", g_sweep.seconds)};
}

}  // namespace
}  // namespace dpmob

int main(int argc, char** argv) {
  const bool report_only =
      argc > 1 && std::string_view(argv[1]) == "--report-only";
  using dpmob::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"sampler correctness", dpmob::SamplerCorrectness},
      {"lambert w-1", dpmob::LambertW},
      {"geo-indistinguishability", dpmob::GeoIndistinguishability},
      {"unchanged single-count trend", dpmob::UnchangedTrend},
      {"privatized ratio", dpmob::PrivatizedRatio},
      {"network length", dpmob::NetworkLength},
      {"vmt", dpmob::Vmt},
      {"repeated-trip determinism", dpmob::RepeatedDeterminism},
      {"pipeline determinism", dpmob::PipelineDeterminism},
      {"oracle equivalences", dpmob::OracleEquivalences},
      {"desk-scale sweep", dpmob::DeskScale},
  };
  int failed = 0, errors = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
      ++errors;
    }
    failed += !o.pass;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return (report_only ? errors : failed) == 0 ? 0 : 1;
}
