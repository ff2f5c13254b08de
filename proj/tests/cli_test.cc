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
#include <sstream>

#include <unistd.h>

#include <gtest/gtest.h>
#include <json.hpp>

#include "dpmob/io.h"

namespace dpmob {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "dp_mobility");
  std::ostringstream out, err;
  const int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new fs::path(fs::temp_directory_path() /
                        ("dpmob_cli_" + std::to_string(::getpid())));
    fs::create_directories(*dir_);
    ASSERT_EQ(Cli({"synth", "network", "--rows", "10", "--cols", "10", "--out",
                   Path("net.geojson")})
                  .code,
              0);
    ASSERT_EQ(Cli({"synth", "trips", "--network", Path("net.geojson"),
                   "--trips-per-day", "60", "--devices", "100", "--days",
                   "2019-01-15,2019-01-16", "--out", Path("trips.csv"),
                   "--truth", Path("truth.csv")})
                  .code,
              0);
  }
  static void TearDownTestSuite() {
    fs::remove_all(*dir_);
    delete dir_;
  }
  static std::string Path(const std::string& name) {
    return (*dir_ / name).string();
  }
  static fs::path* dir_;
};

fs::path* CliTest::dir_ = nullptr;

TEST_F(CliTest, SynthOutputsParse) {
  const RoadNetwork net = LoadNetwork(Path("net.geojson"));
  EXPECT_EQ(net.link_count(), 360u);
  std::ifstream gps(Path("trips.csv"));
  EXPECT_EQ(BuildTrips(ReadGpsCsv(gps, "trips.csv")).size(), 120u);
  std::ifstream truth(Path("truth.csv"));
  EXPECT_EQ(ReadLinkTrajectoriesCsv(truth, "truth.csv", net).size(), 120u);
}

TEST_F(CliTest, PrivatizeWritesParsableOutputs) {
  const std::string out = Path("priv");
  const CliRun r = Cli({"privatize", "--network", Path("net.geojson"), "--trips",
                     Path("trips.csv"), "--epsilon", "1", "--h1", "8", "--h2",
                     "3", "--initial-buffer", "20", "--buffer-step", "10",
                     "--seed", "7", "--hour-window", "13-14", "--days",
                     "T,W,Th", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;

  std::ifstream agg(out + "/aggregation.csv");
  const auto rows = ReadAggregationCsv(agg, "aggregation.csv");
  EXPECT_FALSE(rows.empty());
  std::ifstream overlay(out + "/overlay.geojson");
  const auto features = ReadOverlayGeoJson(overlay, "overlay.geojson");
  ASSERT_EQ(features.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(features[i].link_id, rows[i].link_id);
    EXPECT_EQ(features[i].count, rows[i].count);
    EXPECT_EQ(features[i].source, "dp-ani");
  }
  std::ifstream report(out + "/report.csv");
  const auto records = ReadReportCsv(report, "report.csv");
  std::ifstream summary_in(out + "/report_summary.csv");
  const auto summary = ReadReportSummaryCsv(summary_in, "report_summary.csv");
  EXPECT_EQ(summary.trips_in, 120u);
  EXPECT_EQ(summary.trips_out + summary.trips_excluded(), summary.trips_in);
  EXPECT_EQ(records.size(), 2 * (summary.trips_in -
                                 (summary.excluded_by_cause.count("unmatchable")
                                      ? summary.excluded_by_cause.at("unmatchable")
                                      : 0)));

  const auto manifest = nlohmann::json::parse(Slurp(out + "/manifest.json"));
  EXPECT_EQ(manifest.at("command"), "privatize");
  EXPECT_EQ(manifest.at("global_seed"), 7);
  EXPECT_EQ(manifest.at("config").at("epsilon"), "1");
  EXPECT_EQ(manifest.at("config").at("h1"), "8");
  EXPECT_TRUE(manifest.at("inputs").contains(Path("trips.csv")));
  EXPECT_EQ(manifest.at("outputs").size(), 4u);

  // Rerunning the same command reproduces every byte.
  const std::string again = Path("priv2");
  std::vector<std::string> args = manifest.at("args");
  args.back() = again;
  ASSERT_EQ(Cli(args).code, 0);
  for (const char* name : {"aggregation.csv", "overlay.geojson", "report.csv",
                           "report_summary.csv"}) {
    EXPECT_EQ(Slurp(out + "/" + name), Slurp(again + "/" + name)) << name;
  }
}

TEST_F(CliTest, PrivatizeExitCodes) {
  EXPECT_EQ(Cli({"privatize", "--network", Path("net.geojson"), "--trips",
                 Path("trips.csv"), "--out", Path("x")})
                .code,
            kExitInput);
  EXPECT_EQ(Cli({"privatize", "--network", Path("net.geojson"), "--trips",
                 Path("trips.csv"), "--epsilon", "1", "--hour-window", "2-3",
                 "--out", Path("x")})
                .code,
            kExitEmptyWindow);
  EXPECT_EQ(Cli({"privatize", "--network", Path("net.geojson"), "--trips",
                 Path("trips.csv"), "--epsilon", "-1", "--out", Path("x")})
                .code,
            kExitInput);
  EXPECT_EQ(Cli({"privatize", "--network", Path("missing.geojson"), "--trips",
                 Path("trips.csv"), "--epsilon", "1", "--out", Path("x")})
                .code,
            kExitInput);

  std::ofstream(Path("bad.csv")) << "device_id,timestamp,lat,lon\n"
                                    "a,2019-01-15T21:30:00Z,37.87,x\n";
  const CliRun bad = Cli({"privatize", "--network", Path("net.geojson"), "--trips",
                       Path("bad.csv"), "--epsilon", "1", "--out", Path("x")});
  EXPECT_EQ(bad.code, kExitInput);
  EXPECT_NE(bad.err.find("bad.csv:2"), std::string::npos) << bad.err;
}

TEST_F(CliTest, CompareRowsAndDeterminism) {
  const std::vector<std::string> base{"compare", "--network",
                                      Path("net.geojson"), "--trips",
                                      Path("trips.csv"), "--hour-window",
                                      "13-14"};
  auto with = [&](std::vector<std::string> extra) {
    auto args = base;
    args.insert(args.end(), extra.begin(), extra.end());
    return Cli(args);
  };
  const CliRun raw = with({"--models", "raw"});
  ASSERT_EQ(raw.code, 0) << raw.err;
  std::istringstream raw_csv(raw.out);
  EXPECT_EQ(ReadCompareCsv(raw_csv, "stdout").size(), 1u);

  const CliRun full = with({"--out", Path("compare.csv")});
  ASSERT_EQ(full.code, 0) << full.err;
  std::ifstream full_csv(Path("compare.csv"));
  const auto rows = ReadCompareCsv(full_csv, "compare.csv");
  ASSERT_EQ(rows.size(), 12u);
  EXPECT_EQ(rows[1].epsilon, 0.05);
  EXPECT_EQ(rows[8].epsilon, 15.0);
  EXPECT_TRUE(fs::exists(Path("compare.csv.manifest.json")));

  ASSERT_EQ(with({"--out", Path("compare2.csv")}).code, 0);
  EXPECT_EQ(Slurp(Path("compare.csv")), Slurp(Path("compare2.csv")));

  EXPECT_EQ(with({"--models", "raw,bogus"}).code, kExitInput);
}

TEST_F(CliTest, AggregateAndMetrics) {
  const CliRun agg = Cli({"aggregate", "--network", Path("net.geojson"), "--trips",
                       Path("trips.csv"), "--out", Path("raw.csv"), "--geojson",
                       Path("raw.geojson")});
  ASSERT_EQ(agg.code, 0) << agg.err;
  std::ifstream rows(Path("raw.csv"));
  EXPECT_FALSE(ReadAggregationCsv(rows, "raw.csv").empty());
  std::ifstream overlay(Path("raw.geojson"));
  EXPECT_EQ(ReadOverlayGeoJson(overlay, "raw.geojson").at(0).source, "raw");

  const CliRun m = Cli({"metrics", "--network", Path("net.geojson"), "--trips",
                     Path("trips.csv"), "--density-out", Path("density.csv")});
  ASSERT_EQ(m.code, 0) << m.err;
  std::istringstream metrics_csv(m.out);
  const auto metric_rows = ReadCompareCsv(metrics_csv, "stdout");
  ASSERT_EQ(metric_rows.size(), 1u);
  EXPECT_EQ(metric_rows[0].model, "raw");
  EXPECT_GT(metric_rows[0].vmt_mi, 0.0);
  EXPECT_EQ(Slurp(Path("density.csv")).rfind("density,fraction\n", 0), 0u);
}

TEST(Cli, VerifyDp) {
  const CliRun zero = Cli({"verify-dp", "--epsilon", "1", "--radius", "100",
                        "--distance", "0", "--samples", "20000"});
  EXPECT_EQ(zero.code, kExitOk) << zero.out << zero.err;
  EXPECT_NE(zero.out.find("max_log_ratio="), std::string::npos);
  EXPECT_NE(zero.out.find("bound=0"), std::string::npos) << zero.out;

  // Few samples can legitimately fail the statistical check.
  const CliRun tiny = Cli({"verify-dp", "--epsilon", "1", "--radius", "100",
                        "--distance", "100", "--samples", "1000"});
  EXPECT_TRUE(tiny.code == kExitOk || tiny.code == kExitCheckFailed);

  EXPECT_EQ(Cli({"verify-dp", "--epsilon", "-1"}).code, kExitInput);
  EXPECT_EQ(Cli({"verify-dp", "--epsilon", "1", "--radius", "0"}).code,
            kExitInput);
  EXPECT_EQ(Cli({"verify-dp", "--epsilon", "abc"}).code, kExitInput);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(Cli({}).code, kExitInput);
  EXPECT_EQ(Cli({"frobnicate"}).code, kExitInput);
  EXPECT_EQ(Cli({"--help"}).code, kExitOk);
  EXPECT_EQ(Cli({"synth", "network", "--rows", "1", "--out", "/tmp/x.geojson"})
                .code,
            kExitInput);
}

}  // namespace
}  // namespace dpmob
