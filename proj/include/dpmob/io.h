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

#ifndef DPMOB_IO_H_
#define DPMOB_IO_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dpmob/aggregation.h"
#include "dpmob/metrics.h"
#include "dpmob/privatizer.h"
#include "dpmob/road_network.h"
#include "dpmob/trajectories.h"

// File formats. CSV files carry a header row, LF line endings and '.'
// decimals; numbers are written in shortest round-trip form so every writer
// and its reader round-trip exactly. Readers throw InputError naming the
// source and the 1-based line.
namespace dpmob {

std::string FormatNumber(double v);

// Header-addressed CSV reader. Fields may be double-quoted.
class CsvReader {
 public:
  CsvReader(std::istream& in, std::string source);

  // Advances to the next non-empty record; false at end of input.
  bool Next();

  bool Has(std::string_view column) const;
  std::string_view Get(std::string_view column) const;
  double GetDouble(std::string_view column) const;
  std::optional<double> GetOptionalDouble(std::string_view column) const;
  long long GetInt(std::string_view column) const;

  std::size_t line() const { return line_; }
  [[noreturn]] void Fail(const std::string& what) const;

 private:
  bool ReadRecord(std::vector<std::string>& fields);

  std::istream& in_;
  std::string source_;
  std::size_t line_ = 0;
  std::vector<std::string> header_;
  std::vector<std::string> fields_;
};

// Road network as a GeoJSON FeatureCollection of LineStrings with
// coordinates [lon, lat] and properties id, from, to, fc, length_m,
// speed_mps, lanes.
RoadNetwork ReadNetworkGeoJson(std::istream& in, const std::string& source);
void WriteNetworkGeoJson(const RoadNetwork& net, std::ostream& out);

// Edge list: link_id,from,to,fc,length_m,speed_mps,lanes,geometry with the
// geometry as "lon lat;lon lat;...".
RoadNetwork ReadNetworkCsv(std::istream& in, const std::string& source);
void WriteNetworkCsv(const RoadNetwork& net, std::ostream& out);

// Picks the format from the extension: .csv is the edge list, anything else
// GeoJSON.
RoadNetwork LoadNetwork(const std::filesystem::path& path);
void SaveNetwork(const RoadNetwork& net, const std::filesystem::path& path);

// device_id,timestamp,lat,lon,speed_mps,heading_deg. Speed and heading may
// be empty or absent.
std::vector<GpsSample> ReadGpsCsv(std::istream& in, const std::string& source);
void WriteGpsCsv(std::span<const GpsTrajectory> corpus, std::ostream& out);

// trip_id,device,day,hour,links with space-separated link ids.
std::vector<LinkTrajectory> ReadLinkTrajectoriesCsv(std::istream& in,
                                                    const std::string& source,
                                                    const RoadNetwork& net);
void WriteLinkTrajectoriesCsv(std::span<const LinkTrajectory> corpus,
                              const RoadNetwork& net, std::ostream& out);

struct AggregationRow {
  std::string link_id;
  std::uint32_t count = 0;
  double length_m = 0.0;
  int functional_class = 0;

  friend bool operator==(const AggregationRow&, const AggregationRow&) = default;
};

// link_id,count,length_m,fc in link id order.
std::vector<AggregationRow> AggregationRows(const AggregatedMobilityNetwork& agg,
                                            const RoadNetwork& net);
void WriteAggregationCsv(const AggregatedMobilityNetwork& agg,
                         const RoadNetwork& net, std::ostream& out);
std::vector<AggregationRow> ReadAggregationCsv(std::istream& in,
                                               const std::string& source);

struct OverlayFeature {
  std::string link_id;
  std::uint32_t count = 0;
  std::string source;
  std::vector<GeoPoint> geometry;

  friend bool operator==(const OverlayFeature&, const OverlayFeature&) = default;
};

// One LineString per counted link with count and source properties.
void WriteOverlayGeoJson(const AggregatedMobilityNetwork& agg,
                         const RoadNetwork& net, std::ostream& out);
std::vector<OverlayFeature> ReadOverlayGeoJson(std::istream& in,
                                               const std::string& source);

// trip_id,device,endpoint,original_link,original_count,reason,perturbed,
// radius_m,matched_link,new_link,unchanged_single_count,status
void WriteReportCsv(const PrivatizationReport& report, std::ostream& out);
std::vector<EndpointRecord> ReadReportCsv(std::istream& in,
                                          const std::string& source);

// key,value totals; excluded causes appear as "excluded:<cause>".
void WriteReportSummaryCsv(const PrivatizationReport& report, std::ostream& out);
PrivatizationReport ReadReportSummaryCsv(std::istream& in,
                                         const std::string& source);

// model,epsilon,network_length_mi,vmt_mi,vht_h,vhd_h,unchanged_slc_od,
// privatized_ratio,trips_excluded; epsilon empty for non-dp-ani rows.
void WriteCompareCsv(std::span<const CompareRow> rows, std::ostream& out);
std::vector<CompareRow> ReadCompareCsv(std::istream& in,
                                       const std::string& source);

// density,fraction
void WriteDensityCsv(const IntersectionDensity& density, std::ostream& out);

// link_id,speed_mps
SpeedMap ReadSpeedsCsv(std::istream& in, const std::string& source,
                       const RoadNetwork& net);
void WriteSpeedsCsv(const SpeedMap& speeds, const RoadNetwork& net,
                    std::ostream& out);

// 64-bit FNV-1a over the file bytes, as 16 hex digits.
std::string FileDigest(const std::filesystem::path& path);

// Everything needed to rerun a command: the arguments, the resolved
// configuration, input digests, the seed, the artifact version and the
// outputs written. Contains no timestamps.
struct RunManifest {
  std::string command;
  std::vector<std::string> args;
  std::map<std::string, std::string> config;
  std::map<std::string, std::string> inputs;  // path -> digest
  std::uint64_t global_seed = 0;
  std::vector<std::string> outputs;
};

std::string ManifestJson(const RunManifest& manifest);
void WriteManifest(const RunManifest& manifest,
                   const std::filesystem::path& path);

const char* ArtifactVersion();

}  // namespace dpmob

#endif  // DPMOB_IO_H_
