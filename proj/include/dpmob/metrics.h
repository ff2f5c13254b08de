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

#ifndef DPMOB_METRICS_H_
#define DPMOB_METRICS_H_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dpmob/aggregation.h"
#include "dpmob/privatizer.h"
#include "dpmob/road_network.h"
#include "dpmob/trajectories.h"

namespace dpmob {

// Observed link speeds in m/s.
using SpeedMap = std::map<LinkIdx, double>;

// Total length of links with a count, each once, in miles.
double NetworkLengthMiles(const AggregatedMobilityNetwork& agg,
                          const RoadNetwork& net);

// Vehicle miles traveled: traversed link lengths summed over all trips.
double VmtMiles(std::span<const LinkTrajectory> corpus, const RoadNetwork& net);

// Vehicle hours traveled. A trip carrying observed speeds for every link uses
// them; otherwise links are timed at free-flow speed.
double VhtHours(std::span<const LinkTrajectory> corpus, const RoadNetwork& net);

// Vehicle hours of delay: sum over traversals of
// max(0, length / observed - length / free_flow). Links without an observed
// speed, or a null map, contribute nothing.
double VhdHours(std::span<const LinkTrajectory> corpus, const RoadNetwork& net,
                const SpeedMap* observed);

struct IntersectionDensity {
  std::vector<int> per_node;  // active incident (in + out) links per node
  std::map<int, double> histogram;  // density value -> fraction of nodes
};

IntersectionDensity ComputeIntersectionDensity(
    const AggregatedMobilityNetwork& agg, const RoadNetwork& net);

struct UnchangedOd {
  std::size_t unchanged = 0;
  std::size_t total_single_count_od = 0;
  double privatized_ratio = 1.0;  // 1 - unchanged / total; 1 when total == 0
};

// Counts raw single-count OD links that are still the same endpoint of the
// same trip (matched by trip id) and still single-count after privatization.
// Throws WindowMismatchError when the two networks cover different windows.
UnchangedOd UnchangedSingleCountOd(const AggregatedMobilityNetwork& raw,
                                   std::span<const LinkTrajectory> raw_trips,
                                   const AggregatedMobilityNetwork& privatized,
                                   std::span<const LinkTrajectory> released);

struct MetricsReport {
  double network_length_mi = 0.0;
  double vmt_mi = 0.0;
  double vht_h = 0.0;
  double vhd_h = 0.0;
  IntersectionDensity intersection_density;
  std::size_t unchanged_single_count_od = 0;
  double privatized_ratio = 0.0;
};

MetricsReport ComputeMetrics(const AggregatedMobilityNetwork& raw,
                             std::span<const LinkTrajectory> raw_trips,
                             const AggregatedMobilityNetwork& released_agg,
                             std::span<const LinkTrajectory> released,
                             const RoadNetwork& net, const SpeedMap* observed);

enum class Model { kRaw, kDpAni, kTripRemove, kOdRemove, kOdSuccessive };

// Names: raw, dp-ani, trip-remove, od-remove, od-successive.
Model ParseModel(const std::string& name);
const char* ToString(Model model);
std::vector<Model> AllModels();
std::vector<double> DefaultEpsilons();  // 0.05 0.1 1 1.5 2 5 10 15

struct CompareRow {
  std::string model;
  std::optional<double> epsilon;  // only for dp-ani
  double network_length_mi = 0.0;
  double vmt_mi = 0.0;
  double vht_h = 0.0;
  double vhd_h = 0.0;
  std::size_t unchanged_slc_od = 0;
  double privatized_ratio = 0.0;
  std::size_t trips_excluded = 0;

  friend bool operator==(const CompareRow&, const CompareRow&) = default;
};

// One row per model in the given order; dp-ani expands to one row per
// epsilon. `base` supplies every privacy setting except epsilon.
std::vector<CompareRow> Compare(const MatchedCorpus& corpus,
                                const RoadNetwork& net,
                                const PrivacyConfig& base,
                                std::span<const double> epsilons,
                                std::span<const Model> models,
                                const TimeWindow& window,
                                const SpeedMap* observed = nullptr);

}  // namespace dpmob

#endif  // DPMOB_METRICS_H_
