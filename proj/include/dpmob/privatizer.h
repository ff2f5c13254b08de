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

#ifndef DPMOB_PRIVATIZER_H_
#define DPMOB_PRIVATIZER_H_

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "dpmob/adaptive.h"
#include "dpmob/aggregation.h"
#include "dpmob/matcher.h"
#include "dpmob/noise.h"
#include "dpmob/road_network.h"
#include "dpmob/trajectories.h"

namespace dpmob {

inline constexpr std::uint64_t kDefaultGlobalSeed = 42;

// Noisy OD re-matching settings. Sensitivity is fixed at 1: adding or
// removing one link changes the aggregated output.
struct PrivacyConfig {
  double epsilon = 1.0;
  BufferConfig buffer;
  std::uint64_t global_seed = kDefaultGlobalSeed;
  double gap_s = kDefaultTripGapS;
  bool perturb_repeated = true;
  MatchConfig match;
  int threads = 0;  // 0: DP_MOBILITY_THREADS or hardware concurrency
};

void Validate(const PrivacyConfig& cfg);

// GPS trips paired with their link trajectories; trips the matcher rejected
// are listed separately.
struct MatchedCorpus {
  std::vector<GpsTrajectory> trips;
  std::vector<LinkTrajectory> matched;  // aligned with `trips`
  std::vector<std::string> unmatchable;  // trip ids

  std::size_t trips_in() const { return trips.size() + unmatchable.size(); }
};

MatchedCorpus MatchCorpus(std::span<const GpsTrajectory> corpus,
                          const RoadNetwork& net, const MatchConfig& cfg,
                          int threads = 0);

// Flags, aligned with `corpus`, for trips whose (device, origin link,
// destination link) triple occurs more than once.
std::vector<bool> RepeatedOdFlags(std::span<const LinkTrajectory> corpus);
std::set<std::string> DetectRepeatedOd(std::span<const LinkTrajectory> corpus);

enum class PerturbReason { kNone, kSingleCount, kRepeated };
const char* ToString(PerturbReason reason);

// One row per trip endpoint.
struct EndpointRecord {
  std::string trip_id;
  std::string device;
  EndpointTag tag = EndpointTag::kOrigin;
  std::string original_link;
  std::uint32_t original_count = 0;
  PerturbReason reason = PerturbReason::kNone;
  bool perturbed = false;
  double radius_m = 0.0;  // noise radius R, 0 when not perturbed
  // Candidate link nearest to the noisy point; same class as the original.
  // Empty when not perturbed.
  std::string matched_link;
  std::string new_link;  // endpoint link of the released trip; empty if excluded
  bool unchanged_single_count = false;
  std::string status;  // "kept", "perturbed" or "excluded:<cause>"

  friend bool operator==(const EndpointRecord&, const EndpointRecord&) = default;
};

struct PrivatizationReport {
  std::size_t trips_in = 0;
  std::size_t trips_out = 0;
  std::map<std::string, std::size_t> excluded_by_cause;
  std::size_t endpoints_perturbed = 0;
  // Distinct single-count OD links that are still an endpoint of their trip
  // and still single-count in the released network.
  std::size_t endpoints_unchanged_single_count = 0;
  std::vector<EndpointRecord> records;

  std::size_t trips_excluded() const;
  friend bool operator==(const PrivatizationReport&,
                         const PrivatizationReport&) = default;
};

struct PrivatizationResult {
  AggregatedMobilityNetwork sigma;
  std::vector<LinkTrajectory> trajectories;  // released trips
  PrivatizationReport report;
};

// Adaptive noisy OD re-matching over a window of trips. Counts and repeat
// flags are taken from the clear corpus before any perturbation. Per-trip
// failures exclude the trip and are tallied by cause:
//   unmatchable, sparse_network, noise_out_of_range, unroutable.
// The MatchedCorpus overload expects trips already restricted to `window`;
// the GPS overload filters first.
PrivatizationResult DpAni(const MatchedCorpus& corpus, const RoadNetwork& net,
                          const PrivacyConfig& cfg, const TimeWindow& window);
PrivatizationResult DpAni(std::span<const GpsTrajectory> corpus,
                          const RoadNetwork& net, const PrivacyConfig& cfg,
                          const TimeWindow& window);

// Baselines over the clear link corpus; beta is computed on the input.
// Drops every trip whose origin or destination link has beta == 1.
std::vector<LinkTrajectory> BaselineTripRemove(
    std::span<const LinkTrajectory> corpus);
// Clips a single-count first and/or last link; drops trips left empty.
std::vector<LinkTrajectory> BaselineOdRemove(
    std::span<const LinkTrajectory> corpus);
// Clips runs of single-count links from both ends; drops trips left empty.
std::vector<LinkTrajectory> BaselineOdSuccessiveRemove(
    std::span<const LinkTrajectory> corpus);

}  // namespace dpmob

#endif  // DPMOB_PRIVATIZER_H_
