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

#ifndef DPMOB_AGGREGATION_H_
#define DPMOB_AGGREGATION_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>

#include "dpmob/road_network.h"
#include "dpmob/trajectories.h"

namespace dpmob {

// Link -> number of trajectory traversals (beta). Ordered for deterministic
// iteration and output.
using LinkCounts = std::map<LinkIdx, std::uint32_t>;

// beta counts every occurrence, including repeats inside one trip.
LinkCounts ComputeLinkCounts(std::span<const LinkTrajectory> corpus);

inline std::uint32_t CountOf(const LinkCounts& counts, LinkIdx l) {
  auto it = counts.find(l);
  return it == counts.end() ? 0 : it->second;
}

// Link-level mobility network for one temporal window: the raw network when
// source == "raw", otherwise the output of a privacy model.
struct AggregatedMobilityNetwork {
  TimeWindow window;
  LinkCounts counts;  // all values >= 1
  std::string source = "raw";
};

AggregatedMobilityNetwork Aggregate(std::span<const LinkTrajectory> corpus,
                                    const TimeWindow& window,
                                    std::string source = "raw");

}  // namespace dpmob

#endif  // DPMOB_AGGREGATION_H_
