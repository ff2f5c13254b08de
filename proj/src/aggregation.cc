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

#include "dpmob/aggregation.h"

#include <utility>

namespace dpmob {

LinkCounts ComputeLinkCounts(std::span<const LinkTrajectory> corpus) {
  LinkCounts counts;
  for (const LinkTrajectory& trip : corpus) {
    for (LinkIdx l : trip.links) ++counts[l];
  }
  return counts;
}

AggregatedMobilityNetwork Aggregate(std::span<const LinkTrajectory> corpus,
                                    const TimeWindow& window,
                                    std::string source) {
  AggregatedMobilityNetwork agg;
  agg.window = window;
  agg.counts = ComputeLinkCounts(corpus);
  agg.source = std::move(source);
  return agg;
}

}  // namespace dpmob
