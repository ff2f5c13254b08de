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

#ifndef DPMOB_MATCHER_H_
#define DPMOB_MATCHER_H_

#include <optional>
#include <span>

#include "dpmob/road_network.h"
#include "dpmob/trajectories.h"

namespace dpmob {

// Node-snapping matcher: every sample snaps to the nearest node within
// snap_radius_m, consecutive distinct nodes are joined by shortest paths.
struct MatchConfig {
  double snap_radius_m = 50.0;
  // Longest run of consecutive samples without a node in range.
  int max_node_skip = 3;
  int utc_offset_minutes = kDefaultUtcOffsetMinutes;
};

// Throws UnmatchableError when fewer than two samples snap, when every
// snapped sample lands on one node, when a run of unsnappable samples is
// longer than max_node_skip, or when consecutive nodes are disconnected.
LinkTrajectory MatchTrajectory(const GpsTrajectory& trip,
                               const RoadNetwork& net, const MatchConfig& cfg);

struct NoisyEndpointMatch {
  LinkIdx link = 0;
  NodeIdx node = 0;  // endpoint of `link` nearer to the noisy point
};

// Nearest candidate link to `z` and its endpoint nearer to `z` (ties to the
// smaller node id). Throws NoCandidateError on an empty candidate set.
NoisyEndpointMatch MatchNoisyEndpoint(const GeoPoint& z,
                                      std::span<const LinkIdx> candidates,
                                      const RoadNetwork& net);

// Re-routes the perturbed ends of `original`. With a new origin node the
// trip becomes ShortestPath(new_origin, to-node of the first link) followed by
// the remaining links; a new destination node symmetrically replaces the last
// link with ShortestPath(from-node of the last link, new_destination).
// Interior links are kept verbatim; observed speeds are dropped when anything
// changes. Throws UnmatchableError when a path is missing or the rebuilt trip
// has no links.
LinkTrajectory RebuildTrajectory(const LinkTrajectory& original,
                                 std::optional<NodeIdx> new_origin,
                                 std::optional<NodeIdx> new_destination,
                                 const RoadNetwork& net);

}  // namespace dpmob

#endif  // DPMOB_MATCHER_H_
