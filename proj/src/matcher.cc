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

#include "dpmob/matcher.h"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "dpmob/errors.h"

namespace dpmob {
namespace {

void Append(std::vector<LinkIdx>& out, const std::vector<LinkIdx>& segment) {
  for (LinkIdx l : segment) {
    if (out.empty() || out.back() != l) out.push_back(l);
  }
}

std::vector<LinkIdx> PathOrThrow(const RoadNetwork& net, NodeIdx from,
                                 NodeIdx to, const std::string& trip_id) {
  try {
    return net.ShortestPath(from, to);
  } catch (const NoPathError& e) {
    throw UnmatchableError("trip " + trip_id + ": " + e.what());
  }
}

// Harmonic mean of the sample speeds nearest to each link; empty unless every
// link receives at least one positive speed.
std::vector<double> ObservedSpeeds(const GpsTrajectory& trip,
                                   const std::vector<LinkIdx>& links,
                                   const RoadNetwork& net) {
  std::vector<double> inverse_sum(links.size(), 0.0);
  std::vector<int> count(links.size(), 0);
  for (const GpsSample& s : trip.samples) {
    if (!s.speed_mps.has_value() || !(*s.speed_mps > 0.0)) continue;
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < links.size(); ++i) {
      const double d = net.DistanceToLink(links[i], s.point);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    inverse_sum[best] += 1.0 / *s.speed_mps;
    ++count[best];
  }
  std::vector<double> speeds;
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (count[i] == 0) return {};
    speeds.push_back(count[i] / inverse_sum[i]);
  }
  return speeds;
}

}  // namespace

LinkTrajectory MatchTrajectory(const GpsTrajectory& trip,
                               const RoadNetwork& net, const MatchConfig& cfg) {
  if (!(cfg.snap_radius_m > 0.0)) {
    throw DomainError("snap radius must be positive");
  }
  if (trip.samples.size() < 2) {
    throw UnmatchableError("trip " + trip.trip_id + " has fewer than 2 samples");
  }
  std::vector<NodeIdx> nodes;
  int snapped = 0;
  int skipped_run = 0;
  for (const GpsSample& s : trip.samples) {
    const std::optional<NodeIdx> node = net.NearestNode(s.point, cfg.snap_radius_m);
    if (!node.has_value()) {
      if (++skipped_run > cfg.max_node_skip) {
        throw UnmatchableError("trip " + trip.trip_id +
                               ": too many consecutive samples off the network");
      }
      continue;
    }
    skipped_run = 0;
    ++snapped;
    if (nodes.empty() || nodes.back() != *node) nodes.push_back(*node);
  }
  if (snapped < 2 || nodes.size() < 2) {
    throw UnmatchableError("trip " + trip.trip_id +
                           " does not snap to two distinct nodes");
  }

  LinkTrajectory out;
  out.trip_id = trip.trip_id;
  out.device = trip.device;
  out.day = LocalDay(trip.origin().t, cfg.utc_offset_minutes);
  out.hour = LocalHour(trip.origin().t, cfg.utc_offset_minutes);
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    Append(out.links, PathOrThrow(net, nodes[i - 1], nodes[i], trip.trip_id));
  }
  out.observed_speed = ObservedSpeeds(trip, out.links, net);
  return out;
}

NoisyEndpointMatch MatchNoisyEndpoint(const GeoPoint& z,
                                      std::span<const LinkIdx> candidates,
                                      const RoadNetwork& net) {
  NoisyEndpointMatch m;
  m.link = net.NearestLink(z, candidates);
  const Link& link = net.link(m.link);
  const LocalFrame local(z);
  const PlanarPoint a = local.Project(net.node(link.from).point);
  const PlanarPoint b = local.Project(net.node(link.to).point);
  const double da = std::hypot(a.x, a.y);
  const double db = std::hypot(b.x, b.y);
  if (da < db) {
    m.node = link.from;
  } else if (db < da) {
    m.node = link.to;
  } else {
    m.node = std::min(link.from, link.to);
  }
  return m;
}

LinkTrajectory RebuildTrajectory(const LinkTrajectory& original,
                                 std::optional<NodeIdx> new_origin,
                                 std::optional<NodeIdx> new_destination,
                                 const RoadNetwork& net) {
  if (!new_origin.has_value() && !new_destination.has_value()) return original;
  const auto& links = original.links;
  if (links.empty()) {
    throw UnmatchableError("trip " + original.trip_id + " has no links");
  }
  const Link& first = net.link(links.front());
  const Link& last = net.link(links.back());

  LinkTrajectory out = original;
  out.links.clear();
  out.observed_speed.clear();
  if (links.size() == 1) {
    const NodeIdx from = new_origin.value_or(first.from);
    const NodeIdx to = new_destination.value_or(first.to);
    Append(out.links, PathOrThrow(net, from, to, original.trip_id));
  } else {
    if (new_origin) {
      Append(out.links, PathOrThrow(net, *new_origin, first.to, original.trip_id));
    } else {
      out.links.push_back(links.front());
    }
    for (std::size_t i = 1; i + 1 < links.size(); ++i) {
      out.links.push_back(links[i]);
    }
    if (new_destination) {
      Append(out.links,
             PathOrThrow(net, last.from, *new_destination, original.trip_id));
    } else {
      out.links.push_back(links.back());
    }
  }
  if (out.links.empty()) {
    throw UnmatchableError("trip " + original.trip_id +
                           " has no links after re-routing its endpoints");
  }
  return out;
}

}  // namespace dpmob
