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

#ifndef DPMOB_ROAD_NETWORK_H_
#define DPMOB_ROAD_NETWORK_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dpmob/geometry.h"

namespace dpmob {

// Dense indices. Both are assigned in lexicographic order of the string ids,
// so comparing indices is the same as comparing ids.
using NodeIdx = std::uint32_t;
using LinkIdx = std::uint32_t;

inline constexpr double kGridCellM = 100.0;

struct Node {
  std::string id;
  GeoPoint point;
};

struct Link {
  std::string id;
  NodeIdx from = 0;
  NodeIdx to = 0;
  std::vector<GeoPoint> geometry;  // >= 2 points, from-node first
  double length_m = 0.0;
  int functional_class = 5;  // 1 (highest capacity) .. 5
  double free_flow_speed = 0.0;  // m/s
  int lanes = 1;
};

// Loader-facing description of one directed link.
struct LinkSpec {
  std::string id;
  std::string from;
  std::string to;
  std::vector<GeoPoint> geometry;
  std::optional<double> length_m;  // computed from geometry when absent
  int functional_class = 5;
  double free_flow_speed = 0.0;
  int lanes = 1;
};

// Directed road graph with a uniform-grid spatial index. Immutable once
// built; every query is const and safe to call concurrently.
class RoadNetwork {
 public:
  class Builder {
   public:
    // Re-adding a node with the same position is a no-op; a different
    // position throws DomainError.
    Builder& AddNode(const std::string& id, const GeoPoint& point);
    // Endpoint nodes are created from the first/last geometry point when
    // they were not added explicitly. Throws DomainError on invalid links.
    Builder& AddLink(LinkSpec spec);
    RoadNetwork Build() &&;

   private:
    std::unordered_map<std::string, GeoPoint> nodes_;
    std::vector<LinkSpec> links_;
    std::unordered_map<std::string, std::size_t> link_ids_;
  };

  RoadNetwork() = default;

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t link_count() const { return links_.size(); }
  bool empty() const { return links_.empty(); }

  const Node& node(NodeIdx n) const { return nodes_[n]; }
  const Link& link(LinkIdx l) const { return links_[l]; }
  std::span<const Node> nodes() const { return nodes_; }
  std::span<const Link> links() const { return links_; }
  std::span<const LinkIdx> outgoing(NodeIdx n) const;
  std::span<const LinkIdx> incoming(NodeIdx n) const;

  std::optional<NodeIdx> FindNode(std::string_view id) const;
  std::optional<LinkIdx> FindLink(std::string_view id) const;

  // Minimal distance in meters from `p` to the link polyline, measured in a
  // local frame anchored at `p`.
  double DistanceToLink(LinkIdx l, const GeoPoint& p) const;

  // Links whose geometry comes within `radius` meters of `center`, ascending.
  std::vector<LinkIdx> LinksWithin(const GeoPoint& center,
                                   double radius) const;
  std::vector<LinkIdx> LinksWithinFc(const GeoPoint& center, double radius,
                                     int functional_class) const;

  struct LinkDistance {
    LinkIdx link;
    double distance;
  };
  // Same membership as LinksWithin, with distances, ascending by link.
  std::vector<LinkDistance> LinksWithinWithDistance(const GeoPoint& center,
                                                    double radius) const;

  // Closest link; ties go to the smallest id. Throws NoCandidateError on an
  // empty network or an empty candidate list.
  LinkIdx NearestLink(const GeoPoint& p) const;
  LinkIdx NearestLink(const GeoPoint& p,
                      std::span<const LinkIdx> candidates) const;

  // Closest node within `max_radius` meters, ties to the smallest id.
  std::optional<NodeIdx> NearestNode(const GeoPoint& p,
                                     double max_radius) const;

  // Minimum-length directed path; among equal lengths the lexicographically
  // smallest link sequence. Empty when from == to. Throws NoPathError.
  std::vector<LinkIdx> ShortestPath(NodeIdx from, NodeIdx to) const;

  double PathLength(std::span<const LinkIdx> path) const;

  // True when consecutive links share a node.
  bool IsConnected(std::span<const LinkIdx> path) const;

  // Frame used by the spatial index.
  const LocalFrame& frame() const { return frame_; }

 private:
  struct Grid {
    double min_x = 0.0;
    double min_y = 0.0;
    int nx = 0;
    int ny = 0;
    std::vector<std::uint32_t> offsets;  // CSR, size nx * ny + 1
    std::vector<std::uint32_t> items;

    std::span<const std::uint32_t> cell(int ix, int iy) const;
  };
  struct CellRange {
    int x0, x1, y0, y1;
    bool empty() const { return x0 > x1 || y0 > y1; }
  };

  CellRange CellsAround(const Grid& g, const GeoPoint& center,
                        double radius) const;
  void BuildIndices();

  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::vector<std::uint32_t> out_offsets_, in_offsets_;
  std::vector<LinkIdx> out_links_, in_links_;
  std::unordered_map<std::string, NodeIdx> node_by_id_;
  std::unordered_map<std::string, LinkIdx> link_by_id_;
  LocalFrame frame_{GeoPoint{}};
  Grid link_grid_;
  Grid node_grid_;
};

}  // namespace dpmob

#endif  // DPMOB_ROAD_NETWORK_H_
