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

#include "dpmob/road_network.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <utility>

#include "dpmob/errors.h"

namespace dpmob {
namespace {

constexpr double kNodeMismatchM = 5.0;
constexpr double kLengthSlack = 0.999;

double ChordLength(const std::vector<GeoPoint>& geometry) {
  double total = 0.0;
  for (std::size_t i = 1; i < geometry.size(); ++i) {
    total += HaversineDistance(geometry[i - 1], geometry[i]);
  }
  return total;
}

void CheckNodePosition(const std::string& node, const GeoPoint& known,
                       const GeoPoint& seen) {
  if (HaversineDistance(known, seen) > kNodeMismatchM) {
    throw DomainError("node '" + node +
                      "' has inconsistent positions across links");
  }
}

// Per-thread Dijkstra scratch space, reset lazily through `touched`.
struct SearchWorkspace {
  std::vector<double> dist;
  std::vector<char> settled;
  std::vector<NodeIdx> touched;

  void Prepare(std::size_t n) {
    if (dist.size() != n) {
      dist.assign(n, std::numeric_limits<double>::infinity());
      settled.assign(n, 0);
      touched.clear();
      return;
    }
    for (NodeIdx v : touched) {
      dist[v] = std::numeric_limits<double>::infinity();
      settled[v] = 0;
    }
    touched.clear();
  }
};

}  // namespace

RoadNetwork::Builder& RoadNetwork::Builder::AddNode(const std::string& id,
                                                    const GeoPoint& point) {
  if (id.empty()) throw DomainError("node id must not be empty");
  if (!IsValid(point)) throw DomainError("node '" + id + "' has bad position");
  auto [it, inserted] = nodes_.emplace(id, point);
  if (!inserted) CheckNodePosition(id, it->second, point);
  return *this;
}

RoadNetwork::Builder& RoadNetwork::Builder::AddLink(LinkSpec spec) {
  const std::string where = "link '" + spec.id + "'";
  if (spec.id.empty()) throw DomainError("link id must not be empty");
  if (spec.from.empty() || spec.to.empty()) {
    throw DomainError(where + " is missing from/to node ids");
  }
  if (spec.geometry.size() < 2) {
    throw DomainError(where + " needs at least two geometry points");
  }
  for (const GeoPoint& p : spec.geometry) {
    if (!IsValid(p)) throw DomainError(where + " has an invalid coordinate");
  }
  if (spec.functional_class < 1 || spec.functional_class > 5) {
    throw DomainError(where + " functional class must be in [1, 5]");
  }
  if (!std::isfinite(spec.free_flow_speed) || spec.free_flow_speed <= 0.0) {
    throw DomainError(where + " free-flow speed must be positive");
  }
  if (spec.lanes < 1) throw DomainError(where + " lanes must be positive");
  const double chord = ChordLength(spec.geometry);
  if (spec.length_m.has_value()) {
    const double len = *spec.length_m;
    if (!std::isfinite(len) || len <= 0.0) {
      throw DomainError(where + " length must be positive");
    }
    if (len < chord * kLengthSlack) {
      throw DomainError(where + " length is shorter than its geometry");
    }
  } else {
    if (chord <= 0.0) throw DomainError(where + " has zero-length geometry");
    spec.length_m = chord;
  }
  if (!link_ids_.emplace(spec.id, links_.size()).second) {
    throw DomainError("duplicate " + where);
  }
  AddNode(spec.from, spec.geometry.front());
  AddNode(spec.to, spec.geometry.back());
  links_.push_back(std::move(spec));
  return *this;
}

RoadNetwork RoadNetwork::Builder::Build() && {
  RoadNetwork net;
  std::vector<std::string> node_ids;
  node_ids.reserve(nodes_.size());
  for (const auto& [id, p] : nodes_) node_ids.push_back(id);
  std::sort(node_ids.begin(), node_ids.end());
  net.nodes_.reserve(node_ids.size());
  for (const std::string& id : node_ids) {
    net.node_by_id_.emplace(id, static_cast<NodeIdx>(net.nodes_.size()));
    net.nodes_.push_back({id, nodes_.at(id)});
  }

  std::sort(links_.begin(), links_.end(),
            [](const LinkSpec& a, const LinkSpec& b) { return a.id < b.id; });
  net.links_.reserve(links_.size());
  for (LinkSpec& spec : links_) {
    Link link;
    link.id = std::move(spec.id);
    link.from = net.node_by_id_.at(spec.from);
    link.to = net.node_by_id_.at(spec.to);
    link.geometry = std::move(spec.geometry);
    link.length_m = *spec.length_m;
    link.functional_class = spec.functional_class;
    link.free_flow_speed = spec.free_flow_speed;
    link.lanes = spec.lanes;
    net.link_by_id_.emplace(link.id, static_cast<LinkIdx>(net.links_.size()));
    net.links_.push_back(std::move(link));
  }
  net.BuildIndices();
  return net;
}

void RoadNetwork::BuildIndices() {
  const std::size_t n = nodes_.size();
  out_offsets_.assign(n + 1, 0);
  in_offsets_.assign(n + 1, 0);
  for (const Link& l : links_) {
    ++out_offsets_[l.from + 1];
    ++in_offsets_[l.to + 1];
  }
  for (std::size_t i = 0; i < n; ++i) {
    out_offsets_[i + 1] += out_offsets_[i];
    in_offsets_[i + 1] += in_offsets_[i];
  }
  out_links_.resize(links_.size());
  in_links_.resize(links_.size());
  std::vector<std::uint32_t> out_fill(out_offsets_.begin(),
                                      out_offsets_.end() - 1);
  std::vector<std::uint32_t> in_fill(in_offsets_.begin(),
                                     in_offsets_.end() - 1);
  // Ascending link order within each adjacency list.
  for (LinkIdx l = 0; l < links_.size(); ++l) {
    out_links_[out_fill[links_[l].from]++] = l;
    in_links_[in_fill[links_[l].to]++] = l;
  }

  double min_lat = 90.0, max_lat = -90.0, min_lon = 180.0, max_lon = -180.0;
  auto extend = [&](const GeoPoint& p) {
    min_lat = std::min(min_lat, p.lat);
    max_lat = std::max(max_lat, p.lat);
    min_lon = std::min(min_lon, p.lon);
    max_lon = std::max(max_lon, p.lon);
  };
  for (const Node& nd : nodes_) extend(nd.point);
  for (const Link& l : links_) {
    for (const GeoPoint& p : l.geometry) extend(p);
  }
  if (nodes_.empty()) return;
  frame_ = LocalFrame({(min_lat + max_lat) / 2.0, (min_lon + max_lon) / 2.0});

  const PlanarPoint lo = frame_.Project({min_lat, min_lon});
  const PlanarPoint hi = frame_.Project({max_lat, max_lon});
  auto init_grid = [&](Grid& g) {
    g.min_x = lo.x - 1.0;
    g.min_y = lo.y - 1.0;
    g.nx = static_cast<int>(std::floor((hi.x + 1.0 - g.min_x) / kGridCellM)) + 1;
    g.ny = static_cast<int>(std::floor((hi.y + 1.0 - g.min_y) / kGridCellM)) + 1;
  };
  auto cell_of = [](double v, double min, int count) {
    return std::clamp(static_cast<int>(std::floor((v - min) / kGridCellM)), 0,
                      count - 1);
  };
  auto fill_grid = [](Grid& g,
                      std::vector<std::pair<std::uint32_t, std::uint32_t>>&
                          pairs) {
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    g.offsets.assign(static_cast<std::size_t>(g.nx) * g.ny + 1, 0);
    g.items.clear();
    g.items.reserve(pairs.size());
    for (const auto& [cell, item] : pairs) {
      ++g.offsets[cell + 1];
      g.items.push_back(item);
    }
    for (std::size_t i = 1; i < g.offsets.size(); ++i) {
      g.offsets[i] += g.offsets[i - 1];
    }
  };

  init_grid(link_grid_);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (LinkIdx l = 0; l < links_.size(); ++l) {
    const auto& geom = links_[l].geometry;
    for (std::size_t i = 1; i < geom.size(); ++i) {
      const PlanarPoint a = frame_.Project(geom[i - 1]);
      const PlanarPoint b = frame_.Project(geom[i]);
      const int x0 = cell_of(std::min(a.x, b.x), link_grid_.min_x,
                             link_grid_.nx);
      const int x1 = cell_of(std::max(a.x, b.x), link_grid_.min_x,
                             link_grid_.nx);
      const int y0 = cell_of(std::min(a.y, b.y), link_grid_.min_y,
                             link_grid_.ny);
      const int y1 = cell_of(std::max(a.y, b.y), link_grid_.min_y,
                             link_grid_.ny);
      for (int iy = y0; iy <= y1; ++iy) {
        for (int ix = x0; ix <= x1; ++ix) {
          pairs.emplace_back(iy * link_grid_.nx + ix, l);
        }
      }
    }
  }
  fill_grid(link_grid_, pairs);

  init_grid(node_grid_);
  pairs.clear();
  for (NodeIdx v = 0; v < nodes_.size(); ++v) {
    const PlanarPoint p = frame_.Project(nodes_[v].point);
    const int ix = cell_of(p.x, node_grid_.min_x, node_grid_.nx);
    const int iy = cell_of(p.y, node_grid_.min_y, node_grid_.ny);
    pairs.emplace_back(iy * node_grid_.nx + ix, v);
  }
  fill_grid(node_grid_, pairs);
}

std::span<const std::uint32_t> RoadNetwork::Grid::cell(int ix, int iy) const {
  const std::size_t c = static_cast<std::size_t>(iy) * nx + ix;
  return {items.data() + offsets[c], items.data() + offsets[c + 1]};
}

RoadNetwork::CellRange RoadNetwork::CellsAround(const Grid& g,
                                                const GeoPoint& center,
                                                double radius) const {
  if (g.nx == 0) return {0, -1, 0, -1};
  const PlanarPoint p = frame_.Project(center);
  // Index distances are in the network frame while exact distances use a
  // frame anchored at the query, so widen by the east-west scale mismatch.
  const double ratio = std::cos(DegToRad(center.lat)) /
                       std::cos(DegToRad(frame_.anchor().lat));
  const double rel = std::abs(ratio - 1.0) + std::abs(1.0 / ratio - 1.0);
  const double reach = radius * (1.0 + 1.5 * rel) + 1.0;
  auto range = [&](double v, double min, int count, int& first, int& last) {
    const double lo = std::floor((v - reach - min) / kGridCellM);
    const double hi = std::floor((v + reach - min) / kGridCellM);
    if (hi < 0.0 || lo >= count) {
      first = 0;
      last = -1;
      return;
    }
    first = static_cast<int>(std::max(lo, 0.0));
    last = static_cast<int>(std::min(hi, static_cast<double>(count - 1)));
  };
  CellRange r{};
  range(p.x, g.min_x, g.nx, r.x0, r.x1);
  range(p.y, g.min_y, g.ny, r.y0, r.y1);
  return r;
}

std::span<const LinkIdx> RoadNetwork::outgoing(NodeIdx n) const {
  return {out_links_.data() + out_offsets_[n],
          out_links_.data() + out_offsets_[n + 1]};
}

std::span<const LinkIdx> RoadNetwork::incoming(NodeIdx n) const {
  return {in_links_.data() + in_offsets_[n],
          in_links_.data() + in_offsets_[n + 1]};
}

std::optional<NodeIdx> RoadNetwork::FindNode(std::string_view id) const {
  auto it = node_by_id_.find(std::string(id));
  if (it == node_by_id_.end()) return std::nullopt;
  return it->second;
}

std::optional<LinkIdx> RoadNetwork::FindLink(std::string_view id) const {
  auto it = link_by_id_.find(std::string(id));
  if (it == link_by_id_.end()) return std::nullopt;
  return it->second;
}

double RoadNetwork::DistanceToLink(LinkIdx l, const GeoPoint& p) const {
  const LocalFrame local(p);
  const PlanarPoint origin{0.0, 0.0};
  const auto& geom = links_[l].geometry;
  double best = std::numeric_limits<double>::infinity();
  PlanarPoint prev = local.Project(geom[0]);
  for (std::size_t i = 1; i < geom.size(); ++i) {
    const PlanarPoint cur = local.Project(geom[i]);
    best = std::min(best, PointToSegment(origin, prev, cur).distance);
    prev = cur;
  }
  return best;
}

std::vector<RoadNetwork::LinkDistance> RoadNetwork::LinksWithinWithDistance(
    const GeoPoint& center, double radius) const {
  std::vector<LinkDistance> out;
  if (!(radius >= 0.0)) return out;
  const CellRange r = CellsAround(link_grid_, center, radius);
  if (r.empty()) return out;
  std::vector<LinkIdx> candidates;
  for (int iy = r.y0; iy <= r.y1; ++iy) {
    for (int ix = r.x0; ix <= r.x1; ++ix) {
      auto cell = link_grid_.cell(ix, iy);
      candidates.insert(candidates.end(), cell.begin(), cell.end());
    }
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());
  for (LinkIdx l : candidates) {
    const double d = DistanceToLink(l, center);
    if (d <= radius) out.push_back({l, d});
  }
  return out;
}

std::vector<LinkIdx> RoadNetwork::LinksWithin(const GeoPoint& center,
                                              double radius) const {
  std::vector<LinkIdx> out;
  for (const LinkDistance& ld : LinksWithinWithDistance(center, radius)) {
    out.push_back(ld.link);
  }
  return out;
}

std::vector<LinkIdx> RoadNetwork::LinksWithinFc(const GeoPoint& center,
                                                double radius,
                                                int functional_class) const {
  std::vector<LinkIdx> out;
  for (const LinkDistance& ld : LinksWithinWithDistance(center, radius)) {
    if (links_[ld.link].functional_class == functional_class) {
      out.push_back(ld.link);
    }
  }
  return out;
}

LinkIdx RoadNetwork::NearestLink(const GeoPoint& p) const {
  if (links_.empty()) throw NoCandidateError("network has no links");
  for (double radius = kGridCellM;; radius *= 2.0) {
    const auto found = LinksWithinWithDistance(p, radius);
    if (!found.empty()) {
      // Ascending link order, so strict < keeps the smallest id on ties.
      const LinkDistance* best = &found.front();
      for (const LinkDistance& ld : found) {
        if (ld.distance < best->distance) best = &ld;
      }
      return best->link;
    }
    const CellRange r = CellsAround(link_grid_, p, radius);
    const bool covers_all = !r.empty() && r.x0 == 0 && r.y0 == 0 &&
                            r.x1 == link_grid_.nx - 1 &&
                            r.y1 == link_grid_.ny - 1;
    if (covers_all || radius > 4.0 * kEarthRadiusM) {
      std::vector<LinkIdx> all(links_.size());
      for (LinkIdx l = 0; l < all.size(); ++l) all[l] = l;
      return NearestLink(p, all);
    }
  }
}

LinkIdx RoadNetwork::NearestLink(const GeoPoint& p,
                                 std::span<const LinkIdx> candidates) const {
  if (candidates.empty()) throw NoCandidateError("empty candidate set");
  LinkIdx best = candidates.front();
  double best_d = DistanceToLink(best, p);
  for (LinkIdx l : candidates.subspan(1)) {
    const double d = DistanceToLink(l, p);
    if (d < best_d || (d == best_d && l < best)) {
      best = l;
      best_d = d;
    }
  }
  return best;
}

std::optional<NodeIdx> RoadNetwork::NearestNode(const GeoPoint& p,
                                                double max_radius) const {
  const CellRange r = CellsAround(node_grid_, p, max_radius);
  if (r.empty()) return std::nullopt;
  const LocalFrame local(p);
  std::optional<NodeIdx> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (int iy = r.y0; iy <= r.y1; ++iy) {
    for (int ix = r.x0; ix <= r.x1; ++ix) {
      for (NodeIdx v : node_grid_.cell(ix, iy)) {
        const PlanarPoint q = local.Project(nodes_[v].point);
        const double d = std::hypot(q.x, q.y);
        if (d > max_radius) continue;
        if (d < best_d || (d == best_d && v < *best)) {
          best = v;
          best_d = d;
        }
      }
    }
  }
  return best;
}

std::vector<LinkIdx> RoadNetwork::ShortestPath(NodeIdx from, NodeIdx to) const {
  if (from >= nodes_.size() || to >= nodes_.size()) {
    throw DomainError("shortest path endpoint out of range");
  }
  if (from == to) return {};

  // Backward search from `to` gives the remaining distance of every node that
  // can lie on a shortest path; a forward greedy walk over tight links then
  // yields the lexicographically smallest shortest path.
  thread_local SearchWorkspace ws;
  ws.Prepare(nodes_.size());
  using Entry = std::pair<double, NodeIdx>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  ws.dist[to] = 0.0;
  ws.touched.push_back(to);
  heap.emplace(0.0, to);
  bool reached = false;
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (ws.settled[v]) continue;
    ws.settled[v] = 1;
    if (v == from) {
      reached = true;
      break;
    }
    for (LinkIdx l : incoming(v)) {
      const NodeIdx u = links_[l].from;
      const double nd = d + links_[l].length_m;
      if (nd < ws.dist[u]) {
        if (std::isinf(ws.dist[u])) ws.touched.push_back(u);
        ws.dist[u] = nd;
        heap.emplace(nd, u);
      }
    }
  }
  if (!reached) {
    throw NoPathError("no path from node '" + nodes_[from].id + "' to '" +
                      nodes_[to].id + "'");
  }

  const double total = ws.dist[from];
  const double tol = 1e-9 * std::max(1.0, total);
  std::vector<LinkIdx> path;
  NodeIdx u = from;
  double travelled = 0.0;
  while (u != to) {
    bool advanced = false;
    for (LinkIdx l : outgoing(u)) {
      const NodeIdx v = links_[l].to;
      if (std::isinf(ws.dist[v])) continue;
      const double through = travelled + links_[l].length_m + ws.dist[v];
      if (through <= total + tol) {
        path.push_back(l);
        travelled += links_[l].length_m;
        u = v;
        advanced = true;
        break;
      }
    }
    if (!advanced || path.size() > links_.size()) {
      throw NoPathError("shortest path reconstruction failed");
    }
  }
  return path;
}

double RoadNetwork::PathLength(std::span<const LinkIdx> path) const {
  double total = 0.0;
  for (LinkIdx l : path) total += links_[l].length_m;
  return total;
}

bool RoadNetwork::IsConnected(std::span<const LinkIdx> path) const {
  for (std::size_t i = 1; i < path.size(); ++i) {
    if (links_[path[i - 1]].to != links_[path[i]].from) return false;
  }
  return true;
}

}  // namespace dpmob
