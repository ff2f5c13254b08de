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

#ifndef DPMOB_TESTS_TEST_UTIL_H_
#define DPMOB_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "dpmob/geometry.h"
#include "dpmob/road_network.h"

namespace dpmob::testing {

inline const GeoPoint kTestAnchor{37.87, -122.27};

inline std::string GridNode(int r, int c) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "n%02d_%02d", r, c);
  return buf;
}

inline std::string GridLink(int r0, int c0, int r1, int c1) {
  return "L" + GridNode(r0, c0).substr(1) + ">" + GridNode(r1, c1).substr(1);
}

// Bidirectional rows x cols grid. `fc(horizontal, index)` picks the class of
// every road in row `index` (horizontal) or column `index`.
inline RoadNetwork MakeGrid(
    int rows, int cols, double spacing = 100.0,
    std::function<int(bool, int)> fc = [](bool, int) { return 4; }) {
  const LocalFrame frame(kTestAnchor);
  auto at = [&](int r, int c) {
    return frame.Unproject({c * spacing, r * spacing});
  };
  RoadNetwork::Builder b;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) b.AddNode(GridNode(r, c), at(r, c));
  }
  auto add = [&](int r0, int c0, int r1, int c1, int cls) {
    LinkSpec s;
    s.id = GridLink(r0, c0, r1, c1);
    s.from = GridNode(r0, c0);
    s.to = GridNode(r1, c1);
    s.geometry = {at(r0, c0), at(r1, c1)};
    s.length_m = spacing;
    s.functional_class = cls;
    s.free_flow_speed = cls <= 2 ? 18.0 : 11.0;
    b.AddLink(s);
  };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c + 1 < cols; ++c) {
      add(r, c, r, c + 1, fc(true, r));
      add(r, c + 1, r, c, fc(true, r));
    }
  }
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r + 1 < rows; ++r) {
      add(r, c, r + 1, c, fc(false, c));
      add(r + 1, c, r, c, fc(false, c));
    }
  }
  return std::move(b).Build();
}

// Random directed network inside a `span_m` square: nodes at random
// positions and links with a random interior bend point.
inline RoadNetwork RandomNetwork(std::mt19937_64& rng, int n_nodes,
                                 int n_links, double span_m = 1000.0) {
  const LocalFrame frame(kTestAnchor);
  std::uniform_real_distribution<double> pos(0.0, span_m);
  std::uniform_int_distribution<int> pick(0, n_nodes - 1);
  std::uniform_int_distribution<int> cls(1, 5);
  std::bernoulli_distribution bend(0.5);
  std::vector<GeoPoint> nodes;
  RoadNetwork::Builder b;
  for (int i = 0; i < n_nodes; ++i) {
    nodes.push_back(frame.Unproject({pos(rng), pos(rng)}));
    b.AddNode("v" + std::to_string(100 + i), nodes.back());
  }
  for (int k = 0; k < n_links; ++k) {
    const int u = pick(rng);
    int v = pick(rng);
    if (v == u) v = (u + 1) % n_nodes;
    LinkSpec s;
    s.id = "e" + std::to_string(1000 + k);
    s.from = "v" + std::to_string(100 + u);
    s.to = "v" + std::to_string(100 + v);
    s.geometry.push_back(nodes[u]);
    if (bend(rng)) s.geometry.push_back(frame.Unproject({pos(rng), pos(rng)}));
    s.geometry.push_back(nodes[v]);
    s.functional_class = cls(rng);
    s.free_flow_speed = 10.0;
    b.AddLink(s);
  }
  return std::move(b).Build();
}

namespace internal {
inline void Enumerate(const RoadNetwork& net, NodeIdx at, NodeIdx target,
                      std::vector<bool>& seen, std::vector<LinkIdx>& path,
                      double len, double& best,
                      std::optional<std::vector<LinkIdx>>& best_path) {
  if (at == target) {
    const double tol = 1e-9 * std::max(1.0, len);
    if (!best_path || len < best - tol ||
        (std::abs(len - best) <= tol && path < *best_path)) {
      best = std::min(best, len);
      best_path = path;
    }
    return;
  }
  for (LinkIdx l : net.outgoing(at)) {
    const NodeIdx next = net.link(l).to;
    if (seen[next]) continue;
    seen[next] = true;
    path.push_back(l);
    Enumerate(net, next, target, seen, path, len + net.link(l).length_m, best,
              best_path);
    path.pop_back();
    seen[next] = false;
  }
}
}  // namespace internal

// Exhaustive simple-path search: the lexicographically smallest among the
// shortest paths, or nullopt when `to` is unreachable. Small graphs only.
inline std::optional<std::vector<LinkIdx>> ExhaustiveShortestPath(
    const RoadNetwork& net, NodeIdx from, NodeIdx to) {
  std::vector<bool> seen(net.node_count(), false);
  seen[from] = true;
  std::vector<LinkIdx> path;
  std::optional<std::vector<LinkIdx>> best_path;
  double best = 1e300;
  internal::Enumerate(net, from, to, seen, path, 0.0, best, best_path);
  return best_path;
}

}  // namespace dpmob::testing

#endif  // DPMOB_TESTS_TEST_UTIL_H_
