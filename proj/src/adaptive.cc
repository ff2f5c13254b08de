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

#include "dpmob/adaptive.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "dpmob/errors.h"

namespace dpmob {

void Validate(const BufferConfig& cfg) {
  if (cfg.h2 < 0 || cfg.h1 < cfg.h2) {
    throw DomainError("buffer thresholds need h1 >= h2 >= 0");
  }
  if (!(cfg.initial_m > 0.0) || !(cfg.step_m > 0.0)) {
    throw DomainError("initial buffer and buffer step must be positive");
  }
  if (!(cfg.max_m >= cfg.initial_m) || !std::isfinite(cfg.max_m)) {
    throw DomainError("maximum buffer must be finite and >= initial buffer");
  }
}

BufferResult SelectRadius(const RoadNetwork& net, const GeoPoint& x,
                          int functional_class, const BufferConfig& cfg) {
  Validate(cfg);
  // Links are fetched once per fetch radius and the buffer is grown over the
  // cached distances; the fetch radius doubles when the buffer outgrows it.
  double fetch = std::min(cfg.max_m, std::max(200.0, 4.0 * cfg.initial_m));
  std::vector<RoadNetwork::LinkDistance> found =
      net.LinksWithinWithDistance(x, fetch);
  for (int k = 0;; ++k) {
    const double z = cfg.initial_m + k * cfg.step_m;
    if (z > cfg.max_m) {
      throw SparseNetworkError("buffer reached " + std::to_string(cfg.max_m) +
                               " m without meeting the density thresholds");
    }
    while (z > fetch) {
      fetch = std::min(cfg.max_m, fetch * 2.0);
      found = net.LinksWithinWithDistance(x, fetch);
    }
    int all = 0;
    int same_class = 0;
    for (const auto& ld : found) {
      if (ld.distance > z) continue;
      ++all;
      if (net.link(ld.link).functional_class == functional_class) ++same_class;
    }
    if (all > cfg.h1 && same_class > cfg.h2) {
      BufferResult result;
      result.final_z_m = z;
      result.radius_m = z / 2.0;
      result.iterations = k + 1;
      for (const auto& ld : found) {
        if (ld.distance <= z &&
            net.link(ld.link).functional_class == functional_class) {
          result.buffer_set_fc.push_back(ld.link);
        }
      }
      return result;
    }
  }
}

}  // namespace dpmob
