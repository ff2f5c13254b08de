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

#ifndef DPMOB_ADAPTIVE_H_
#define DPMOB_ADAPTIVE_H_

#include <vector>

#include "dpmob/geometry.h"
#include "dpmob/road_network.h"

namespace dpmob {

// Density thresholds and buffer growth schedule for noise radius selection.
struct BufferConfig {
  int h1 = 8;  // total links in the buffer must exceed this
  int h2 = 3;  // same-class links in the buffer must exceed this
  double initial_m = 20.0;
  double step_m = 10.0;
  double max_m = 5000.0;
};

// Throws DomainError unless h1 >= h2 >= 0, initial_m > 0, step_m > 0 and
// max_m >= initial_m.
void Validate(const BufferConfig& cfg);

struct BufferResult {
  double radius_m = 0.0;  // final_z_m / 2
  std::vector<LinkIdx> buffer_set_fc;  // ascending, non-empty
  double final_z_m = 0.0;
  int iterations = 0;  // buffer sizes probed
};

// Grows the buffer Z = initial, initial + step, ... and stops at the first Z
// where more than h1 links and more than h2 links of `functional_class` lie
// within Z of `x`. Throws SparseNetworkError if Z would exceed max_m.
BufferResult SelectRadius(const RoadNetwork& net, const GeoPoint& x,
                          int functional_class, const BufferConfig& cfg);

}  // namespace dpmob

#endif  // DPMOB_ADAPTIVE_H_
