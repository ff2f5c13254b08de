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

#ifndef DPMOB_SYNTHETIC_H_
#define DPMOB_SYNTHETIC_H_

#include <cstdint>
#include <vector>

#include "dpmob/geometry.h"
#include "dpmob/road_network.h"
#include "dpmob/trajectories.h"

namespace dpmob {

// Bidirectional grid city. Every arterial_every-th row and column (offset
// chosen by the seed) is an arterial: functional class 2 at 18 m/s, two
// lanes. Other streets are class 4 at 11 m/s.
struct SynthCityConfig {
  int rows = 20;
  int cols = 20;
  double spacing_m = 100.0;
  int arterial_every = 5;
  std::uint64_t seed = 42;
  GeoPoint center{37.8716, -122.2727};
};

RoadNetwork GenerateCity(const SynthCityConfig& cfg);

// Local days 2019-01-15..17 and 2019-01-22..24 (Tuesday to Thursday).
std::vector<std::int64_t> DefaultSynthDays();

struct SynthTripConfig {
  int n_trips = 600;  // per day
  int n_devices = 1500;
  std::vector<std::int64_t> days = DefaultSynthDays();
  int hour_start = 13;
  int hour_end = 14;
  int utc_offset_minutes = kDefaultUtcOffsetMinutes;
  double od_popularity_alpha = 1.0;  // Zipf exponent over nodes
  double gps_interval_s = 30.0;
  double jitter_sigma_m = 5.0;
  // Fraction of devices that drive their day-one OD on every day.
  double repeat_fraction = 0.05;
  std::uint64_t seed = 42;
  int threads = 0;
};

struct SynthCorpus {
  std::vector<GpsTrajectory> gps;  // ordered by device, then time
  std::vector<LinkTrajectory> truth;  // aligned with `gps`
};

// Origins and destinations are Zipf-weighted over a seeded node ranking and
// routed along the shortest path at free-flow pace. Samples are laid every
// gps_interval_s (plus one at arrival) with isotropic Gaussian jitter. Trip
// ids follow SplitTrips numbering, so the corpus matches what reading its
// samples back produces.
SynthCorpus GenerateTrips(const RoadNetwork& net, const SynthTripConfig& cfg);

}  // namespace dpmob

#endif  // DPMOB_SYNTHETIC_H_
