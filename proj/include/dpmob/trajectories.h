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

#ifndef DPMOB_TRAJECTORIES_H_
#define DPMOB_TRAJECTORIES_H_

#include <bitset>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dpmob/geometry.h"
#include "dpmob/road_network.h"

namespace dpmob {

inline constexpr double kDefaultTripGapS = 300.0;
inline constexpr int kDefaultUtcOffsetMinutes = -8 * 60;

struct GpsSample {
  std::string device;
  double t = 0.0;  // seconds since the Unix epoch, UTC
  GeoPoint point;
  std::optional<double> speed_mps;
  std::optional<double> heading_deg;
};

// One trip of one device; samples strictly increasing in time. The first
// sample is the origin and the last the destination.
struct GpsTrajectory {
  std::string trip_id;
  std::string device;
  std::vector<GpsSample> samples;

  const GpsSample& origin() const { return samples.front(); }
  const GpsSample& destination() const { return samples.back(); }
};

// Connected, ordered link sequence for one trip.
struct LinkTrajectory {
  std::string trip_id;
  std::string device;
  std::int64_t day = 0;  // local civil day, days since 1970-01-01
  int hour = 0;          // local hour of the origin sample
  std::vector<LinkIdx> links;
  // Either empty or one observed speed (m/s) per link.
  std::vector<double> observed_speed;

  LinkIdx origin_link() const { return links.front(); }
  LinkIdx destination_link() const { return links.back(); }
};

// Splits one device's time-ordered stream into trips. A trip boundary falls
// wherever consecutive samples are more than `gap_s` apart; trips with fewer
// than two samples are dropped. Samples repeating the previous timestamp are
// discarded. Trip ids are "<device>#<n>" with n counting from 0.
std::vector<GpsTrajectory> SplitTrips(std::span<const GpsSample> stream,
                                      double gap_s = kDefaultTripGapS);

// Groups samples by device, orders each device stream by time and splits it.
// Output is ordered by device id, then time.
std::vector<GpsTrajectory> BuildTrips(std::vector<GpsSample> samples,
                                      double gap_s = kDefaultTripGapS);

// Monday = 0 ... Sunday = 6.
using WeekdaySet = std::bitset<7>;

// Accepts M, T, W, Th, F, Sa, Su (and three-letter names), comma separated.
WeekdaySet ParseWeekdays(std::string_view labels);
std::string FormatWeekdays(const WeekdaySet& days);

// Hour window [hour_start, hour_end) on selected weekdays, in a fixed UTC
// offset. `dates`, when non-empty, further restricts to those local days.
struct TimeWindow {
  int hour_start = 0;
  int hour_end = 24;
  WeekdaySet days = WeekdaySet().set();
  std::vector<std::int64_t> dates;
  int utc_offset_minutes = kDefaultUtcOffsetMinutes;

  bool Contains(double t) const;
  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

std::int64_t LocalDay(double t, int utc_offset_minutes);
int LocalHour(double t, int utc_offset_minutes);
int LocalWeekday(double t, int utc_offset_minutes);  // Monday = 0

// Keeps trips whose origin timestamp falls inside the window.
std::vector<GpsTrajectory> WindowFilter(std::span<const GpsTrajectory> corpus,
                                        const TimeWindow& window);

// ISO-8601 with an explicit designator: "2019-01-15T21:30:00Z" or a +hh:mm
// offset; fractional seconds allowed. Throws DomainError.
double ParseIso8601(std::string_view text);
// Always UTC with a Z suffix; fractional seconds only when present.
std::string FormatIso8601(double t);

// "YYYY-MM-DD" <-> days since epoch.
std::int64_t ParseDate(std::string_view text);
std::string FormatDate(std::int64_t day);

}  // namespace dpmob

#endif  // DPMOB_TRAJECTORIES_H_
