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

#include "dpmob/trajectories.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>

#include "dpmob/errors.h"

namespace dpmob {
namespace {

constexpr double kSecondsPerDay = 86400.0;

int ParseFixedInt(std::string_view text, std::size_t pos, std::size_t len) {
  if (pos + len > text.size()) throw DomainError("truncated timestamp");
  int value = 0;
  const char* first = text.data() + pos;
  auto [ptr, ec] = std::from_chars(first, first + len, value);
  if (ec != std::errc() || ptr != first + len) {
    throw DomainError("bad timestamp field in '" + std::string(text) + "'");
  }
  return value;
}

void Expect(std::string_view text, std::size_t pos, std::string_view chars) {
  if (pos >= text.size() || chars.find(text[pos]) == std::string_view::npos) {
    throw DomainError("malformed timestamp '" + std::string(text) + "'");
  }
}

std::int64_t CivilToDays(int y, int m, int d) {
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw DomainError("invalid calendar date");
  return sys_days{ymd}.time_since_epoch().count();
}

}  // namespace

std::vector<GpsTrajectory> SplitTrips(std::span<const GpsSample> stream,
                                      double gap_s) {
  std::vector<GpsTrajectory> trips;
  std::vector<GpsSample> current;
  auto flush = [&]() {
    if (current.size() >= 2) {
      GpsTrajectory trip;
      trip.device = current.front().device;
      trip.trip_id = trip.device + "#" + std::to_string(trips.size());
      trip.samples = std::move(current);
      trips.push_back(std::move(trip));
    }
    current.clear();
  };
  for (const GpsSample& s : stream) {
    if (!current.empty()) {
      const double dt = s.t - current.back().t;
      if (dt <= 0.0) continue;
      if (dt > gap_s) flush();
    }
    current.push_back(s);
  }
  if (!current.empty()) flush();
  return trips;
}

std::vector<GpsTrajectory> BuildTrips(std::vector<GpsSample> samples,
                                      double gap_s) {
  std::stable_sort(samples.begin(), samples.end(),
                   [](const GpsSample& a, const GpsSample& b) {
                     if (a.device != b.device) return a.device < b.device;
                     return a.t < b.t;
                   });
  std::vector<GpsTrajectory> out;
  std::size_t begin = 0;
  while (begin < samples.size()) {
    std::size_t end = begin;
    while (end < samples.size() && samples[end].device == samples[begin].device) {
      ++end;
    }
    auto trips = SplitTrips(
        std::span<const GpsSample>(samples.data() + begin, end - begin), gap_s);
    for (auto& t : trips) out.push_back(std::move(t));
    begin = end;
  }
  return out;
}

WeekdaySet ParseWeekdays(std::string_view labels) {
  static const std::map<std::string, int> kNames = {
      {"m", 0},   {"mon", 0}, {"t", 1},   {"tu", 1},  {"tue", 1},
      {"w", 2},   {"wed", 2}, {"th", 3},  {"thu", 3}, {"f", 4},
      {"fri", 4}, {"sa", 5},  {"sat", 5}, {"su", 6},  {"sun", 6}};
  WeekdaySet days;
  std::size_t pos = 0;
  while (pos <= labels.size()) {
    std::size_t comma = labels.find(',', pos);
    if (comma == std::string_view::npos) comma = labels.size();
    std::string token;
    for (char c : labels.substr(pos, comma - pos)) {
      if (!std::isspace(static_cast<unsigned char>(c))) {
        token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      }
    }
    if (!token.empty()) {
      auto it = kNames.find(token);
      if (it == kNames.end()) {
        throw DomainError("unknown weekday label '" + token + "'");
      }
      days.set(it->second);
    }
    pos = comma + 1;
  }
  if (days.none()) throw DomainError("empty weekday set");
  return days;
}

std::string FormatWeekdays(const WeekdaySet& days) {
  static const char* kLabels[] = {"M", "T", "W", "Th", "F", "Sa", "Su"};
  std::string out;
  for (int i = 0; i < 7; ++i) {
    if (!days.test(i)) continue;
    if (!out.empty()) out += ',';
    out += kLabels[i];
  }
  return out;
}

std::int64_t LocalDay(double t, int utc_offset_minutes) {
  return static_cast<std::int64_t>(
      std::floor((t + utc_offset_minutes * 60.0) / kSecondsPerDay));
}

int LocalHour(double t, int utc_offset_minutes) {
  const double local = t + utc_offset_minutes * 60.0;
  const double sod = local - std::floor(local / kSecondsPerDay) * kSecondsPerDay;
  return std::min(23, static_cast<int>(sod / 3600.0));
}

int LocalWeekday(double t, int utc_offset_minutes) {
  // 1970-01-01 was a Thursday (index 3).
  const std::int64_t day = LocalDay(t, utc_offset_minutes);
  return static_cast<int>(((day + 3) % 7 + 7) % 7);
}

bool TimeWindow::Contains(double t) const {
  const int hour = LocalHour(t, utc_offset_minutes);
  if (hour < hour_start || hour >= hour_end) return false;
  if (!days.test(LocalWeekday(t, utc_offset_minutes))) return false;
  if (!dates.empty()) {
    const std::int64_t day = LocalDay(t, utc_offset_minutes);
    return std::find(dates.begin(), dates.end(), day) != dates.end();
  }
  return true;
}

std::vector<GpsTrajectory> WindowFilter(std::span<const GpsTrajectory> corpus,
                                        const TimeWindow& window) {
  std::vector<GpsTrajectory> out;
  for (const GpsTrajectory& trip : corpus) {
    if (window.Contains(trip.origin().t)) out.push_back(trip);
  }
  return out;
}

double ParseIso8601(std::string_view text) {
  // YYYY-MM-DDTHH:MM:SS[.fff](Z|+hh:mm|-hh:mm)
  const int year = ParseFixedInt(text, 0, 4);
  Expect(text, 4, "-");
  const int month = ParseFixedInt(text, 5, 2);
  Expect(text, 7, "-");
  const int mday = ParseFixedInt(text, 8, 2);
  Expect(text, 10, "T ");
  const int hh = ParseFixedInt(text, 11, 2);
  Expect(text, 13, ":");
  const int mm = ParseFixedInt(text, 14, 2);
  Expect(text, 16, ":");
  const int ss = ParseFixedInt(text, 17, 2);
  if (hh > 23 || mm > 59 || ss > 60) throw DomainError("time out of range");
  std::size_t pos = 19;
  double frac = 0.0;
  if (pos < text.size() && text[pos] == '.') {
    std::size_t end = pos + 1;
    while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end]))) ++end;
    if (end == pos + 1) throw DomainError("empty fractional seconds");
    std::string digits = "0" + std::string(text.substr(pos, end - pos));
    frac = std::strtod(digits.c_str(), nullptr);
    pos = end;
  }
  int offset_s = 0;
  if (pos < text.size() && text[pos] == 'Z' && pos + 1 == text.size()) {
    offset_s = 0;
  } else if (pos < text.size() && (text[pos] == '+' || text[pos] == '-') &&
             text.size() == pos + 6) {
    const int oh = ParseFixedInt(text, pos + 1, 2);
    Expect(text, pos + 3, ":");
    const int om = ParseFixedInt(text, pos + 4, 2);
    offset_s = (oh * 3600 + om * 60) * (text[pos] == '+' ? 1 : -1);
  } else {
    throw DomainError("timestamp '" + std::string(text) +
                      "' lacks an explicit UTC designator");
  }
  const std::int64_t days = CivilToDays(year, month, mday);
  return static_cast<double>(days) * kSecondsPerDay + hh * 3600.0 +
         mm * 60.0 + ss + frac - offset_s;
}

std::string FormatIso8601(double t) {
  const double whole = std::floor(t);
  std::int64_t secs = static_cast<std::int64_t>(whole);
  long micros = std::lround((t - whole) * 1e6);
  if (micros == 1000000) {
    ++secs;
    micros = 0;
  }
  std::int64_t day = secs >= 0 ? secs / 86400 : -((-secs + 86399) / 86400);
  const std::int64_t sod = secs - day * 86400;
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%sT%02d:%02d:%02d", FormatDate(day).c_str(),
                static_cast<int>(sod / 3600), static_cast<int>(sod / 60 % 60),
                static_cast<int>(sod % 60));
  std::string out = buf;
  if (micros != 0) {
    std::snprintf(buf, sizeof(buf), ".%06ld", micros);
    std::string frac = buf;
    while (frac.back() == '0') frac.pop_back();
    out += frac;
  }
  return out + "Z";
}

std::int64_t ParseDate(std::string_view text) {
  if (text.size() != 10) throw DomainError("date must be YYYY-MM-DD");
  const int year = ParseFixedInt(text, 0, 4);
  Expect(text, 4, "-");
  const int month = ParseFixedInt(text, 5, 2);
  Expect(text, 7, "-");
  const int mday = ParseFixedInt(text, 8, 2);
  return CivilToDays(year, month, mday);
}

std::string FormatDate(std::int64_t day) {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{days{day}}};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

}  // namespace dpmob
