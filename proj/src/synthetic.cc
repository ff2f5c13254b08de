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

#include "dpmob/synthetic.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <string>
#include <utility>

#include "dpmob/errors.h"
#include "dpmob/noise.h"
#include "dpmob/parallel.h"

namespace dpmob {
namespace {

constexpr int kMaxOdRetries = 1000;
constexpr double kSameDayTripSpacingS = 360.0;

std::string PaddedId(char prefix, int width, int a, int b) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%c%0*d_%0*d", prefix, width, a, width, b);
  return buf;
}

std::size_t UniformIndex(NoiseRng& rng, std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(rng.Uniform() *
                                                  static_cast<double>(n)));
}

template <typename T>
void Shuffle(std::vector<T>& v, NoiseRng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[UniformIndex(rng, i)]);
  }
}

struct TripPlan {
  std::size_t device = 0;
  std::vector<LinkIdx> route;
  double start = 0.0;     // UTC seconds
  double duration = 0.0;  // free-flow travel time
};

void Validate(const SynthTripConfig& cfg) {
  if (cfg.n_trips < 1) throw DomainError("n_trips must be >= 1");
  if (cfg.n_devices < 1) throw DomainError("n_devices must be >= 1");
  if (cfg.days.empty()) throw DomainError("at least one day is required");
  if (cfg.hour_start < 0 || cfg.hour_end > 24 ||
      cfg.hour_start >= cfg.hour_end) {
    throw DomainError("hour window must satisfy 0 <= start < end <= 24");
  }
  if (!(cfg.od_popularity_alpha >= 0.0)) {
    throw DomainError("od_popularity_alpha must be >= 0");
  }
  if (!(cfg.gps_interval_s > 0.0)) {
    throw DomainError("gps_interval_s must be positive");
  }
  if (!(cfg.jitter_sigma_m >= 0.0)) {
    throw DomainError("jitter_sigma_m must be >= 0");
  }
  if (!(cfg.repeat_fraction >= 0.0 && cfg.repeat_fraction <= 1.0)) {
    throw DomainError("repeat_fraction must be in [0, 1]");
  }
}

// Position and heading at `tau` seconds into the route.
struct RoutePosition {
  PlanarPoint p;
  double heading_deg = 0.0;
  double speed = 0.0;
};

RoutePosition Locate(const RoadNetwork& net, std::span<const LinkIdx> route,
                     double tau) {
  const LocalFrame& frame = net.frame();
  for (std::size_t i = 0; i < route.size(); ++i) {
    const Link& link = net.link(route[i]);
    const double dt = link.length_m / link.free_flow_speed;
    const bool last = i + 1 == route.size();
    if (tau > dt && !last) {
      tau -= dt;
      continue;
    }
    const double f = dt > 0.0 ? std::clamp(tau / dt, 0.0, 1.0) : 1.0;
    std::vector<PlanarPoint> pts;
    std::vector<double> cum{0.0};
    for (const GeoPoint& g : link.geometry) {
      pts.push_back(frame.Project(g));
      if (pts.size() > 1) {
        const PlanarPoint& a = pts[pts.size() - 2];
        cum.push_back(cum.back() + std::hypot(pts.back().x - a.x,
                                              pts.back().y - a.y));
      }
    }
    const double target = f * cum.back();
    std::size_t s = 1;
    while (s + 1 < pts.size() && cum[s] < target) ++s;
    const PlanarPoint& a = pts[s - 1];
    const PlanarPoint& b = pts[s];
    const double seg = cum[s] - cum[s - 1];
    const double g = seg > 0.0 ? (target - cum[s - 1]) / seg : 0.0;
    RoutePosition out;
    out.p = {a.x + g * (b.x - a.x), a.y + g * (b.y - a.y)};
    double heading = RadToDeg(std::atan2(b.x - a.x, b.y - a.y));
    if (heading < 0.0) heading += 360.0;
    out.heading_deg = heading;
    out.speed = link.free_flow_speed;
    return out;
  }
  throw DomainError("empty route");
}

}  // namespace

RoadNetwork GenerateCity(const SynthCityConfig& cfg) {
  if (cfg.rows < 2 || cfg.cols < 2) {
    throw DomainError("synthetic grid needs at least 2 rows and 2 columns");
  }
  if (!(cfg.spacing_m > 0.0) || !std::isfinite(cfg.spacing_m)) {
    throw DomainError("grid spacing must be positive");
  }
  if (cfg.arterial_every < 1) throw DomainError("arterial_every must be >= 1");
  if (!IsValid(cfg.center)) throw DomainError("invalid grid center");

  const int width = std::max<int>(
      3, static_cast<int>(std::to_string(std::max(cfg.rows, cfg.cols)).size()));
  const int offset = static_cast<int>(cfg.seed % cfg.arterial_every);
  auto arterial = [&](int i) { return (i + offset) % cfg.arterial_every == 0; };

  const LocalFrame frame(cfg.center);
  auto point = [&](int r, int c) {
    return frame.Unproject({(c - (cfg.cols - 1) / 2.0) * cfg.spacing_m,
                            (r - (cfg.rows - 1) / 2.0) * cfg.spacing_m});
  };

  RoadNetwork::Builder b;
  for (int r = 0; r < cfg.rows; ++r) {
    for (int c = 0; c < cfg.cols; ++c) {
      b.AddNode(PaddedId('n', width, r, c), point(r, c));
    }
  }
  auto add = [&](int r0, int c0, int r1, int c1, bool is_arterial) {
    LinkSpec spec;
    spec.from = PaddedId('n', width, r0, c0);
    spec.to = PaddedId('n', width, r1, c1);
    spec.id = "l" + spec.from.substr(1) + "-" + spec.to.substr(1);
    spec.geometry = {point(r0, c0), point(r1, c1)};
    spec.length_m = cfg.spacing_m;
    spec.functional_class = is_arterial ? 2 : 4;
    spec.free_flow_speed = is_arterial ? 18.0 : 11.0;
    spec.lanes = is_arterial ? 2 : 1;
    b.AddLink(std::move(spec));
  };
  for (int r = 0; r < cfg.rows; ++r) {
    for (int c = 0; c + 1 < cfg.cols; ++c) {
      add(r, c, r, c + 1, arterial(r));
      add(r, c + 1, r, c, arterial(r));
    }
  }
  for (int c = 0; c < cfg.cols; ++c) {
    for (int r = 0; r + 1 < cfg.rows; ++r) {
      add(r, c, r + 1, c, arterial(c));
      add(r + 1, c, r, c, arterial(c));
    }
  }
  return std::move(b).Build();
}

std::vector<std::int64_t> DefaultSynthDays() {
  std::vector<std::int64_t> days;
  for (const char* d : {"2019-01-15", "2019-01-16", "2019-01-17",
                        "2019-01-22", "2019-01-23", "2019-01-24"}) {
    days.push_back(ParseDate(d));
  }
  return days;
}

SynthCorpus GenerateTrips(const RoadNetwork& net, const SynthTripConfig& cfg) {
  Validate(cfg);
  if (net.node_count() < 2) {
    throw DomainError("trip generation needs at least two nodes");
  }
  NoiseRng rng(SplitMix64(cfg.seed));

  // Zipf popularity over a seeded node ranking.
  std::vector<NodeIdx> ranking(net.node_count());
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    ranking[i] = static_cast<NodeIdx>(i);
  }
  Shuffle(ranking, rng);
  std::vector<double> cumulative;
  double total = 0.0;
  for (std::size_t k = 0; k < ranking.size(); ++k) {
    total += std::pow(static_cast<double>(k + 1), -cfg.od_popularity_alpha);
    cumulative.push_back(total);
  }
  auto draw_node = [&]() {
    const double u = rng.Uniform() * total;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return ranking[std::min<std::size_t>(it - cumulative.begin(),
                                         ranking.size() - 1)];
  };
  auto draw_route = [&]() {
    for (int attempt = 0; attempt < kMaxOdRetries; ++attempt) {
      const NodeIdx o = draw_node();
      const NodeIdx d = draw_node();
      if (o == d) continue;
      try {
        return net.ShortestPath(o, d);
      } catch (const NoPathError&) {
      }
    }
    throw DomainError("could not draw a routable origin-destination pair");
  };

  std::vector<std::string> devices(cfg.n_devices);
  for (int i = 0; i < cfg.n_devices; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "dev%05d", i);
    devices[i] = buf;
  }
  std::vector<std::size_t> device_order(devices.size());
  for (std::size_t i = 0; i < device_order.size(); ++i) device_order[i] = i;
  Shuffle(device_order, rng);

  const std::size_t n_repeaters = std::min<std::size_t>(
      cfg.n_trips,
      static_cast<std::size_t>(std::llround(cfg.repeat_fraction * cfg.n_devices)));
  std::vector<std::vector<LinkIdx>> repeater_routes;
  for (std::size_t i = 0; i < n_repeaters; ++i) {
    repeater_routes.push_back(draw_route());
  }
  std::vector<std::size_t> pool(device_order.begin() + n_repeaters,
                                device_order.end());
  if (pool.empty()) pool = device_order;

  auto duration_of = [&](const std::vector<LinkIdx>& route) {
    double s = 0.0;
    for (LinkIdx l : route) s += net.link(l).length_m / net.link(l).free_flow_speed;
    return s;
  };

  const double window_s = (cfg.hour_end - cfg.hour_start) * 3600.0;
  std::vector<TripPlan> plans;
  for (std::int64_t day : cfg.days) {
    std::vector<TripPlan> today;
    for (std::size_t i = 0; i < n_repeaters; ++i) {
      today.push_back({device_order[i], repeater_routes[i], 0.0, 0.0});
    }
    const std::size_t others = cfg.n_trips - n_repeaters;
    std::vector<std::size_t> drawn = pool;
    Shuffle(drawn, rng);
    for (std::size_t j = 0; j < others; ++j) {
      today.push_back({drawn[j % drawn.size()], draw_route(), 0.0, 0.0});
    }
    // Later trips of a device on the same day start after the previous one
    // ends, far enough apart to be split into separate trips.
    std::map<std::size_t, double> busy_until;
    const double day_start =
        static_cast<double>(day) * 86400.0 - cfg.utc_offset_minutes * 60.0;
    for (TripPlan& plan : today) {
      plan.duration = duration_of(plan.route);
      auto it = busy_until.find(plan.device);
      if (it == busy_until.end()) {
        plan.start = day_start + cfg.hour_start * 3600.0 +
                     std::floor(rng.Uniform() * window_s);
      } else {
        plan.start = it->second + kSameDayTripSpacingS +
                     std::floor(rng.Uniform() * 60.0);
      }
      busy_until[plan.device] = plan.start + std::ceil(plan.duration);
      plans.push_back(std::move(plan));
    }
  }

  std::vector<GpsTrajectory> gps(plans.size());
  std::vector<LinkTrajectory> truth(plans.size());
  const LocalFrame& frame = net.frame();
  ParallelFor(plans.size(), cfg.threads, [&](std::size_t i) {
    const TripPlan& plan = plans[i];
    NoiseRng trip_rng(SplitMix64(cfg.seed ^ SplitMix64(i + 1)));
    GpsTrajectory& g = gps[i];
    g.device = devices[plan.device];
    std::vector<double> offsets;
    for (std::size_t k = 0;; ++k) {
      const double tau = std::round(static_cast<double>(k) * cfg.gps_interval_s);
      if (tau >= plan.duration) break;
      offsets.push_back(tau);
    }
    const double arrival = std::max(std::ceil(plan.duration),
                                    offsets.empty() ? 1.0 : offsets.back() + 1.0);
    offsets.push_back(arrival);
    for (double tau : offsets) {
      const RoutePosition pos = Locate(net, plan.route, tau);
      const double u1 = 1.0 - trip_rng.Uniform();
      const double u2 = trip_rng.Uniform();
      const double mag = cfg.jitter_sigma_m * std::sqrt(-2.0 * std::log(u1));
      const double ang = 2.0 * std::numbers::pi * u2;
      GpsSample s;
      s.device = g.device;
      s.t = plan.start + tau;
      s.point = frame.Unproject(
          {pos.p.x + mag * std::cos(ang), pos.p.y + mag * std::sin(ang)});
      s.speed_mps = pos.speed;
      s.heading_deg = pos.heading_deg;
      g.samples.push_back(std::move(s));
    }
    LinkTrajectory& t = truth[i];
    t.device = g.device;
    t.day = LocalDay(plan.start, cfg.utc_offset_minutes);
    t.hour = LocalHour(plan.start, cfg.utc_offset_minutes);
    t.links = plan.route;
  });

  std::vector<std::size_t> order(plans.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (gps[a].device != gps[b].device) return gps[a].device < gps[b].device;
    return plans[a].start < plans[b].start;
  });
  SynthCorpus out;
  std::map<std::string, int> next_trip;
  for (std::size_t i : order) {
    const std::string id =
        gps[i].device + "#" + std::to_string(next_trip[gps[i].device]++);
    gps[i].trip_id = id;
    truth[i].trip_id = id;
    out.gps.push_back(std::move(gps[i]));
    out.truth.push_back(std::move(truth[i]));
  }
  return out;
}

}  // namespace dpmob
