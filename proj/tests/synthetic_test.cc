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

#include <set>

#include <gtest/gtest.h>

#include "dpmob/errors.h"
#include "dpmob/privatizer.h"

namespace dpmob {
namespace {

std::size_t DirectedLinks(int r, int c) {
  return 2 * (static_cast<std::size_t>(r) * (c - 1) +
              static_cast<std::size_t>(c) * (r - 1));
}

TEST(GenerateCity, TwoByTwo) {
  SynthCityConfig cfg;
  cfg.rows = cfg.cols = 2;
  const RoadNetwork net = GenerateCity(cfg);
  EXPECT_EQ(net.node_count(), 4u);
  ASSERT_EQ(net.link_count(), 8u);
  for (LinkIdx l = 0; l < net.link_count(); ++l) {
    EXPECT_EQ(net.link(l).length_m, 100.0);
    EXPECT_NEAR(HaversineDistance(net.node(net.link(l).from).point,
                                  net.node(net.link(l).to).point),
                100.0, 0.1);
  }
}

TEST(GenerateCity, LinkCountFormula) {
  for (auto [r, c] : {std::pair{10, 10}, {3, 7}, {20, 20}}) {
    SynthCityConfig cfg;
    cfg.rows = r;
    cfg.cols = c;
    const RoadNetwork net = GenerateCity(cfg);
    EXPECT_EQ(net.node_count(), static_cast<std::size_t>(r * c));
    EXPECT_EQ(net.link_count(), DirectedLinks(r, c));
  }
  SynthCityConfig ten;
  ten.rows = ten.cols = 10;
  EXPECT_EQ(GenerateCity(ten).link_count(), 360u);
}

TEST(GenerateCity, BidirectionalAndClassed) {
  const RoadNetwork net = GenerateCity({});
  std::set<std::pair<NodeIdx, NodeIdx>> arcs;
  std::size_t arterial = 0;
  for (LinkIdx l = 0; l < net.link_count(); ++l) {
    const auto& link = net.link(l);
    arcs.insert({link.from, link.to});
    if (link.functional_class == 2) {
      ++arterial;
      EXPECT_EQ(link.free_flow_speed, 18.0);
    } else {
      EXPECT_EQ(link.functional_class, 4);
      EXPECT_EQ(link.free_flow_speed, 11.0);
    }
  }
  for (const auto& [u, v] : arcs) EXPECT_TRUE(arcs.count({v, u}));
  // 20 x 20 with every fifth row and column arterial: 4 + 4 lines of 19
  // blocks each, both directions.
  EXPECT_EQ(arterial, 2u * 8u * 19u);
}

TEST(GenerateCity, Deterministic) {
  const RoadNetwork a = GenerateCity({});
  const RoadNetwork b = GenerateCity({});
  ASSERT_EQ(a.link_count(), b.link_count());
  for (LinkIdx l = 0; l < a.link_count(); ++l) {
    EXPECT_EQ(a.link(l).id, b.link(l).id);
    EXPECT_EQ(a.link(l).functional_class, b.link(l).functional_class);
    EXPECT_EQ(a.link(l).geometry, b.link(l).geometry);
  }
}

TEST(GenerateCity, RejectsBadConfig) {
  SynthCityConfig cfg;
  cfg.rows = 1;
  EXPECT_THROW(GenerateCity(cfg), DomainError);
  cfg = {};
  cfg.spacing_m = 0;
  EXPECT_THROW(GenerateCity(cfg), DomainError);
}

SynthTripConfig Small() {
  SynthTripConfig cfg;
  cfg.n_trips = 120;
  cfg.n_devices = 200;
  cfg.days = {ParseDate("2019-01-15"), ParseDate("2019-01-16")};
  return cfg;
}

bool SameGps(const std::vector<GpsTrajectory>& a,
             const std::vector<GpsTrajectory>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].trip_id != b[i].trip_id ||
        a[i].samples.size() != b[i].samples.size()) {
      return false;
    }
    for (std::size_t k = 0; k < a[i].samples.size(); ++k) {
      const auto& x = a[i].samples[k];
      const auto& y = b[i].samples[k];
      if (x.t != y.t || !(x.point == y.point) || x.speed_mps != y.speed_mps) {
        return false;
      }
    }
  }
  return true;
}

TEST(GenerateTrips, DeterministicAcrossThreads) {
  const RoadNetwork net = GenerateCity({});
  SynthTripConfig cfg = Small();
  cfg.threads = 1;
  const SynthCorpus a = GenerateTrips(net, cfg);
  cfg.threads = 4;
  const SynthCorpus b = GenerateTrips(net, cfg);
  EXPECT_TRUE(SameGps(a.gps, b.gps));
  cfg.seed = 43;
  EXPECT_FALSE(SameGps(a.gps, GenerateTrips(net, cfg).gps));
}

TEST(GenerateTrips, ShapeAndWindow) {
  const RoadNetwork net = GenerateCity({});
  const SynthTripConfig cfg = Small();
  const SynthCorpus c = GenerateTrips(net, cfg);
  ASSERT_EQ(c.gps.size(), 240u);
  ASSERT_EQ(c.truth.size(), c.gps.size());
  TimeWindow window;
  window.hour_start = 13;
  window.hour_end = 14;
  window.dates = cfg.days;
  for (std::size_t i = 0; i < c.gps.size(); ++i) {
    const auto& g = c.gps[i];
    EXPECT_EQ(g.trip_id, c.truth[i].trip_id);
    EXPECT_TRUE(window.Contains(g.origin().t)) << g.trip_id;
    EXPECT_TRUE(net.IsConnected(c.truth[i].links));
    EXPECT_FALSE(c.truth[i].links.empty());
    for (std::size_t k = 1; k < g.samples.size(); ++k) {
      EXPECT_GT(g.samples[k].t, g.samples[k - 1].t);
      EXPECT_LE(g.samples[k].t - g.samples[k - 1].t, cfg.gps_interval_s);
    }
    if (i > 0) {
      EXPECT_LE(std::tie(c.gps[i - 1].device, c.gps[i - 1].samples[0].t),
                std::tie(g.device, g.samples[0].t));
    }
  }
}

TEST(GenerateTrips, RoundTripsThroughTripSplitting) {
  const RoadNetwork net = GenerateCity({});
  const SynthCorpus c = GenerateTrips(net, Small());
  std::vector<GpsSample> samples;
  for (const auto& g : c.gps) {
    samples.insert(samples.end(), g.samples.begin(), g.samples.end());
  }
  const auto rebuilt = BuildTrips(samples);
  ASSERT_EQ(rebuilt.size(), c.gps.size());
  for (std::size_t i = 0; i < rebuilt.size(); ++i) {
    EXPECT_EQ(rebuilt[i].trip_id, c.gps[i].trip_id);
    EXPECT_EQ(rebuilt[i].samples.size(), c.gps[i].samples.size());
  }
}

TEST(GenerateTrips, FullRepeatFractionFlagsEveryTrip) {
  const RoadNetwork net = GenerateCity({});
  SynthTripConfig cfg = Small();
  cfg.n_trips = 50;
  cfg.n_devices = 50;
  cfg.repeat_fraction = 1.0;
  const SynthCorpus c = GenerateTrips(net, cfg);
  EXPECT_EQ(DetectRepeatedOd(c.truth).size(), c.truth.size());
}

TEST(GenerateTrips, SingleCountOdLinksExist) {
  const RoadNetwork net = GenerateCity({});
  SynthTripConfig cfg;
  cfg.n_trips = 500;
  cfg.days = {ParseDate("2019-01-15")};
  const SynthCorpus c = GenerateTrips(net, cfg);
  std::map<LinkIdx, int> tally;
  for (const auto& t : c.truth) {
    for (LinkIdx l : t.links) ++tally[l];
  }
  std::size_t singles = 0;
  for (const auto& t : c.truth) {
    singles += tally[t.links.front()] == 1;
    singles += tally[t.links.back()] == 1;
  }
  EXPECT_GT(singles, 0u);
  EXPECT_LT(singles, 2 * c.truth.size());
}

TEST(GenerateTrips, RejectsBadConfig) {
  const RoadNetwork net = GenerateCity({});
  SynthTripConfig cfg = Small();
  cfg.n_trips = 0;
  EXPECT_THROW(GenerateTrips(net, cfg), DomainError);
  cfg = Small();
  cfg.jitter_sigma_m = -1;
  EXPECT_THROW(GenerateTrips(net, cfg), DomainError);
  cfg = Small();
  cfg.repeat_fraction = 1.5;
  EXPECT_THROW(GenerateTrips(net, cfg), DomainError);
}

}  // namespace
}  // namespace dpmob
