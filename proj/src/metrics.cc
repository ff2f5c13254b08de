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

#include "dpmob/metrics.h"

#include <algorithm>
#include <unordered_map>

#include "dpmob/errors.h"
#include "dpmob/geometry.h"

namespace dpmob {

double NetworkLengthMiles(const AggregatedMobilityNetwork& agg,
                          const RoadNetwork& net) {
  double meters = 0.0;
  for (const auto& [link, count] : agg.counts) {
    if (count >= 1) meters += net.link(link).length_m;
  }
  return meters / kMetersPerMile;
}

double VmtMiles(std::span<const LinkTrajectory> corpus,
                const RoadNetwork& net) {
  double meters = 0.0;
  for (const LinkTrajectory& trip : corpus) meters += net.PathLength(trip.links);
  return meters / kMetersPerMile;
}

double VhtHours(std::span<const LinkTrajectory> corpus,
                const RoadNetwork& net) {
  double seconds = 0.0;
  for (const LinkTrajectory& trip : corpus) {
    const bool observed = trip.observed_speed.size() == trip.links.size() &&
                          !trip.links.empty();
    for (std::size_t i = 0; i < trip.links.size(); ++i) {
      const Link& link = net.link(trip.links[i]);
      const double speed =
          observed ? trip.observed_speed[i] : link.free_flow_speed;
      seconds += link.length_m / speed;
    }
  }
  return seconds / 3600.0;
}

double VhdHours(std::span<const LinkTrajectory> corpus, const RoadNetwork& net,
                const SpeedMap* observed) {
  if (observed == nullptr) return 0.0;
  double seconds = 0.0;
  for (const LinkTrajectory& trip : corpus) {
    for (LinkIdx l : trip.links) {
      auto it = observed->find(l);
      if (it == observed->end() || !(it->second > 0.0)) continue;
      const Link& link = net.link(l);
      seconds += std::max(0.0, link.length_m / it->second -
                                   link.length_m / link.free_flow_speed);
    }
  }
  return seconds / 3600.0;
}

IntersectionDensity ComputeIntersectionDensity(
    const AggregatedMobilityNetwork& agg, const RoadNetwork& net) {
  IntersectionDensity out;
  out.per_node.assign(net.node_count(), 0);
  for (const auto& [link, count] : agg.counts) {
    if (count < 1) continue;
    ++out.per_node[net.link(link).from];
    ++out.per_node[net.link(link).to];
  }
  if (net.node_count() == 0) return out;
  for (int d : out.per_node) out.histogram[d] += 1.0;
  for (auto& [d, mass] : out.histogram) {
    mass /= static_cast<double>(net.node_count());
  }
  return out;
}

UnchangedOd UnchangedSingleCountOd(const AggregatedMobilityNetwork& raw,
                                   std::span<const LinkTrajectory> raw_trips,
                                   const AggregatedMobilityNetwork& privatized,
                                   std::span<const LinkTrajectory> released) {
  if (!(raw.window == privatized.window)) {
    throw WindowMismatchError("raw and privatized networks cover different "
                              "time windows");
  }
  std::unordered_map<std::string, const LinkTrajectory*> by_id;
  for (const LinkTrajectory& t : released) by_id.emplace(t.trip_id, &t);

  std::map<LinkIdx, bool> single_od;  // link -> still unchanged
  for (const LinkTrajectory& t : raw_trips) {
    if (t.links.empty()) continue;
    const LinkIdx ends[2] = {t.origin_link(), t.destination_link()};
    for (int e = 0; e < 2; ++e) {
      const LinkIdx l = ends[e];
      if (CountOf(raw.counts, l) != 1) continue;
      bool& unchanged = single_od[l];
      auto it = by_id.find(t.trip_id);
      if (it == by_id.end() || it->second->links.empty()) continue;
      const LinkIdx now = e == 0 ? it->second->origin_link()
                                 : it->second->destination_link();
      if (now == l && CountOf(privatized.counts, l) == 1) unchanged = true;
    }
  }
  UnchangedOd out;
  out.total_single_count_od = single_od.size();
  for (const auto& [l, unchanged] : single_od) {
    if (unchanged) ++out.unchanged;
  }
  if (out.total_single_count_od > 0) {
    out.privatized_ratio =
        1.0 - static_cast<double>(out.unchanged) /
                  static_cast<double>(out.total_single_count_od);
  }
  return out;
}

MetricsReport ComputeMetrics(const AggregatedMobilityNetwork& raw,
                             std::span<const LinkTrajectory> raw_trips,
                             const AggregatedMobilityNetwork& released_agg,
                             std::span<const LinkTrajectory> released,
                             const RoadNetwork& net, const SpeedMap* observed) {
  MetricsReport m;
  m.network_length_mi = NetworkLengthMiles(released_agg, net);
  m.vmt_mi = VmtMiles(released, net);
  m.vht_h = VhtHours(released, net);
  m.vhd_h = VhdHours(released, net, observed);
  m.intersection_density = ComputeIntersectionDensity(released_agg, net);
  const UnchangedOd od =
      UnchangedSingleCountOd(raw, raw_trips, released_agg, released);
  m.unchanged_single_count_od = od.unchanged;
  m.privatized_ratio = od.privatized_ratio;
  return m;
}

Model ParseModel(const std::string& name) {
  if (name == "raw") return Model::kRaw;
  if (name == "dp-ani") return Model::kDpAni;
  if (name == "trip-remove") return Model::kTripRemove;
  if (name == "od-remove") return Model::kOdRemove;
  if (name == "od-successive") return Model::kOdSuccessive;
  throw DomainError("unknown model '" + name + "'");
}

const char* ToString(Model model) {
  switch (model) {
    case Model::kRaw:
      return "raw";
    case Model::kDpAni:
      return "dp-ani";
    case Model::kTripRemove:
      return "trip-remove";
    case Model::kOdRemove:
      return "od-remove";
    case Model::kOdSuccessive:
      return "od-successive";
  }
  return "unknown";
}

std::vector<Model> AllModels() {
  return {Model::kRaw, Model::kDpAni, Model::kTripRemove, Model::kOdRemove,
          Model::kOdSuccessive};
}

std::vector<double> DefaultEpsilons() {
  return {0.05, 0.1, 1.0, 1.5, 2.0, 5.0, 10.0, 15.0};
}

std::vector<CompareRow> Compare(const MatchedCorpus& corpus,
                                const RoadNetwork& net,
                                const PrivacyConfig& base,
                                std::span<const double> epsilons,
                                std::span<const Model> models,
                                const TimeWindow& window,
                                const SpeedMap* observed) {
  const std::vector<LinkTrajectory>& clear = corpus.matched;
  const AggregatedMobilityNetwork raw = Aggregate(clear, window, "raw");

  auto row_for = [&](const std::string& name,
                     std::span<const LinkTrajectory> released,
                     const AggregatedMobilityNetwork& agg,
                     std::size_t excluded) {
    const MetricsReport m =
        ComputeMetrics(raw, clear, agg, released, net, observed);
    CompareRow row;
    row.model = name;
    row.network_length_mi = m.network_length_mi;
    row.vmt_mi = m.vmt_mi;
    row.vht_h = m.vht_h;
    row.vhd_h = m.vhd_h;
    row.unchanged_slc_od = m.unchanged_single_count_od;
    row.privatized_ratio = m.privatized_ratio;
    row.trips_excluded = excluded;
    return row;
  };
  auto baseline_row = [&](Model model, std::vector<LinkTrajectory> released) {
    AggregatedMobilityNetwork agg = Aggregate(released, window, ToString(model));
    agg.window = window;
    return row_for(ToString(model), released, agg,
                   corpus.trips_in() - released.size());
  };

  std::vector<CompareRow> rows;
  for (Model model : models) {
    switch (model) {
      case Model::kRaw:
        rows.push_back(row_for("raw", clear, raw, corpus.unmatchable.size()));
        break;
      case Model::kTripRemove:
        rows.push_back(baseline_row(model, BaselineTripRemove(clear)));
        break;
      case Model::kOdRemove:
        rows.push_back(baseline_row(model, BaselineOdRemove(clear)));
        break;
      case Model::kOdSuccessive:
        rows.push_back(baseline_row(model, BaselineOdSuccessiveRemove(clear)));
        break;
      case Model::kDpAni:
        for (double eps : epsilons) {
          PrivacyConfig cfg = base;
          cfg.epsilon = eps;
          const PrivatizationResult res = DpAni(corpus, net, cfg, window);
          CompareRow row = row_for("dp-ani", res.trajectories, res.sigma,
                                   res.report.trips_excluded());
          row.epsilon = eps;
          rows.push_back(row);
        }
        break;
    }
  }
  return rows;
}

}  // namespace dpmob
