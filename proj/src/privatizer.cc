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

#include "dpmob/privatizer.h"

#include <algorithm>
#include <cmath>
#include <optional>
#include <tuple>
#include <utility>

#include "dpmob/errors.h"
#include "dpmob/parallel.h"

namespace dpmob {
namespace {

using OdKey = std::tuple<std::string, LinkIdx, LinkIdx>;

OdKey KeyOf(const LinkTrajectory& t) {
  return {t.device, t.origin_link(), t.destination_link()};
}

struct TripOutcome {
  bool kept = false;
  std::string cause;
  LinkTrajectory trajectory;
  EndpointRecord records[2];
};

}  // namespace

void Validate(const PrivacyConfig& cfg) {
  if (!(cfg.epsilon > 0.0) || !std::isfinite(cfg.epsilon)) {
    throw DomainError("epsilon must be positive and finite");
  }
  Validate(cfg.buffer);
  if (!(cfg.gap_s > 0.0)) throw DomainError("trip gap must be positive");
  if (!(cfg.match.snap_radius_m > 0.0)) {
    throw DomainError("snap radius must be positive");
  }
}

const char* ToString(PerturbReason reason) {
  switch (reason) {
    case PerturbReason::kSingleCount:
      return "single_count";
    case PerturbReason::kRepeated:
      return "repeated";
    case PerturbReason::kNone:
      break;
  }
  return "none";
}

std::size_t PrivatizationReport::trips_excluded() const {
  std::size_t total = 0;
  for (const auto& [cause, n] : excluded_by_cause) total += n;
  return total;
}

MatchedCorpus MatchCorpus(std::span<const GpsTrajectory> corpus,
                          const RoadNetwork& net, const MatchConfig& cfg,
                          int threads) {
  std::vector<std::optional<LinkTrajectory>> results(corpus.size());
  ParallelFor(corpus.size(), threads, [&](std::size_t i) {
    try {
      results[i] = MatchTrajectory(corpus[i], net, cfg);
    } catch (const UnmatchableError&) {
    }
  });
  MatchedCorpus out;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (results[i].has_value()) {
      out.trips.push_back(corpus[i]);
      out.matched.push_back(std::move(*results[i]));
    } else {
      out.unmatchable.push_back(corpus[i].trip_id);
    }
  }
  return out;
}

std::vector<bool> RepeatedOdFlags(std::span<const LinkTrajectory> corpus) {
  std::map<OdKey, std::size_t> occurrences;
  for (const LinkTrajectory& t : corpus) {
    if (!t.links.empty()) ++occurrences[KeyOf(t)];
  }
  std::vector<bool> flags(corpus.size(), false);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!corpus[i].links.empty()) flags[i] = occurrences[KeyOf(corpus[i])] > 1;
  }
  return flags;
}

std::set<std::string> DetectRepeatedOd(std::span<const LinkTrajectory> corpus) {
  const std::vector<bool> flags = RepeatedOdFlags(corpus);
  std::set<std::string> ids;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (flags[i]) ids.insert(corpus[i].trip_id);
  }
  return ids;
}

PrivatizationResult DpAni(std::span<const GpsTrajectory> corpus,
                          const RoadNetwork& net, const PrivacyConfig& cfg,
                          const TimeWindow& window) {
  Validate(cfg);
  const std::vector<GpsTrajectory> in_window = WindowFilter(corpus, window);
  return DpAni(MatchCorpus(in_window, net, cfg.match, cfg.threads), net, cfg,
               window);
}

PrivatizationResult DpAni(const MatchedCorpus& corpus, const RoadNetwork& net,
                          const PrivacyConfig& cfg, const TimeWindow& window) {
  Validate(cfg);
  const std::vector<LinkTrajectory>& clear = corpus.matched;
  const std::size_t n = clear.size();

  // Phase 1: decisions frozen on the clear corpus.
  const LinkCounts beta = ComputeLinkCounts(clear);
  const std::vector<bool> repeated = RepeatedOdFlags(clear);
  // A repeated group perturbs the OD samples of its earliest trip so that
  // every repetition receives the same noise at the same location.
  std::map<OdKey, std::size_t> canonical;
  for (std::size_t i = 0; i < n; ++i) {
    if (!repeated[i]) continue;
    auto [it, inserted] = canonical.emplace(KeyOf(clear[i]), i);
    if (inserted) continue;
    const GpsTrajectory& best = corpus.trips[it->second];
    const GpsTrajectory& cand = corpus.trips[i];
    if (std::tie(cand.origin().t, cand.trip_id) <
        std::tie(best.origin().t, best.trip_id)) {
      it->second = i;
    }
  }

  // Phase 2: independent per-trip perturbation.
  std::vector<TripOutcome> outcomes(n);
  ParallelFor(n, cfg.threads, [&](std::size_t i) {
    const LinkTrajectory& trip = clear[i];
    const bool flagged = repeated[i] && cfg.perturb_repeated;
    const GpsTrajectory& source =
        repeated[i] ? corpus.trips[canonical.at(KeyOf(trip))] : corpus.trips[i];
    TripOutcome& out = outcomes[i];

    std::optional<NodeIdx> new_node[2];
    for (int e = 0; e < 2; ++e) {
      const EndpointTag tag = e == 0 ? EndpointTag::kOrigin
                                     : EndpointTag::kDestination;
      const LinkIdx link = e == 0 ? trip.origin_link() : trip.destination_link();
      EndpointRecord& rec = out.records[e];
      rec.trip_id = trip.trip_id;
      rec.device = trip.device;
      rec.tag = tag;
      rec.original_link = net.link(link).id;
      rec.original_count = CountOf(beta, link);
      if (rec.original_count == 1) {
        rec.reason = PerturbReason::kSingleCount;
      } else if (flagged) {
        rec.reason = PerturbReason::kRepeated;
      }
      rec.perturbed = rec.reason != PerturbReason::kNone;
    }

    try {
      for (int e = 0; e < 2; ++e) {
        EndpointRecord& rec = out.records[e];
        if (!rec.perturbed) continue;
        const LinkIdx link = e == 0 ? trip.origin_link() : trip.destination_link();
        const GeoPoint& x =
            e == 0 ? source.origin().point : source.destination().point;
        const BufferResult buffer =
            SelectRadius(net, x, net.link(link).functional_class, cfg.buffer);
        rec.radius_m = buffer.radius_m;
        NoiseRng rng(DeriveSeed(cfg.global_seed, net.link(link).id, rec.tag));
        GeoPoint z;
        try {
          z = Perturb(x, {cfg.epsilon, buffer.radius_m}, rng);
        } catch (const DomainError&) {
          out.cause = "noise_out_of_range";
          return;
        }
        const NoisyEndpointMatch m =
            MatchNoisyEndpoint(z, buffer.buffer_set_fc, net);
        rec.matched_link = net.link(m.link).id;
        new_node[e] = m.node;
      }
      out.trajectory = RebuildTrajectory(trip, new_node[0], new_node[1], net);
      out.kept = true;
    } catch (const SparseNetworkError&) {
      out.cause = "sparse_network";
    } catch (const UnmatchableError&) {
      out.cause = "unroutable";
    }
  });

  // Phase 3: merge in corpus order.
  PrivatizationResult result;
  PrivatizationReport& report = result.report;
  report.trips_in = corpus.trips_in();
  if (!corpus.unmatchable.empty()) {
    report.excluded_by_cause["unmatchable"] = corpus.unmatchable.size();
  }
  for (TripOutcome& out : outcomes) {
    for (EndpointRecord& rec : out.records) {
      if (rec.perturbed) ++report.endpoints_perturbed;
      if (out.kept) {
        const LinkIdx released = rec.tag == EndpointTag::kOrigin
                                     ? out.trajectory.origin_link()
                                     : out.trajectory.destination_link();
        rec.new_link = net.link(released).id;
        rec.status = rec.perturbed ? "perturbed" : "kept";
      } else {
        rec.status = "excluded:" + out.cause;
      }
    }
    if (out.kept) {
      result.trajectories.push_back(std::move(out.trajectory));
    } else {
      ++report.excluded_by_cause[out.cause];
    }
  }
  report.trips_out = result.trajectories.size();
  result.sigma = Aggregate(result.trajectories, window, "dp-ani");

  std::set<std::string> unchanged;
  report.records.reserve(2 * n);
  for (TripOutcome& out : outcomes) {
    for (EndpointRecord& rec : out.records) {
      if (!out.kept || rec.original_count != 1 ||
          rec.new_link != rec.original_link) {
        continue;
      }
      const LinkIdx l = *net.FindLink(rec.new_link);
      if (CountOf(result.sigma.counts, l) == 1) {
        rec.unchanged_single_count = true;
        unchanged.insert(rec.original_link);
      }
    }
    report.records.push_back(std::move(out.records[0]));
    report.records.push_back(std::move(out.records[1]));
  }
  report.endpoints_unchanged_single_count = unchanged.size();
  return result;
}

std::vector<LinkTrajectory> BaselineTripRemove(
    std::span<const LinkTrajectory> corpus) {
  const LinkCounts beta = ComputeLinkCounts(corpus);
  std::vector<LinkTrajectory> out;
  for (const LinkTrajectory& t : corpus) {
    if (t.links.empty()) continue;
    if (CountOf(beta, t.origin_link()) == 1 ||
        CountOf(beta, t.destination_link()) == 1) {
      continue;
    }
    out.push_back(t);
  }
  return out;
}

std::vector<LinkTrajectory> BaselineOdRemove(
    std::span<const LinkTrajectory> corpus) {
  const LinkCounts beta = ComputeLinkCounts(corpus);
  std::vector<LinkTrajectory> out;
  for (const LinkTrajectory& t : corpus) {
    if (t.links.empty()) continue;
    std::size_t begin = 0;
    std::size_t end = t.links.size();
    if (CountOf(beta, t.links.front()) == 1) ++begin;
    if (CountOf(beta, t.links.back()) == 1 && end > begin) --end;
    if (begin >= end) continue;
    LinkTrajectory clipped = t;
    clipped.links.assign(t.links.begin() + begin, t.links.begin() + end);
    if (!t.observed_speed.empty()) {
      clipped.observed_speed.assign(t.observed_speed.begin() + begin,
                                    t.observed_speed.begin() + end);
    }
    out.push_back(std::move(clipped));
  }
  return out;
}

std::vector<LinkTrajectory> BaselineOdSuccessiveRemove(
    std::span<const LinkTrajectory> corpus) {
  const LinkCounts beta = ComputeLinkCounts(corpus);
  std::vector<LinkTrajectory> out;
  for (const LinkTrajectory& t : corpus) {
    std::size_t begin = 0;
    std::size_t end = t.links.size();
    while (begin < end && CountOf(beta, t.links[begin]) == 1) ++begin;
    while (end > begin && CountOf(beta, t.links[end - 1]) == 1) --end;
    if (begin >= end) continue;
    LinkTrajectory clipped = t;
    clipped.links.assign(t.links.begin() + begin, t.links.begin() + end);
    if (!t.observed_speed.empty()) {
      clipped.observed_speed.assign(t.observed_speed.begin() + begin,
                                    t.observed_speed.begin() + end);
    }
    out.push_back(std::move(clipped));
  }
  return out;
}

}  // namespace dpmob
