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

#include "dpmob/noise.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <unordered_map>
#include <utility>

#include "dpmob/errors.h"

namespace dpmob {
namespace {

constexpr double kE = std::numbers::e;
constexpr int kMaxHalleyIterations = 20;

// Puiseux expansion of W_{-1} around the branch point in p = -sqrt(2(1+ex)).
double BranchSeries(double q) {
  const double p = -std::sqrt(2.0 * q);
  return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 +
                                                   p * (-43.0 / 540.0))));
}

}  // namespace

std::uint64_t SplitMix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void Validate(const NoiseParams& params) {
  if (!(params.epsilon > 0.0) || !std::isfinite(params.epsilon)) {
    throw DomainError("epsilon must be positive and finite");
  }
  if (!(params.radius_m > 0.0) || !std::isfinite(params.radius_m)) {
    throw DomainError("noise radius must be positive and finite");
  }
}

const char* ToString(EndpointTag tag) {
  return tag == EndpointTag::kOrigin ? "origin" : "destination";
}

std::uint64_t DeriveSeed(std::uint64_t global_seed, std::string_view link_id,
                         EndpointTag tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](unsigned char byte) {
    h ^= byte;
    h *= 0x100000001b3ULL;
  };
  for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>(global_seed >> (8 * i)));
  for (char c : link_id) mix(static_cast<unsigned char>(c));
  mix(0xff);
  mix(static_cast<unsigned char>(tag));
  return SplitMix64(h);
}

double LambertWMinus1(double x) {
  const double branch = -std::exp(-1.0);
  if (!std::isfinite(x) || x >= 0.0) {
    throw DomainError("W_{-1} needs x in [-1/e, 0), got " + std::to_string(x));
  }
  if (x < branch) {
    if (branch - x > 4.0 * std::numeric_limits<double>::epsilon()) {
      throw DomainError("W_{-1} needs x >= -1/e, got " + std::to_string(x));
    }
    x = branch;
  }
  const double q = std::fma(kE, x, 1.0);  // distance from the branch point
  if (q <= 0.0) return -1.0;
  if (q < 1e-10) return BranchSeries(q);

  double w;
  if (x < -0.25) {
    w = BranchSeries(q);
  } else {
    const double l1 = std::log(-x);
    const double l2 = std::log(-l1);
    w = l1 - l2 + l2 / l1;
  }
  for (int i = 0; i < kMaxHalleyIterations; ++i) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    if (std::abs(f) <= 1e-15 * std::abs(x)) break;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w -= step;
    if (std::abs(step) <= 1e-16 * std::abs(w)) break;
  }
  return std::min(w, -1.0);
}

double RadiusCdf(double epsilon, double r) {
  if (r <= 0.0) return 0.0;
  const double er = epsilon * r;
  return -std::expm1(-er) - er * std::exp(-er);
}

double InverseCdfRadius(double epsilon, double p) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw DomainError("epsilon must be positive and finite");
  }
  if (!(p >= 0.0 && p < 1.0)) throw DomainError("p must be in [0, 1)");
  // The distance of (p - 1) / e from the branch point is exactly p; rounding
  // (p - 1) / e first would cost half the digits near p = 0.
  const double w = p < 1e-10 ? BranchSeries(p) : LambertWMinus1((p - 1.0) / kE);
  return std::max(0.0, -(w + 1.0) / epsilon);
}

PolarNoise SamplePlanarLaplace(const NoiseParams& params, NoiseRng& rng) {
  Validate(params);
  PolarNoise out;
  out.theta = 2.0 * std::numbers::pi * rng.Uniform();
  const double p = rng.Uniform();
  out.r = InverseCdfRadius(params.epsilon, p) * params.radius_m;
  return out;
}

GeoPoint Perturb(const GeoPoint& x, const NoiseParams& params, NoiseRng& rng) {
  const PolarNoise noise = SamplePlanarLaplace(params, rng);
  return Displace(x, noise.r, noise.theta);
}

GeoIndistinguishabilityResult VerifyGeoIndistinguishability(
    const GeoPoint& x0, const GeoPoint& x1, const NoiseParams& params,
    std::size_t n_samples, double cell_m, std::uint64_t seed,
    std::size_t min_count) {
  Validate(params);
  if (!(cell_m > 0.0)) throw DomainError("cell size must be positive");
  if (HaversineDistance(x0, x1) > 10.0 * params.radius_m) {
    throw DomainError("points are further apart than 10 noise radii");
  }
  const LocalFrame frame(x0);
  auto key_of = [&](const GeoPoint& g) {
    const PlanarPoint p = frame.Project(g);
    const auto ix = static_cast<std::int64_t>(std::floor(p.x / cell_m));
    const auto iy = static_cast<std::int64_t>(std::floor(p.y / cell_m));
    return (static_cast<std::uint64_t>(ix) << 32) ^
           static_cast<std::uint64_t>(static_cast<std::uint32_t>(iy));
  };

  std::unordered_map<std::uint64_t, std::pair<std::size_t, std::size_t>> hist;
  hist.reserve(1 << 16);
  NoiseRng rng0(seed);
  NoiseRng rng1(seed);
  for (std::size_t i = 0; i < n_samples; ++i) {
    ++hist[key_of(Perturb(x0, params, rng0))].first;
    ++hist[key_of(Perturb(x1, params, rng1))].second;
  }

  GeoIndistinguishabilityResult result;
  result.max_log_ratio = -std::numeric_limits<double>::infinity();
  for (const auto& [key, counts] : hist) {
    if (counts.first < min_count || counts.second < min_count) continue;
    ++result.cells_compared;
    const double ratio = std::abs(std::log(static_cast<double>(counts.first) /
                                           static_cast<double>(counts.second)));
    result.max_log_ratio = std::max(result.max_log_ratio, ratio);
  }
  if (result.cells_compared == 0) {
    result.max_log_ratio = std::numeric_limits<double>::infinity();
  }
  return result;
}

}  // namespace dpmob
