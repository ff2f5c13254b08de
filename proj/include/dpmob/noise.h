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

#ifndef DPMOB_NOISE_H_
#define DPMOB_NOISE_H_

#include <cstdint>
#include <random>
#include <string_view>

#include "dpmob/geometry.h"

namespace dpmob {

// Planar Laplace parameters: privacy level `epsilon` (unitless) and the
// scaling radius in meters applied to the unit-metric radius draw. The
// effective per-meter privacy parameter is epsilon / radius_m.
struct NoiseParams {
  double epsilon = 1.0;
  double radius_m = 1.0;
};

// Throws DomainError unless epsilon > 0 and radius_m > 0 (both finite).
void Validate(const NoiseParams& params);

enum class EndpointTag : std::uint8_t { kOrigin = 0, kDestination = 1 };

const char* ToString(EndpointTag tag);

// One SplitMix64 output step applied to z.
std::uint64_t SplitMix64(std::uint64_t z);

// Stable across processes and platforms: FNV-1a over the seed bytes, the link
// id and the tag, finished with a SplitMix64 mix.
std::uint64_t DeriveSeed(std::uint64_t global_seed, std::string_view link_id,
                         EndpointTag tag);

// Deterministic generator; the 53-bit uniform conversion is spelled out so
// draws are bit-identical across standard library implementations.
class NoiseRng {
 public:
  explicit NoiseRng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1).
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
};

// Lower branch of the Lambert W function on [-1/e, 0). The result w <= -1
// satisfies |w e^w - x| <= 1e-12 |x|. Throws DomainError outside the domain.
double LambertWMinus1(double x);

// CDF of the planar Laplace radius with unit metric:
//   C(r) = 1 - (1 + epsilon r) e^{-epsilon r}.
double RadiusCdf(double epsilon, double r);

// C^{-1}(p) = -(W_{-1}((p - 1) / e) + 1) / epsilon for p in [0, 1).
double InverseCdfRadius(double epsilon, double p);

struct PolarNoise {
  double r = 0.0;      // meters
  double theta = 0.0;  // radians in [0, 2 pi)
};

// Draws theta, then p, and returns r = InverseCdfRadius(epsilon, p) * R.
PolarNoise SamplePlanarLaplace(const NoiseParams& params, NoiseRng& rng);

// Displace(x, r, theta) with (r, theta) from SamplePlanarLaplace.
GeoPoint Perturb(const GeoPoint& x, const NoiseParams& params, NoiseRng& rng);

struct GeoIndistinguishabilityResult {
  double max_log_ratio = 0.0;  // +inf when no cell qualifies
  std::size_t cells_compared = 0;
};

// Monte-Carlo check of the density ratio bound. Perturbs x0 and x1
// `n_samples` times each from the same seeded stream, histograms both on a
// square grid of `cell_m` meters anchored at x0, and returns the largest
// |log(count0 / count1)| over cells holding at least `min_count` samples in
// both histograms. Throws DomainError when the points are more than
// 10 * radius apart.
GeoIndistinguishabilityResult VerifyGeoIndistinguishability(
    const GeoPoint& x0, const GeoPoint& x1, const NoiseParams& params,
    std::size_t n_samples, double cell_m, std::uint64_t seed,
    std::size_t min_count = 50);

}  // namespace dpmob

#endif  // DPMOB_NOISE_H_
