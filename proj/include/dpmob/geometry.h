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

#ifndef DPMOB_GEOMETRY_H_
#define DPMOB_GEOMETRY_H_

#include <numbers>

namespace dpmob {

inline constexpr double kEarthRadiusM = 6371000.0;
inline constexpr double kMetersPerMile = 1609.344;
inline constexpr double kMaxDisplacementM = 100000.0;

// WGS84-style coordinate in degrees. Construct through MakeGeoPoint when the
// input is untrusted.
struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

// Throws DomainError when either field is non-finite or out of range.
GeoPoint MakeGeoPoint(double lat, double lon);
bool IsValid(const GeoPoint& p);

// Meters east (x) and north (y) of a LocalFrame anchor.
struct PlanarPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const PlanarPoint&, const PlanarPoint&) = default;
};

// Equirectangular projection around a fixed anchor:
//   x = R * dlon * cos(lat_anchor),  y = R * dlat.
// Sub-meter accurate for the few-kilometre radii used by buffer and noise math.
class LocalFrame {
 public:
  explicit LocalFrame(const GeoPoint& anchor);

  PlanarPoint Project(const GeoPoint& p) const;
  GeoPoint Unproject(const PlanarPoint& p) const;
  const GeoPoint& anchor() const { return anchor_; }

 private:
  GeoPoint anchor_;
  double cos_lat_;
};

// Great-circle distance in meters on a sphere of radius kEarthRadiusM.
double HaversineDistance(const GeoPoint& a, const GeoPoint& b);

// Moves `origin` by `r` meters along angle `theta` (radians, counterclockwise
// from east) in the local frame of `origin`. Throws DomainError for r < 0,
// r > kMaxDisplacementM or non-finite input.
GeoPoint Displace(const GeoPoint& origin, double r, double theta);

struct SegmentProjection {
  double distance = 0.0;
  PlanarPoint foot;
};

// Closest point of segment [a, b] to p. a == b is allowed.
SegmentProjection PointToSegment(const PlanarPoint& p, const PlanarPoint& a,
                                 const PlanarPoint& b);

inline double DegToRad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double RadToDeg(double rad) { return rad * 180.0 / std::numbers::pi; }

}  // namespace dpmob

#endif  // DPMOB_GEOMETRY_H_
