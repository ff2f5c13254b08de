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

#include "dpmob/geometry.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "dpmob/errors.h"

namespace dpmob {

bool IsValid(const GeoPoint& p) {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 &&
         p.lat <= 90.0 && p.lon >= -180.0 && p.lon <= 180.0;
}

GeoPoint MakeGeoPoint(double lat, double lon) {
  GeoPoint p{lat, lon};
  if (!IsValid(p)) {
    throw DomainError("invalid coordinate (" + std::to_string(lat) + ", " +
                      std::to_string(lon) + ")");
  }
  return p;
}

LocalFrame::LocalFrame(const GeoPoint& anchor)
    : anchor_(anchor), cos_lat_(std::cos(DegToRad(anchor.lat))) {}

PlanarPoint LocalFrame::Project(const GeoPoint& p) const {
  return {kEarthRadiusM * DegToRad(p.lon - anchor_.lon) * cos_lat_,
          kEarthRadiusM * DegToRad(p.lat - anchor_.lat)};
}

GeoPoint LocalFrame::Unproject(const PlanarPoint& p) const {
  return {anchor_.lat + RadToDeg(p.y / kEarthRadiusM),
          anchor_.lon + RadToDeg(p.x / (kEarthRadiusM * cos_lat_))};
}

double HaversineDistance(const GeoPoint& a, const GeoPoint& b) {
  const double dlat = DegToRad(b.lat - a.lat);
  const double dlon = DegToRad(b.lon - a.lon);
  const double s1 = std::sin(dlat / 2.0);
  const double s2 = std::sin(dlon / 2.0);
  const double h = s1 * s1 + std::cos(DegToRad(a.lat)) *
                                 std::cos(DegToRad(b.lat)) * s2 * s2;
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

GeoPoint Displace(const GeoPoint& origin, double r, double theta) {
  if (!std::isfinite(r) || !std::isfinite(theta) || r < 0.0) {
    throw DomainError("displacement must be finite and non-negative");
  }
  if (r > kMaxDisplacementM) {
    throw DomainError("displacement of " + std::to_string(r) +
                      " m exceeds the local-frame limit");
  }
  if (r == 0.0) return origin;
  const double dy = r * std::sin(theta);
  const double dx = r * std::cos(theta);
  const double dlat = dy / kEarthRadiusM;
  // Longitude scale taken at the mid latitude keeps the great-circle length
  // within 0.1% of r up to 10 km at |lat| <= 80.
  const double mid_lat = DegToRad(origin.lat) + dlat / 2.0;
  GeoPoint out{origin.lat + RadToDeg(dlat),
               origin.lon + RadToDeg(dx / (kEarthRadiusM * std::cos(mid_lat)))};
  if (out.lon > 180.0) out.lon -= 360.0;
  if (out.lon < -180.0) out.lon += 360.0;
  if (!IsValid(out)) throw DomainError("displacement leaves valid latitudes");
  return out;
}

SegmentProjection PointToSegment(const PlanarPoint& p, const PlanarPoint& a,
                                 const PlanarPoint& b) {
  const double vx = b.x - a.x;
  const double vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = 0.0;
  if (len2 > 0.0) {
    t = std::clamp(((p.x - a.x) * vx + (p.y - a.y) * vy) / len2, 0.0, 1.0);
  }
  const PlanarPoint foot{a.x + t * vx, a.y + t * vy};
  return {std::hypot(p.x - foot.x, p.y - foot.y), foot};
}

}  // namespace dpmob
