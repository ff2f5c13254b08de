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

#include "dpmob/io.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>

#include "dpmob/errors.h"
#include "json.hpp"

#ifndef DPMOB_VERSION
#define DPMOB_VERSION "0.1.0"
#endif

namespace dpmob {
namespace {

using Json = nlohmann::ordered_json;

std::string Quote(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool ParseDouble(std::string_view s, double& out) {
  s = Trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && !s.empty() &&
         std::isfinite(out);
}

std::vector<std::string> Split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t end = s.find(sep, start);
    if (end == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      break;
    }
    out.emplace_back(s.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

const char* Bool(bool b) { return b ? "1" : "0"; }

Json ParseJson(std::istream& in, const std::string& source) {
  const std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const std::size_t line =
        1 + std::count(text.begin(), text.begin() + upto, '\n');
    throw InputError(source, line, "malformed JSON");
  }
}

Json LineString(std::span<const GeoPoint> points) {
  Json coords = Json::array();
  for (const GeoPoint& p : points) coords.push_back({p.lon, p.lat});
  return {{"type", "LineString"}, {"coordinates", coords}};
}

std::vector<GeoPoint> ReadLineString(const Json& geometry) {
  if (!geometry.is_object() || geometry.value("type", "") != "LineString") {
    throw DomainError("geometry must be a LineString");
  }
  const Json& coords = geometry.at("coordinates");
  if (!coords.is_array() || coords.size() < 2) {
    throw DomainError("LineString needs at least two positions");
  }
  std::vector<GeoPoint> out;
  for (const Json& c : coords) {
    if (!c.is_array() || c.size() < 2 || !c[0].is_number() ||
        !c[1].is_number()) {
      throw DomainError("position must be [lon, lat]");
    }
    out.push_back(MakeGeoPoint(c[1].get<double>(), c[0].get<double>()));
  }
  return out;
}

void WriteFeatureCollection(const std::vector<Json>& features,
                            std::ostream& out, const Json* properties) {
  out << "{\"type\":\"FeatureCollection\",";
  if (properties != nullptr) out << "\"properties\":" << properties->dump() << ",";
  out << "\"features\":[";
  for (std::size_t i = 0; i < features.size(); ++i) {
    out << (i == 0 ? "\n" : ",\n") << features[i].dump();
  }
  out << "\n]}\n";
}

const Json& Features(const Json& doc, const std::string& source) {
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
      !doc.contains("features") || !doc["features"].is_array()) {
    throw InputError(source, 0, "expected a GeoJSON FeatureCollection");
  }
  return doc["features"];
}

template <typename Fn>
void ForEachFeature(const Json& doc, const std::string& source, Fn&& fn) {
  const Json& features = Features(doc, source);
  for (std::size_t i = 0; i < features.size(); ++i) {
    const Json& f = features[i];
    try {
      if (!f.is_object() || !f.contains("properties") ||
          !f["properties"].is_object()) {
        throw DomainError("feature without properties");
      }
      fn(f);
    } catch (const Json::exception& e) {
      throw InputError(source, 0,
                       "feature " + std::to_string(i) + ": " + e.what());
    } catch (const DomainError& e) {
      throw InputError(source, 0,
                       "feature " + std::to_string(i) + ": " + e.what());
    }
  }
}

std::uint64_t Fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string(), 0, "cannot open file");
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

LinkIdx RequireLink(const RoadNetwork& net, std::string_view id,
                    const CsvReader& csv) {
  const auto l = net.FindLink(id);
  if (!l) csv.Fail("unknown link '" + std::string(id) + "'");
  return *l;
}

}  // namespace

std::string FormatNumber(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

CsvReader::CsvReader(std::istream& in, std::string source)
    : in_(in), source_(std::move(source)) {
  if (!ReadRecord(header_)) Fail("missing header row");
  for (std::string& h : header_) h = std::string(Trim(h));
}

bool CsvReader::ReadRecord(std::vector<std::string>& fields) {
  std::string text;
  if (!std::getline(in_, text)) return false;
  ++line_;
  if (!text.empty() && text.back() == '\r') text.pop_back();
  fields.clear();
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) Fail("unterminated quoted field");
  if (!text.empty() || !fields.empty()) fields.push_back(std::move(cur));
  return true;
}

bool CsvReader::Next() {
  while (ReadRecord(fields_)) {
    if (fields_.empty()) continue;
    if (fields_.size() != header_.size()) {
      Fail("expected " + std::to_string(header_.size()) + " fields, found " +
           std::to_string(fields_.size()));
    }
    return true;
  }
  return false;
}

bool CsvReader::Has(std::string_view column) const {
  return std::find(header_.begin(), header_.end(), column) != header_.end();
}

std::string_view CsvReader::Get(std::string_view column) const {
  const auto it = std::find(header_.begin(), header_.end(), column);
  if (it == header_.end()) {
    throw InputError(source_, 1, "missing column '" + std::string(column) + "'");
  }
  return fields_[it - header_.begin()];
}

double CsvReader::GetDouble(std::string_view column) const {
  double v = 0.0;
  if (!ParseDouble(Get(column), v)) {
    Fail("invalid number '" + std::string(Get(column)) + "' in column " +
         std::string(column));
  }
  return v;
}

std::optional<double> CsvReader::GetOptionalDouble(
    std::string_view column) const {
  if (!Has(column) || Trim(Get(column)).empty()) return std::nullopt;
  return GetDouble(column);
}

long long CsvReader::GetInt(std::string_view column) const {
  const std::string_view s = Trim(Get(column));
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    Fail("invalid integer '" + std::string(s) + "' in column " +
         std::string(column));
  }
  return v;
}

void CsvReader::Fail(const std::string& what) const {
  throw InputError(source_, line_, what);
}

RoadNetwork ReadNetworkGeoJson(std::istream& in, const std::string& source) {
  const Json doc = ParseJson(in, source);
  RoadNetwork::Builder b;
  ForEachFeature(doc, source, [&](const Json& f) {
    const Json& props = f["properties"];
    const Json& geometry = f.at("geometry");
    if (geometry.value("type", "") == "Point") {
      const Json& c = geometry.at("coordinates");
      b.AddNode(props.at("id").get<std::string>(),
                MakeGeoPoint(c.at(1).get<double>(), c.at(0).get<double>()));
      return;
    }
    LinkSpec spec;
    spec.id = props.at("id").get<std::string>();
    spec.from = props.at("from").get<std::string>();
    spec.to = props.at("to").get<std::string>();
    spec.geometry = ReadLineString(geometry);
    if (props.contains("length_m") && !props["length_m"].is_null()) {
      spec.length_m = props["length_m"].get<double>();
    }
    spec.functional_class = props.at("fc").get<int>();
    spec.free_flow_speed = props.at("speed_mps").get<double>();
    spec.lanes = props.value("lanes", 1);
    b.AddLink(std::move(spec));
  });
  try {
    return std::move(b).Build();
  } catch (const DomainError& e) {
    throw InputError(source, 0, e.what());
  }
}

void WriteNetworkGeoJson(const RoadNetwork& net, std::ostream& out) {
  std::vector<Json> features;
  for (const Node& n : net.nodes()) {
    features.push_back(
        {{"type", "Feature"},
         {"geometry", {{"type", "Point"}, {"coordinates", {n.point.lon, n.point.lat}}}},
         {"properties", {{"id", n.id}}}});
  }
  for (const Link& l : net.links()) {
    features.push_back({{"type", "Feature"},
                        {"geometry", LineString(l.geometry)},
                        {"properties",
                         {{"id", l.id},
                          {"from", net.node(l.from).id},
                          {"to", net.node(l.to).id},
                          {"fc", l.functional_class},
                          {"length_m", l.length_m},
                          {"speed_mps", l.free_flow_speed},
                          {"lanes", l.lanes}}}});
  }
  WriteFeatureCollection(features, out, nullptr);
}

RoadNetwork ReadNetworkCsv(std::istream& in, const std::string& source) {
  CsvReader csv(in, source);
  RoadNetwork::Builder b;
  while (csv.Next()) {
    LinkSpec spec;
    spec.id = std::string(csv.Get("link_id"));
    spec.from = std::string(csv.Get("from"));
    spec.to = std::string(csv.Get("to"));
    spec.functional_class = static_cast<int>(csv.GetInt("fc"));
    spec.length_m = csv.GetOptionalDouble("length_m");
    spec.free_flow_speed = csv.GetDouble("speed_mps");
    spec.lanes = csv.Has("lanes") && !Trim(csv.Get("lanes")).empty()
                     ? static_cast<int>(csv.GetInt("lanes"))
                     : 1;
    for (const std::string& pos : Split(csv.Get("geometry"), ';')) {
      const auto parts = Split(Trim(pos), ' ');
      double lon = 0.0, lat = 0.0;
      if (parts.size() != 2 || !ParseDouble(parts[0], lon) ||
          !ParseDouble(parts[1], lat)) {
        csv.Fail("geometry positions must be 'lon lat'");
      }
      try {
        spec.geometry.push_back(MakeGeoPoint(lat, lon));
      } catch (const DomainError& e) {
        csv.Fail(e.what());
      }
    }
    try {
      b.AddLink(std::move(spec));
    } catch (const DomainError& e) {
      csv.Fail(e.what());
    }
  }
  try {
    return std::move(b).Build();
  } catch (const DomainError& e) {
    throw InputError(source, 0, e.what());
  }
}

void WriteNetworkCsv(const RoadNetwork& net, std::ostream& out) {
  out << "link_id,from,to,fc,length_m,speed_mps,lanes,geometry\n";
  for (const Link& l : net.links()) {
    std::string geometry;
    for (const GeoPoint& p : l.geometry) {
      if (!geometry.empty()) geometry += ';';
      geometry += FormatNumber(p.lon) + " " + FormatNumber(p.lat);
    }
    out << Quote(l.id) << ',' << Quote(net.node(l.from).id) << ','
        << Quote(net.node(l.to).id) << ',' << l.functional_class << ','
        << FormatNumber(l.length_m) << ',' << FormatNumber(l.free_flow_speed)
        << ',' << l.lanes << ',' << geometry << '\n';
  }
}

RoadNetwork LoadNetwork(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string(), 0, "cannot open network file");
  if (path.extension() == ".csv") return ReadNetworkCsv(in, path.string());
  return ReadNetworkGeoJson(in, path.string());
}

void SaveNetwork(const RoadNetwork& net, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(path.string(), 0, "cannot write network file");
  if (path.extension() == ".csv") {
    WriteNetworkCsv(net, out);
  } else {
    WriteNetworkGeoJson(net, out);
  }
}

std::vector<GpsSample> ReadGpsCsv(std::istream& in, const std::string& source) {
  CsvReader csv(in, source);
  std::vector<GpsSample> out;
  while (csv.Next()) {
    GpsSample s;
    s.device = std::string(Trim(csv.Get("device_id")));
    if (s.device.empty()) csv.Fail("empty device_id");
    try {
      s.t = ParseIso8601(Trim(csv.Get("timestamp")));
      s.point = MakeGeoPoint(csv.GetDouble("lat"), csv.GetDouble("lon"));
    } catch (const DomainError& e) {
      csv.Fail(e.what());
    }
    s.speed_mps = csv.GetOptionalDouble("speed_mps");
    s.heading_deg = csv.GetOptionalDouble("heading_deg");
    if (s.speed_mps && *s.speed_mps < 0.0) csv.Fail("negative speed");
    out.push_back(std::move(s));
  }
  return out;
}

void WriteGpsCsv(std::span<const GpsTrajectory> corpus, std::ostream& out) {
  out << "device_id,timestamp,lat,lon,speed_mps,heading_deg\n";
  for (const GpsTrajectory& trip : corpus) {
    for (const GpsSample& s : trip.samples) {
      out << Quote(s.device) << ',' << FormatIso8601(s.t) << ','
          << FormatNumber(s.point.lat) << ',' << FormatNumber(s.point.lon)
          << ',' << (s.speed_mps ? FormatNumber(*s.speed_mps) : "") << ','
          << (s.heading_deg ? FormatNumber(*s.heading_deg) : "") << '\n';
    }
  }
}

std::vector<LinkTrajectory> ReadLinkTrajectoriesCsv(std::istream& in,
                                                    const std::string& source,
                                                    const RoadNetwork& net) {
  CsvReader csv(in, source);
  std::vector<LinkTrajectory> out;
  while (csv.Next()) {
    LinkTrajectory t;
    t.trip_id = std::string(csv.Get("trip_id"));
    t.device = std::string(csv.Get("device"));
    try {
      t.day = ParseDate(Trim(csv.Get("day")));
    } catch (const DomainError& e) {
      csv.Fail(e.what());
    }
    t.hour = static_cast<int>(csv.GetInt("hour"));
    for (const std::string& id : Split(Trim(csv.Get("links")), ' ')) {
      if (!id.empty()) t.links.push_back(RequireLink(net, id, csv));
    }
    if (t.links.empty()) csv.Fail("trip without links");
    out.push_back(std::move(t));
  }
  return out;
}

void WriteLinkTrajectoriesCsv(std::span<const LinkTrajectory> corpus,
                              const RoadNetwork& net, std::ostream& out) {
  out << "trip_id,device,day,hour,links\n";
  for (const LinkTrajectory& t : corpus) {
    std::string links;
    for (LinkIdx l : t.links) {
      if (!links.empty()) links += ' ';
      links += net.link(l).id;
    }
    out << Quote(t.trip_id) << ',' << Quote(t.device) << ','
        << FormatDate(t.day) << ',' << t.hour << ',' << Quote(links) << '\n';
  }
}

std::vector<AggregationRow> AggregationRows(const AggregatedMobilityNetwork& agg,
                                            const RoadNetwork& net) {
  std::vector<AggregationRow> rows;
  for (const auto& [l, count] : agg.counts) {
    const Link& link = net.link(l);
    rows.push_back({link.id, count, link.length_m, link.functional_class});
  }
  return rows;
}

void WriteAggregationCsv(const AggregatedMobilityNetwork& agg,
                         const RoadNetwork& net, std::ostream& out) {
  out << "link_id,count,length_m,fc\n";
  for (const AggregationRow& r : AggregationRows(agg, net)) {
    out << Quote(r.link_id) << ',' << r.count << ','
        << FormatNumber(r.length_m) << ',' << r.functional_class << '\n';
  }
}

std::vector<AggregationRow> ReadAggregationCsv(std::istream& in,
                                               const std::string& source) {
  CsvReader csv(in, source);
  std::vector<AggregationRow> rows;
  while (csv.Next()) {
    AggregationRow r;
    r.link_id = std::string(csv.Get("link_id"));
    const long long count = csv.GetInt("count");
    if (count < 1) csv.Fail("count must be >= 1");
    r.count = static_cast<std::uint32_t>(count);
    r.length_m = csv.GetDouble("length_m");
    r.functional_class = static_cast<int>(csv.GetInt("fc"));
    rows.push_back(std::move(r));
  }
  return rows;
}

void WriteOverlayGeoJson(const AggregatedMobilityNetwork& agg,
                         const RoadNetwork& net, std::ostream& out) {
  std::vector<Json> features;
  for (const auto& [l, count] : agg.counts) {
    const Link& link = net.link(l);
    features.push_back({{"type", "Feature"},
                        {"geometry", LineString(link.geometry)},
                        {"properties",
                         {{"link_id", link.id},
                          {"count", count},
                          {"fc", link.functional_class},
                          {"source", agg.source}}}});
  }
  Json window = {{"hour_start", agg.window.hour_start},
                 {"hour_end", agg.window.hour_end},
                 {"days", FormatWeekdays(agg.window.days)},
                 {"utc_offset_minutes", agg.window.utc_offset_minutes}};
  Json dates = Json::array();
  for (std::int64_t d : agg.window.dates) dates.push_back(FormatDate(d));
  window["dates"] = dates;
  const Json props = {{"source", agg.source}, {"window", window}};
  WriteFeatureCollection(features, out, &props);
}

std::vector<OverlayFeature> ReadOverlayGeoJson(std::istream& in,
                                               const std::string& source) {
  const Json doc = ParseJson(in, source);
  std::vector<OverlayFeature> out;
  ForEachFeature(doc, source, [&](const Json& f) {
    const Json& props = f["properties"];
    OverlayFeature o;
    o.link_id = props.at("link_id").get<std::string>();
    o.count = props.at("count").get<std::uint32_t>();
    o.source = props.at("source").get<std::string>();
    o.geometry = ReadLineString(f.at("geometry"));
    out.push_back(std::move(o));
  });
  return out;
}

void WriteReportCsv(const PrivatizationReport& report, std::ostream& out) {
  out << "trip_id,device,endpoint,original_link,original_count,reason,"
         "perturbed,radius_m,matched_link,new_link,unchanged_single_count,"
         "status\n";
  for (const EndpointRecord& r : report.records) {
    out << Quote(r.trip_id) << ',' << Quote(r.device) << ',' << ToString(r.tag)
        << ',' << Quote(r.original_link) << ',' << r.original_count << ','
        << ToString(r.reason) << ',' << Bool(r.perturbed) << ','
        << FormatNumber(r.radius_m) << ',' << Quote(r.matched_link) << ','
        << Quote(r.new_link) << ','
        << Bool(r.unchanged_single_count) << ',' << Quote(r.status) << '\n';
  }
}

std::vector<EndpointRecord> ReadReportCsv(std::istream& in,
                                          const std::string& source) {
  CsvReader csv(in, source);
  auto flag = [&](std::string_view column) {
    const long long v = csv.GetInt(column);
    if (v != 0 && v != 1) csv.Fail(std::string(column) + " must be 0 or 1");
    return v == 1;
  };
  std::vector<EndpointRecord> out;
  while (csv.Next()) {
    EndpointRecord r;
    r.trip_id = std::string(csv.Get("trip_id"));
    r.device = std::string(csv.Get("device"));
    const std::string_view endpoint = csv.Get("endpoint");
    if (endpoint == "origin") {
      r.tag = EndpointTag::kOrigin;
    } else if (endpoint == "destination") {
      r.tag = EndpointTag::kDestination;
    } else {
      csv.Fail("endpoint must be origin or destination");
    }
    r.original_link = std::string(csv.Get("original_link"));
    r.original_count = static_cast<std::uint32_t>(csv.GetInt("original_count"));
    const std::string_view reason = csv.Get("reason");
    if (reason == "none") {
      r.reason = PerturbReason::kNone;
    } else if (reason == "single_count") {
      r.reason = PerturbReason::kSingleCount;
    } else if (reason == "repeated") {
      r.reason = PerturbReason::kRepeated;
    } else {
      csv.Fail("unknown reason '" + std::string(reason) + "'");
    }
    r.perturbed = flag("perturbed");
    r.radius_m = csv.GetDouble("radius_m");
    r.matched_link = std::string(csv.Get("matched_link"));
    r.new_link = std::string(csv.Get("new_link"));
    r.unchanged_single_count = flag("unchanged_single_count");
    r.status = std::string(csv.Get("status"));
    out.push_back(std::move(r));
  }
  return out;
}

void WriteReportSummaryCsv(const PrivatizationReport& report,
                           std::ostream& out) {
  out << "key,value\n"
      << "trips_in," << report.trips_in << '\n'
      << "trips_out," << report.trips_out << '\n'
      << "trips_excluded," << report.trips_excluded() << '\n'
      << "endpoints_perturbed," << report.endpoints_perturbed << '\n'
      << "endpoints_unchanged_single_count,"
      << report.endpoints_unchanged_single_count << '\n';
  for (const auto& [cause, n] : report.excluded_by_cause) {
    out << "excluded:" << cause << ',' << n << '\n';
  }
}

PrivatizationReport ReadReportSummaryCsv(std::istream& in,
                                         const std::string& source) {
  CsvReader csv(in, source);
  PrivatizationReport r;
  while (csv.Next()) {
    const std::string key(csv.Get("key"));
    const auto value = static_cast<std::size_t>(csv.GetInt("value"));
    if (key == "trips_in") {
      r.trips_in = value;
    } else if (key == "trips_out") {
      r.trips_out = value;
    } else if (key == "trips_excluded") {
      // derived from the causes
    } else if (key == "endpoints_perturbed") {
      r.endpoints_perturbed = value;
    } else if (key == "endpoints_unchanged_single_count") {
      r.endpoints_unchanged_single_count = value;
    } else if (key.rfind("excluded:", 0) == 0) {
      r.excluded_by_cause[key.substr(9)] = value;
    } else {
      csv.Fail("unknown key '" + key + "'");
    }
  }
  return r;
}

void WriteCompareCsv(std::span<const CompareRow> rows, std::ostream& out) {
  out << "model,epsilon,network_length_mi,vmt_mi,vht_h,vhd_h,"
         "unchanged_slc_od,privatized_ratio,trips_excluded\n";
  for (const CompareRow& r : rows) {
    out << Quote(r.model) << ','
        << (r.epsilon ? FormatNumber(*r.epsilon) : "") << ','
        << FormatNumber(r.network_length_mi) << ',' << FormatNumber(r.vmt_mi)
        << ',' << FormatNumber(r.vht_h) << ',' << FormatNumber(r.vhd_h) << ','
        << r.unchanged_slc_od << ',' << FormatNumber(r.privatized_ratio) << ','
        << r.trips_excluded << '\n';
  }
}

std::vector<CompareRow> ReadCompareCsv(std::istream& in,
                                       const std::string& source) {
  CsvReader csv(in, source);
  std::vector<CompareRow> rows;
  while (csv.Next()) {
    CompareRow r;
    r.model = std::string(csv.Get("model"));
    r.epsilon = csv.GetOptionalDouble("epsilon");
    r.network_length_mi = csv.GetDouble("network_length_mi");
    r.vmt_mi = csv.GetDouble("vmt_mi");
    r.vht_h = csv.GetDouble("vht_h");
    r.vhd_h = csv.GetDouble("vhd_h");
    r.unchanged_slc_od = static_cast<std::size_t>(csv.GetInt("unchanged_slc_od"));
    r.privatized_ratio = csv.GetDouble("privatized_ratio");
    r.trips_excluded = static_cast<std::size_t>(csv.GetInt("trips_excluded"));
    rows.push_back(std::move(r));
  }
  return rows;
}

void WriteDensityCsv(const IntersectionDensity& density, std::ostream& out) {
  out << "density,fraction\n";
  for (const auto& [d, fraction] : density.histogram) {
    out << d << ',' << FormatNumber(fraction) << '\n';
  }
}

SpeedMap ReadSpeedsCsv(std::istream& in, const std::string& source,
                       const RoadNetwork& net) {
  CsvReader csv(in, source);
  SpeedMap speeds;
  while (csv.Next()) {
    const LinkIdx l = RequireLink(net, csv.Get("link_id"), csv);
    const double v = csv.GetDouble("speed_mps");
    if (!(v > 0.0)) csv.Fail("speed must be positive");
    speeds[l] = v;
  }
  return speeds;
}

void WriteSpeedsCsv(const SpeedMap& speeds, const RoadNetwork& net,
                    std::ostream& out) {
  out << "link_id,speed_mps\n";
  for (const auto& [l, v] : speeds) {
    out << Quote(net.link(l).id) << ',' << FormatNumber(v) << '\n';
  }
}

std::string FileDigest(const std::filesystem::path& path) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(Fnv1a(ReadFile(path))));
  return buf;
}

std::string ManifestJson(const RunManifest& m) {
  Json config = Json::object();
  for (const auto& [k, v] : m.config) config[k] = v;
  Json inputs = Json::object();
  for (const auto& [k, v] : m.inputs) inputs[k] = {{"fnv1a64", v}};
  const Json doc = {{"tool", "dp_mobility"},
                    {"version", ArtifactVersion()},
                    {"command", m.command},
                    {"args", m.args},
                    {"config", config},
                    {"inputs", inputs},
                    {"global_seed", m.global_seed},
                    {"outputs", m.outputs}};
  return doc.dump(2) + "\n";
}

void WriteManifest(const RunManifest& manifest,
                   const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(path.string(), 0, "cannot write manifest");
  out << ManifestJson(manifest);
}

const char* ArtifactVersion() { return DPMOB_VERSION; }

}  // namespace dpmob
