#include "cpsa/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <string>
#include <utility>

#include "cpsa/error.hpp"
#include "cpsa/simd/kernels.hpp"

namespace cpsa::constellation {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

void require(bool ok, const char* field, const std::string& why) {
  if (!ok) throw ConfigError(std::string("constellation.") + field + ": " + why);
}

Vec3 unit_from_latlon(double lat_deg, double lon_deg) {
  const double lat = lat_deg * kDeg;
  const double lon = lon_deg * kDeg;
  return {std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat)};
}

double angle_between(const Vec3& a, const Vec3& b) {
  const double c = (a.x * b.x + a.y * b.y + a.z * b.z) / (norm(a) * norm(b));
  return std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace

void ConstellationConfig::validate() const {
  require(num_planes > 0, "num_planes", "must be positive");
  require(sats_per_plane > 0, "sats_per_plane", "must be positive");
  require(altitude_km > 0.0, "altitude_km", "must be positive");
  require(inclination_deg > 0.0 && inclination_deg <= 180.0, "inclination_deg", "must lie in (0, 180]");
  require(half_view_angle_deg > 0.0 && half_view_angle_deg < 90.0, "half_view_angle_deg",
          "must lie in (0, 90)");
  require(phasing_factor >= 0 && phasing_factor < std::max(num_planes, 1), "phasing_factor",
          "must lie in [0, num_planes)");
  require(earth_radius_km > 0.0, "earth_radius_km", "must be positive");
  require(orbit_reference_radius_km > 0.0, "orbit_reference_radius_km", "must be positive");
  require(orbit_radius_km() > earth_radius_km, "altitude_km", "orbit must clear the Earth surface");
  const double cells = kRegionSizeDeg / coverage_resolution_deg;
  require(coverage_resolution_deg > 0.0 && std::abs(cells - std::round(cells)) < 1e-9,
          "coverage_resolution_deg", "must divide 15 degrees evenly");
}

double norm(const Vec3& v) { return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z); }

double distance(const Vec3& a, const Vec3& b) {
  return norm(Vec3{a.x - b.x, a.y - b.y, a.z - b.z});
}

std::vector<OrbitalElements> build_walker(const ConstellationConfig& cfg) {
  cfg.validate();
  const int n = cfg.size();
  const double raan_step = 2.0 * std::numbers::pi / cfg.num_planes;
  const double anomaly_step = 2.0 * std::numbers::pi / cfg.sats_per_plane;
  const double phase_step = 2.0 * std::numbers::pi * cfg.phasing_factor / n;

  std::vector<OrbitalElements> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int p = 0; p < cfg.num_planes; ++p) {
    for (int s = 0; s < cfg.sats_per_plane; ++s) {
      OrbitalElements e;
      e.sat_id = p * cfg.sats_per_plane + s;
      e.plane = p;
      e.in_plane = s;
      e.radius_km = cfg.orbit_radius_km();
      e.inclination_rad = cfg.inclination_deg * kDeg;
      e.raan_rad = p * raan_step;
      e.mean_anomaly_rad = std::fmod(s * anomaly_step + p * phase_step, 2.0 * std::numbers::pi);
      out.push_back(e);
    }
  }
  return out;
}

double orbital_period_s(double radius_km) {
  return 2.0 * std::numbers::pi * std::sqrt(radius_km * radius_km * radius_km / kMuEarthKm3PerS2);
}

double earth_rotation_angle(UnixSeconds t) {
  // Whole days contribute whole turns; only the fraction of the day matters.
  const double days_since_j2000 = static_cast<double>(t - 946728000) / 86400.0;
  const double frac = days_since_j2000 - std::floor(days_since_j2000);
  double turns = 0.7790572732640 + frac + 0.00273781191135448 * days_since_j2000;
  turns -= std::floor(turns);
  return 2.0 * std::numbers::pi * turns;
}

std::vector<SatState> propagate(std::span<const OrbitalElements> elements, UnixSeconds epoch, int slot,
                                double slot_seconds) {
  return propagate_seconds(elements, epoch, (slot - 1) * slot_seconds);
}

std::vector<SatState> propagate_seconds(std::span<const OrbitalElements> elements, UnixSeconds epoch, double dt) {
  // Epoch angle advanced at the sidereal rate keeps fractional slots exact.
  const double theta = earth_rotation_angle(epoch) + kEarthRotationRadPerS * dt;
  const double ct = std::cos(theta);
  const double st = std::sin(theta);

  std::vector<SatState> states;
  states.reserve(elements.size());
  for (const auto& e : elements) {
    const double mean_motion = std::sqrt(kMuEarthKm3PerS2 / (e.radius_km * e.radius_km * e.radius_km));
    const double u = e.mean_anomaly_rad + mean_motion * dt;
    const double cu = std::cos(u), su = std::sin(u);
    const double cO = std::cos(e.raan_rad), sO = std::sin(e.raan_rad);
    const double ci = std::cos(e.inclination_rad), si = std::sin(e.inclination_rad);

    SatState s;
    s.sat_id = e.sat_id;
    s.eci = {e.radius_km * (cO * cu - sO * su * ci), e.radius_km * (sO * cu + cO * su * ci),
             e.radius_km * (su * si)};
    s.ecef = {ct * s.eci.x + st * s.eci.y, -st * s.eci.x + ct * s.eci.y, s.eci.z};
    s.lat_deg = std::asin(std::clamp(s.ecef.z / e.radius_km, -1.0, 1.0)) / kDeg;
    s.lon_deg = std::atan2(s.ecef.y, s.ecef.x) / kDeg;
    states.push_back(s);
  }
  return states;
}

std::vector<int> TopologyGraph::degrees() const {
  std::vector<int> deg(static_cast<std::size_t>(nodes), 0);
  for (const auto& l : links) {
    ++deg[static_cast<std::size_t>(l.a)];
    ++deg[static_cast<std::size_t>(l.b)];
  }
  return deg;
}

bool TopologyGraph::connected() const {
  if (nodes == 0) return true;
  std::vector<int> parent(static_cast<std::size_t>(nodes));
  for (int i = 0; i < nodes; ++i) parent[static_cast<std::size_t>(i)] = i;
  auto find = [&](int v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
      parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
      v = parent[static_cast<std::size_t>(v)];
    }
    return v;
  };
  int components = nodes;
  for (const auto& l : links) {
    const int ra = find(l.a), rb = find(l.b);
    if (ra != rb) {
      parent[static_cast<std::size_t>(ra)] = rb;
      --components;
    }
  }
  return components == 1;
}

TopologyGraph isl_topology(std::span<const SatState> states, const ConstellationConfig& cfg) {
  const int planes = cfg.num_planes;
  const int per = cfg.sats_per_plane;
  TopologyGraph g;
  g.nodes = planes * per;
  if (static_cast<int>(states.size()) != g.nodes) {
    throw TopologyError("isl_topology: expected " + std::to_string(g.nodes) + " satellite states, got " +
                        std::to_string(states.size()));
  }
  std::set<std::pair<int, int>> edges;
  auto add = [&](int a, int b) {
    if (a == b) return;
    edges.emplace(std::min(a, b), std::max(a, b));
  };
  for (int p = 0; p < planes; ++p) {
    for (int s = 0; s < per; ++s) {
      const int id = p * per + s;
      add(id, p * per + (s + 1) % per);
      add(id, ((p + 1) % planes) * per + s);
    }
  }
  g.links.reserve(edges.size());
  for (const auto& [a, b] : edges) {
    g.links.push_back({a, b, distance(states[static_cast<std::size_t>(a)].eci, states[static_cast<std::size_t>(b)].eci)});
  }
  return g;
}

std::vector<int> DistanceMatrix::path(int i, int j) const {
  std::vector<int> nodes{i};
  while (i != j) {
    i = next(i, j);
    nodes.push_back(i);
  }
  return nodes;
}

DistanceMatrix shortest_paths(const TopologyGraph& g) {
  const int n = g.nodes;
  const auto un = static_cast<std::size_t>(n);
  constexpr double inf = std::numeric_limits<double>::infinity();

  DistanceMatrix dm;
  dm.n = n;
  dm.dist.assign(un * un, inf);
  std::vector<std::vector<std::pair<int, double>>> adj(un);
  for (int i = 0; i < n; ++i) dm.dist[static_cast<std::size_t>(i) * un + static_cast<std::size_t>(i)] = 0.0;
  for (const auto& l : g.links) {
    const auto a = static_cast<std::size_t>(l.a), b = static_cast<std::size_t>(l.b);
    dm.dist[a * un + b] = std::min(dm.dist[a * un + b], l.length_km);
    dm.dist[b * un + a] = std::min(dm.dist[b * un + a], l.length_km);
    adj[a].emplace_back(l.b, l.length_km);
    adj[b].emplace_back(l.a, l.length_km);
  }
  for (auto& nb : adj) std::sort(nb.begin(), nb.end());

  // Floyd-Warshall; the row relaxation is the vectorised kernel.
  for (std::size_t k = 0; k < un; ++k) {
    const std::span<const double> pivot(dm.dist.data() + k * un, un);
    for (std::size_t i = 0; i < un; ++i) {
      const double via = dm.dist[i * un + k];
      if (i == k || via == inf) continue;
      simd::min_plus_relax(std::span<double>(dm.dist.data() + i * un, un), via, pivot);
    }
  }
  for (double d : dm.dist) {
    if (d == inf) throw TopologyError("shortest_paths: graph is disconnected");
  }

  dm.next_hop.assign(un * un, -1);
  for (std::size_t i = 0; i < un; ++i) {
    for (std::size_t j = 0; j < un; ++j) {
      if (i == j) continue;
      const double target = dm.dist[i * un + j];
      const double tol = 1e-9 * std::max(1.0, target);
      for (const auto& [v, w] : adj[i]) {
        if (std::abs(w + dm.dist[static_cast<std::size_t>(v) * un + j] - target) <= tol) {
          dm.next_hop[i * un + j] = v;
          break;
        }
      }
    }
  }
  dm.hops.assign(un * un, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      int h = 0;
      for (int v = i; v != j; v = dm.next(v, j)) ++h;
      dm.hops[static_cast<std::size_t>(i) * un + static_cast<std::size_t>(j)] = h;
    }
  }
  return dm;
}

double footprint_central_angle_rad(const ConstellationConfig& cfg) {
  const double eps = cfg.half_view_angle_deg * kDeg;
  const double ratio = cfg.orbit_radius_km() / cfg.earth_radius_km;
  const double s = ratio * std::sin(eps);
  if (s >= 1.0) return std::acos(1.0 / ratio);  // view cone reaches past the horizon
  return std::asin(s) - eps;
}

RegionBounds region_bounds(int region) {
  const int band = region / kRegionLonBands;
  const int col = region % kRegionLonBands;
  return {-90.0 + kRegionSizeDeg * band, -180.0 + kRegionSizeDeg * col};
}

int region_index(double lat_min, double lon_min) {
  const double band = (lat_min + 90.0) / kRegionSizeDeg;
  const double col = (lon_min + 180.0) / kRegionSizeDeg;
  if (std::abs(band - std::round(band)) > 1e-9 || std::abs(col - std::round(col)) > 1e-9) return -1;
  const int b = static_cast<int>(std::lround(band));
  const int c = static_cast<int>(std::lround(col));
  if (b < 0 || b >= kRegionLatBands || c < 0 || c >= kRegionLonBands) return -1;
  return b * kRegionLonBands + c;
}

CoverageGrid::CoverageGrid(const ConstellationConfig& cfg)
    : resolution_deg_(cfg.coverage_resolution_deg),
      earth_radius_km_(cfg.earth_radius_km),
      cap_angle_(footprint_central_angle_rad(cfg)),
      cos_cap_(std::cos(cap_angle_)),
      cells_per_side_(static_cast<int>(std::lround(kRegionSizeDeg / cfg.coverage_resolution_deg))) {
  cfg.validate();
  const auto side = static_cast<std::size_t>(cells_per_side_);
  const std::size_t cells = static_cast<std::size_t>(kRegionCount) * side * side;
  xs_.reserve(cells);
  ys_.reserve(cells);
  zs_.reserve(cells);
  row_cell_area_.reserve(static_cast<std::size_t>(kRegionCount) * side);
  const double r2 = earth_radius_km_ * earth_radius_km_;
  const double dlon = resolution_deg_ * kDeg;

  for (int r = 0; r < kRegionCount; ++r) {
    const RegionBounds b = region_bounds(r);
    region_area_.push_back(r2 * kRegionSizeDeg * kDeg *
                           (std::sin((b.lat_min + kRegionSizeDeg) * kDeg) - std::sin(b.lat_min * kDeg)));
    const Vec3 centre = unit_from_latlon(b.lat_min + kRegionSizeDeg / 2, b.lon_min + kRegionSizeDeg / 2);
    double radius = 0.0;
    for (int row = 0; row < cells_per_side_; ++row) {
      const double lat0 = b.lat_min + row * resolution_deg_;
      row_cell_area_.push_back(r2 * dlon * (std::sin((lat0 + resolution_deg_) * kDeg) - std::sin(lat0 * kDeg)));
      for (int col = 0; col < cells_per_side_; ++col) {
        const Vec3 u = unit_from_latlon(lat0 + resolution_deg_ / 2, b.lon_min + (col + 0.5) * resolution_deg_);
        xs_.push_back(u.x);
        ys_.push_back(u.y);
        zs_.push_back(u.z);
        radius = std::max(radius, angle_between(centre, u));
      }
    }
    region_centre_.push_back(centre);
    region_radius_.push_back(radius);
  }
}

double CoverageGrid::region_area_km2(int region) const { return region_area_[static_cast<std::size_t>(region)]; }

double CoverageGrid::covered_area(const Vec3& sub_unit, int region) const {
  const auto ri = static_cast<std::size_t>(region);
  if (angle_between(region_centre_[ri], sub_unit) > cap_angle_ + region_radius_[ri] + 1e-9) return 0.0;
  const auto side = static_cast<std::size_t>(cells_per_side_);
  double area = 0.0;
  for (std::size_t row = 0; row < side; ++row) {
    const std::size_t off = (ri * side + row) * side;
    const std::size_t inside = simd::count_in_cap(std::span(xs_).subspan(off, side), std::span(ys_).subspan(off, side),
                                                  std::span(zs_).subspan(off, side), sub_unit.x, sub_unit.y,
                                                  sub_unit.z, cos_cap_);
    area += static_cast<double>(inside) * row_cell_area_[ri * side + row];
  }
  return area;
}

Coverage CoverageGrid::coverage(const SatState& state, int region) const {
  const double r = norm(state.ecef);
  const Vec3 sub{state.ecef.x / r, state.ecef.y / r, state.ecef.z / r};
  const double area = covered_area(sub, region);
  return {area / region_area_km2(region), area};
}

std::vector<RegionCoverage> CoverageGrid::footprint(const SatState& state) const {
  const double r = norm(state.ecef);
  const Vec3 sub{state.ecef.x / r, state.ecef.y / r, state.ecef.z / r};
  std::vector<RegionCoverage> out;
  for (int region = 0; region < kRegionCount; ++region) {
    const double area = covered_area(sub, region);
    if (area > 0.0) out.push_back({region, area});
  }
  return out;
}

Coverage coverage_fraction(const SatState& state, int region, const ConstellationConfig& cfg) {
  return CoverageGrid(cfg).coverage(state, region);
}

}  // namespace cpsa::constellation
