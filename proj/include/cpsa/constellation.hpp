#pragma once

// Walker-delta constellation geometry: orbital elements, circular Keplerian
// propagation, +Grid inter-satellite links, all-pairs shortest paths and
// ground footprint coverage of the 15 x 15 degree region grid.
//
// Satellites and regions are indexed from 0 internally. Satellite n sits in
// plane n / sats_per_plane at in-plane slot n % sats_per_plane.

#include <cstddef>
#include <span>
#include <vector>

#include "cpsa/gmt.hpp"

namespace cpsa::constellation {

inline constexpr double kMuEarthKm3PerS2 = 398600.4418;
inline constexpr double kEarthRotationRadPerS = 7.2921150e-5;
inline constexpr double kRegionSizeDeg = 15.0;
inline constexpr int kRegionLatBands = 12;
inline constexpr int kRegionLonBands = 24;
inline constexpr int kRegionCount = kRegionLatBands * kRegionLonBands;

struct ConstellationConfig {
  int num_planes = 8;
  int sats_per_plane = 9;
  double altitude_km = 780.0;
  double inclination_deg = 53.0;
  double half_view_angle_deg = 35.5;
  int phasing_factor = 1;
  UnixSeconds epoch_gmt = 1640995200;  // 2022-01-01T00:00:00Z
  // Spherical Earth used for all ground geometry.
  double earth_radius_km = 6371.0;
  // Altitude is measured above this radius when forming the orbit radius.
  double orbit_reference_radius_km = 6378.14;
  double coverage_resolution_deg = 0.5;

  int size() const { return num_planes * sats_per_plane; }
  double orbit_radius_km() const { return orbit_reference_radius_km + altitude_km; }

  // Throws ConfigError naming the offending field.
  void validate() const;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

double norm(const Vec3& v);
double distance(const Vec3& a, const Vec3& b);

struct OrbitalElements {
  int sat_id = 0;
  int plane = 0;
  int in_plane = 0;
  double radius_km = 0.0;
  double inclination_rad = 0.0;
  double raan_rad = 0.0;
  double mean_anomaly_rad = 0.0;  // at epoch
};

struct SatState {
  int sat_id = 0;
  Vec3 eci;   // inertial, km
  Vec3 ecef;  // Earth-fixed, km
  double lat_deg = 0.0;
  double lon_deg = 0.0;
};

std::vector<OrbitalElements> build_walker(const ConstellationConfig& cfg);

double orbital_period_s(double radius_km);

// Earth rotation angle (IAU 2000) at the given instant, radians in [0, 2pi).
double earth_rotation_angle(UnixSeconds t);

// States at epoch + (slot - 1) * slot_seconds. slot is 1-based.
std::vector<SatState> propagate(std::span<const OrbitalElements> elements, UnixSeconds epoch, int slot,
                                double slot_seconds);
// States dt seconds after the element epoch.
std::vector<SatState> propagate_seconds(std::span<const OrbitalElements> elements, UnixSeconds epoch, double dt);

struct Link {
  int a = 0;
  int b = 0;
  double length_km = 0.0;
};

struct TopologyGraph {
  int nodes = 0;
  std::vector<Link> links;  // undirected, a < b, no duplicates

  std::vector<int> degrees() const;
  bool connected() const;
};

// +Grid: in-plane predecessor/successor plus same-index neighbours in both
// adjacent planes, wrapping at the seam. Degenerate shapes (fewer than three
// planes or satellites per plane) drop self-links and duplicate edges.
TopologyGraph isl_topology(std::span<const SatState> states, const ConstellationConfig& cfg);

struct DistanceMatrix {
  int n = 0;
  std::vector<double> dist;  // km, row-major n x n
  std::vector<int> hops;
  std::vector<int> next_hop;  // next node on the path i -> j, -1 on the diagonal

  double at(int i, int j) const { return dist[static_cast<std::size_t>(i) * n + j]; }
  int hop_count(int i, int j) const { return hops[static_cast<std::size_t>(i) * n + j]; }
  int next(int i, int j) const { return next_hop[static_cast<std::size_t>(i) * n + j]; }

  // Node sequence from i to j inclusive.
  std::vector<int> path(int i, int j) const;
};

// All-pairs shortest paths by link length. Among equal-length alternatives the
// lowest-index next hop wins. Throws TopologyError on a disconnected graph.
DistanceMatrix shortest_paths(const TopologyGraph& g);

// Earth central angle (radians) between the sub-satellite point and the edge
// of the footprint cut by the half view angle.
double footprint_central_angle_rad(const ConstellationConfig& cfg);

struct RegionBounds {
  double lat_min = 0.0;
  double lon_min = 0.0;
};

// Region r covers [lat_min, lat_min + 15) x [lon_min, lon_min + 15), ordered
// south to north by band, west to east within a band.
RegionBounds region_bounds(int region);
int region_index(double lat_min, double lon_min);  // -1 when off the grid

struct Coverage {
  double fraction = 0.0;
  double area_km2 = 0.0;
};

struct RegionCoverage {
  int region = 0;
  double area_km2 = 0.0;
};

// Fixed-resolution lat/lon sampling of every region. A cell counts toward
// the intersection when its centre lies inside the footprint cap.
class CoverageGrid {
 public:
  explicit CoverageGrid(const ConstellationConfig& cfg);

  double resolution_deg() const { return resolution_deg_; }
  double region_area_km2(int region) const;
  double cap_angle_rad() const { return cap_angle_; }

  Coverage coverage(const SatState& state, int region) const;

  // Nonzero intersections of one satellite's footprint, ascending by region.
  std::vector<RegionCoverage> footprint(const SatState& state) const;

 private:
  double covered_area(const Vec3& sub_unit, int region) const;

  double resolution_deg_;
  double earth_radius_km_;
  double cap_angle_;
  double cos_cap_;
  int cells_per_side_;
  // Cell centres grouped by region then row; unit vectors.
  std::vector<double> xs_, ys_, zs_;
  std::vector<double> row_cell_area_;  // per region-row (regions x cells_per_side)
  std::vector<Vec3> region_centre_;
  std::vector<double> region_radius_;  // max angular distance centre -> cell centre
  std::vector<double> region_area_;
};

// Convenience wrapper that builds a CoverageGrid for a single query.
Coverage coverage_fraction(const SatState& state, int region, const ConstellationConfig& cfg);

}  // namespace cpsa::constellation
