#pragma once

// Per-slot controller request synthesis from a 288-region Internet-user map.
//
// A region emits P_r * w_r(gmt) * eta1 requests per slot, where P_r is one
// message per 100 users and w_r is the diurnal ramp at the region's local
// time. Each region's requests are split between the satellites that cover
// it in proportion to covered area.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "cpsa/constellation.hpp"
#include "cpsa/gmt.hpp"

namespace cpsa::traffic {

inline constexpr double kUsersPerMessage = 100.0;

struct Region {
  int region_id = 0;  // 1-based id from the input file
  double lat_min = 0.0;
  double lon_min = 0.0;
  double max_users = 0.0;
  double max_messages = 0.0;  // P_r
  int utc_offset_hours = 0;
};

// Regions stored in grid order (see constellation::region_bounds).
struct RegionMap {
  std::vector<Region> regions;
};

// UTC offset implied by the region's centre longitude, round(lon / 15).
int utc_offset_for_longitude(double centre_lon_deg);

// CSV: header row, then region_id,lat_min,lon_min,max_users[,utc_offset].
// Lines starting with '#' are comments. Throws IngestionError with the row
// number on wrong row count, off-grid or overlapping bounds, or negative users.
RegionMap parse_region_map(std::istream& in);
RegionMap load_region_map(const std::filesystem::path& path);
void write_region_map(std::ostream& out, const RegionMap& map);

// Deterministic synthetic map with continent-shaped hotspots, roughly
// five billion users in total.
RegionMap synthetic_region_map(std::uint64_t seed);

// Every region with the same user count; handy for tests.
RegionMap uniform_region_map(double users_per_region);

enum class Rounding { floor, round };

struct TrafficParams {
  double eta1 = 0.05;
  Rounding rounding = Rounding::floor;

  void validate() const;
};

// Four-branch ramp on local time in hours: 0 before 06:00, rising linearly to
// 1 at 10:00, flat until 22:00, then falling by 0.25 per hour.
double diurnal_factor_local(double local_hours);
double diurnal_factor(const Region& region, UnixSeconds gmt);

double region_messages(const Region& region, UnixSeconds gmt, const TrafficParams& params);

struct RequestVector {
  UnixSeconds gmt = 0;
  std::vector<double> exact;           // before rounding
  std::vector<std::int64_t> counts;    // after the rounding policy
  double covered_region_total = 0.0;   // sum of p_r over regions seen by any satellite

  std::int64_t total() const;
  double total_exact() const;
};

// footprints[n] lists the regions satellite n covers with their areas;
// messages[r] is p_r for grid region r.
RequestVector distribute_requests(std::span<const std::vector<constellation::RegionCoverage>> footprints,
                                  std::span<const double> messages, const TrafficParams& params,
                                  UnixSeconds gmt = 0);

RequestVector satellite_requests(std::span<const constellation::SatState> states, const RegionMap& map,
                                 UnixSeconds gmt, const TrafficParams& params,
                                 const constellation::CoverageGrid& grid);

}  // namespace cpsa::traffic
