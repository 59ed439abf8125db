#include "cpsa/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "cpsa/error.hpp"

namespace cpsa::traffic {

namespace cst = cpsa::constellation;

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& text, int row, const char* column) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw IngestionError("region map row " + std::to_string(row) + ": column '" + column +
                         "' is not a number: '" + text + "'");
  }
}

}  // namespace

int utc_offset_for_longitude(double centre_lon_deg) {
  return static_cast<int>(std::lround(centre_lon_deg / 15.0));
}

RegionMap parse_region_map(std::istream& in) {
  std::vector<Region> rows;
  std::vector<int> grid_slot(cst::kRegionCount, -1);
  std::vector<bool> id_seen(cst::kRegionCount + 1, false);
  std::string line;
  int line_no = 0;
  int data_row = 0;
  bool header_seen = false;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (!header_seen) {
      header_seen = true;
      const auto cols = split_csv(t);
      if (cols.size() < 4 || cols[0] != "region_id") {
        throw IngestionError("region map line " + std::to_string(line_no) +
                             ": expected header region_id,lat_min,lon_min,max_users[,utc_offset]");
      }
      continue;
    }
    ++data_row;
    const auto cols = split_csv(t);
    if (cols.size() != 4 && cols.size() != 5) {
      throw IngestionError("region map row " + std::to_string(data_row) + ": expected 4 or 5 columns, got " +
                           std::to_string(cols.size()));
    }
    Region r;
    const double id = parse_number(cols[0], data_row, "region_id");
    r.region_id = static_cast<int>(id);
    r.lat_min = parse_number(cols[1], data_row, "lat_min");
    r.lon_min = parse_number(cols[2], data_row, "lon_min");
    r.max_users = parse_number(cols[3], data_row, "max_users");
    if (id != r.region_id || r.region_id < 1 || r.region_id > cst::kRegionCount) {
      throw IngestionError("region map row " + std::to_string(data_row) + ": region_id must be an integer in 1..288");
    }
    if (id_seen[static_cast<std::size_t>(r.region_id)]) {
      throw IngestionError("region map row " + std::to_string(data_row) + ": duplicate region_id " + cols[0]);
    }
    id_seen[static_cast<std::size_t>(r.region_id)] = true;
    if (r.max_users < 0.0) {
      throw IngestionError("region map row " + std::to_string(data_row) + ": negative max_users");
    }
    const int cell = cst::region_index(r.lat_min, r.lon_min);
    if (cell < 0) {
      throw IngestionError("region map row " + std::to_string(data_row) +
                           ": bounds are not on the 15 degree region grid");
    }
    if (grid_slot[static_cast<std::size_t>(cell)] >= 0) {
      throw IngestionError("region map row " + std::to_string(data_row) + ": bounds overlap row " +
                           std::to_string(grid_slot[static_cast<std::size_t>(cell)] + 1));
    }
    grid_slot[static_cast<std::size_t>(cell)] = data_row - 1;
    r.max_messages = r.max_users / kUsersPerMessage;
    r.utc_offset_hours = cols.size() == 5 && !cols[4].empty()
                             ? static_cast<int>(parse_number(cols[4], data_row, "utc_offset"))
                             : utc_offset_for_longitude(r.lon_min + cst::kRegionSizeDeg / 2);
    rows.push_back(r);
  }
  if (!header_seen) throw IngestionError("region map: missing header row");
  if (rows.size() != static_cast<std::size_t>(cst::kRegionCount)) {
    throw IngestionError("region map: expected 288 regions, got " + std::to_string(rows.size()));
  }
  RegionMap map;
  map.regions.resize(rows.size());
  for (int cell = 0; cell < cst::kRegionCount; ++cell) {
    map.regions[static_cast<std::size_t>(cell)] = rows[static_cast<std::size_t>(grid_slot[static_cast<std::size_t>(cell)])];
  }
  return map;
}

RegionMap load_region_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("region map: cannot open " + path.string());
  return parse_region_map(in);
}

void write_region_map(std::ostream& out, const RegionMap& map) {
  out << "region_id,lat_min,lon_min,max_users,utc_offset\n";
  for (const auto& r : map.regions) {
    out << r.region_id << ',' << r.lat_min << ',' << r.lon_min << ',' << static_cast<long long>(std::llround(r.max_users))
        << ',' << r.utc_offset_hours << '\n';
  }
}

namespace {

RegionMap grid_map(auto&& users_for) {
  RegionMap map;
  for (int cell = 0; cell < cst::kRegionCount; ++cell) {
    const auto b = cst::region_bounds(cell);
    Region r;
    r.region_id = cell + 1;
    r.lat_min = b.lat_min;
    r.lon_min = b.lon_min;
    r.max_users = users_for(b.lat_min + cst::kRegionSizeDeg / 2, b.lon_min + cst::kRegionSizeDeg / 2);
    r.max_messages = r.max_users / kUsersPerMessage;
    r.utc_offset_hours = utc_offset_for_longitude(b.lon_min + cst::kRegionSizeDeg / 2);
    map.regions.push_back(r);
  }
  return map;
}

struct Hotspot {
  double lat, lon, sigma_deg, weight;
};

// Rough population centres; weights are relative shares of Internet users.
constexpr Hotspot kHotspots[] = {
    {32.0, 115.0, 9.0, 1.00},   // East China
    {23.0, 80.0, 8.0, 0.85},    // India
    {36.0, 138.0, 4.0, 0.12},   // Japan
    {50.0, 10.0, 9.0, 0.55},    // Europe
    {40.0, -80.0, 8.0, 0.30},   // Eastern US
    {37.0, -115.0, 6.0, 0.10},  // Western US
    {-15.0, -50.0, 9.0, 0.18},  // Brazil
    {20.0, -100.0, 5.0, 0.09},  // Mexico
    {5.0, 5.0, 7.0, 0.14},      // West Africa
    {30.0, 31.0, 5.0, 0.07},    // Egypt
    {-1.0, 36.0, 6.0, 0.06},    // East Africa
    {0.0, 110.0, 8.0, 0.22},    // South-East Asia
    {55.0, 40.0, 7.0, 0.11},    // Russia
    {-30.0, 148.0, 5.0, 0.03},  // Australia
};

}  // namespace

RegionMap synthetic_region_map(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(0.8, 1.2);
  constexpr double total_users = 5.0e9;

  std::vector<double> raw;
  for (int cell = 0; cell < cst::kRegionCount; ++cell) {
    const auto b = cst::region_bounds(cell);
    const double lat = b.lat_min + cst::kRegionSizeDeg / 2;
    const double lon = b.lon_min + cst::kRegionSizeDeg / 2;
    double v = 0.0;
    for (const auto& h : kHotspots) {
      double dlon = std::abs(lon - h.lon);
      dlon = std::min(dlon, 360.0 - dlon) * std::cos(lat * std::numbers::pi / 180.0);
      const double dlat = lat - h.lat;
      v += h.weight * std::exp(-(dlat * dlat + dlon * dlon) / (2.0 * h.sigma_deg * h.sigma_deg));
    }
    // Polar bands and open ocean keep a small residual population.
    raw.push_back((v + 1e-4) * jitter(rng));
  }
  const double sum = std::accumulate(raw.begin(), raw.end(), 0.0);
  std::size_t i = 0;
  return grid_map([&](double, double) { return std::round(raw[i++] / sum * total_users); });
}

RegionMap uniform_region_map(double users_per_region) {
  return grid_map([&](double, double) { return users_per_region; });
}

void TrafficParams::validate() const {
  if (!(eta1 > 0.0 && eta1 <= 1.0)) throw ConfigError("traffic.eta1: must lie in (0, 1]");
}

double diurnal_factor_local(double tau) {
  tau = std::fmod(tau, 24.0);
  if (tau < 0.0) tau += 24.0;
  if (tau < 6.0) return 0.0;
  if (tau < 10.0) return 0.25 * (tau - 6.0);
  if (tau < 22.0) return 1.0;
  return 1.0 - 0.25 * (tau - 22.0);
}

double diurnal_factor(const Region& region, UnixSeconds gmt) {
  return diurnal_factor_local(gmt_hours(gmt) + region.utc_offset_hours);
}

double region_messages(const Region& region, UnixSeconds gmt, const TrafficParams& params) {
  return region.max_messages * diurnal_factor(region, gmt) * params.eta1;
}

std::int64_t RequestVector::total() const { return std::accumulate(counts.begin(), counts.end(), std::int64_t{0}); }

double RequestVector::total_exact() const { return std::accumulate(exact.begin(), exact.end(), 0.0); }

RequestVector distribute_requests(std::span<const std::vector<cst::RegionCoverage>> footprints,
                                  std::span<const double> messages, const TrafficParams& params, UnixSeconds gmt) {
  std::vector<double> covered_area(messages.size(), 0.0);
  for (const auto& fp : footprints) {
    for (const auto& c : fp) covered_area[static_cast<std::size_t>(c.region)] += c.area_km2;
  }
  RequestVector out;
  out.gmt = gmt;
  out.exact.assign(footprints.size(), 0.0);
  for (std::size_t n = 0; n < footprints.size(); ++n) {
    for (const auto& c : footprints[n]) {
      const auto r = static_cast<std::size_t>(c.region);
      out.exact[n] += messages[r] * (c.area_km2 / covered_area[r]);
    }
  }
  for (std::size_t r = 0; r < messages.size(); ++r) {
    if (covered_area[r] > 0.0) out.covered_region_total += messages[r];
  }
  out.counts.reserve(out.exact.size());
  for (double v : out.exact) {
    const double rounded = params.rounding == Rounding::floor ? std::floor(v) : std::round(v);
    out.counts.push_back(static_cast<std::int64_t>(rounded));
  }
  return out;
}

RequestVector satellite_requests(std::span<const cst::SatState> states, const RegionMap& map, UnixSeconds gmt,
                                 const TrafficParams& params, const cst::CoverageGrid& grid) {
  std::vector<std::vector<cst::RegionCoverage>> footprints;
  footprints.reserve(states.size());
  for (const auto& s : states) footprints.push_back(grid.footprint(s));
  std::vector<double> messages;
  messages.reserve(map.regions.size());
  for (const auto& r : map.regions) messages.push_back(region_messages(r, gmt, params));
  return distribute_requests(footprints, messages, params, gmt);
}

}  // namespace cpsa::traffic
