#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cpsa/constellation.hpp"
#include "cpsa/error.hpp"

using namespace cpsa;
using namespace cpsa::constellation;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

SatState state_over(double lat_deg, double lon_deg, double radius_km) {
  SatState s;
  s.lat_deg = lat_deg;
  s.lon_deg = lon_deg;
  s.ecef = {radius_km * std::cos(lat_deg * kDeg) * std::cos(lon_deg * kDeg),
            radius_km * std::cos(lat_deg * kDeg) * std::sin(lon_deg * kDeg), radius_km * std::sin(lat_deg * kDeg)};
  s.eci = s.ecef;
  return s;
}

}  // namespace

TEST_CASE("walker layout") {
  ConstellationConfig cfg;
  const auto el = build_walker(cfg);
  REQUIRE(el.size() == 72);
  CHECK(el[9].plane == 1);
  CHECK(el[9].in_plane == 0);
  CHECK(el[9].raan_rad == doctest::Approx(45.0 * kDeg));
  // F * 360 / N between neighbouring planes.
  CHECK(el[9].mean_anomaly_rad - el[0].mean_anomaly_rad == doctest::Approx(5.0 * kDeg));
  CHECK(el[1].mean_anomaly_rad - el[0].mean_anomaly_rad == doctest::Approx(40.0 * kDeg));

  ConstellationConfig one;
  one.num_planes = 1;
  one.sats_per_plane = 1;
  one.phasing_factor = 0;
  const auto single = build_walker(one);
  REQUIRE(single.size() == 1);
  CHECK(single[0].mean_anomaly_rad == 0.0);
}

TEST_CASE("invalid shapes are rejected with the field name") {
  ConstellationConfig cfg;
  cfg.num_planes = 0;
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("constellation.num_planes"), ConfigError);
  cfg = {};
  cfg.coverage_resolution_deg = 0.7;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("orbital period") {
  const double a = 6378.14 + 780.0;
  const double expect = 2.0 * kPi * std::sqrt(a * a * a / 398600.4418);
  CHECK(orbital_period_s(ConstellationConfig{}.orbit_radius_km()) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(expect == doctest::Approx(6027.0).epsilon(2e-4));
}

TEST_CASE("propagation") {
  ConstellationConfig cfg;
  const auto el = build_walker(cfg);
  const auto t1 = propagate(el, cfg.epoch_gmt, 1, 60.0);
  const auto t0 = propagate_seconds(el, cfg.epoch_gmt, 0.0);
  CHECK(t1[5].eci.x == t0[5].eci.x);

  const double period = orbital_period_s(cfg.orbit_radius_km());
  const auto later = propagate_seconds(el, cfg.epoch_gmt, period);
  for (std::size_t i = 0; i < el.size(); ++i) {
    CHECK(distance(t1[i].eci, later[i].eci) < 1e-6);
    CHECK(norm(t1[i].ecef) == doctest::Approx(cfg.orbit_radius_km()));
    CHECK(std::abs(t1[i].lat_deg) <= 53.0 + 1e-9);
  }
}

TEST_CASE("earth rotation angle") {
  // At the J2000 epoch the angle is 2pi * 0.7790572732640.
  CHECK(earth_rotation_angle(946728000) == doctest::Approx(2.0 * kPi * 0.7790572732640).epsilon(1e-12));
  const double a = earth_rotation_angle(1640995200);
  CHECK(a >= 0.0);
  CHECK(a < 2.0 * kPi);
}

TEST_CASE("+grid topology") {
  ConstellationConfig cfg;
  const auto states = propagate(build_walker(cfg), cfg.epoch_gmt, 1, 60.0);
  const auto g = isl_topology(states, cfg);
  CHECK(g.links.size() == 144);
  for (int d : g.degrees()) CHECK(d == 4);
  CHECK(g.connected());

  const double chord = 2.0 * cfg.orbit_radius_km() * std::sin(20.0 * kDeg);
  CHECK(chord == doctest::Approx(4896.8).epsilon(1e-4));
  int intra = 0;
  for (const auto& l : g.links) {
    CHECK(l.a < l.b);
    if (l.a / 9 == l.b / 9) {
      CHECK(l.length_km == doctest::Approx(chord).epsilon(1e-9));
      ++intra;
    }
  }
  CHECK(intra == 72);
}

TEST_CASE("degenerate topologies drop duplicates and self links") {
  ConstellationConfig cfg;
  cfg.num_planes = 2;
  cfg.sats_per_plane = 3;
  const auto g = isl_topology(propagate(build_walker(cfg), cfg.epoch_gmt, 1, 60.0), cfg);
  // 3 in-plane links per plane plus 3 cross links.
  CHECK(g.links.size() == 9);
  CHECK(g.connected());

  cfg.num_planes = 1;
  cfg.sats_per_plane = 1;
  cfg.phasing_factor = 0;
  CHECK(isl_topology(propagate(build_walker(cfg), cfg.epoch_gmt, 1, 60.0), cfg).links.empty());
}

TEST_CASE("shortest paths on a weighted cycle") {
  TopologyGraph g;
  g.nodes = 4;
  g.links = {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {0, 3, 10.0}};
  const auto dm = shortest_paths(g);
  CHECK(dm.at(0, 3) == 3.0);
  CHECK(dm.hop_count(0, 3) == 3);
  CHECK(dm.path(0, 3) == std::vector<int>{0, 1, 2, 3});
  CHECK(dm.next(2, 2) == -1);
}

TEST_CASE("equal-length routes take the lowest-index next hop") {
  TopologyGraph g;
  g.nodes = 4;
  g.links = {{0, 1, 1.0}, {0, 2, 1.0}, {1, 3, 1.0}, {2, 3, 1.0}};
  const auto dm = shortest_paths(g);
  CHECK(dm.next(0, 3) == 1);
  CHECK(dm.next(3, 0) == 1);
}

TEST_CASE("disconnected graphs are rejected") {
  TopologyGraph g;
  g.nodes = 3;
  g.links = {{0, 1, 1.0}};
  CHECK_THROWS_AS(shortest_paths(g), TopologyError);
}

TEST_CASE("shortest paths on the constellation") {
  ConstellationConfig cfg;
  const auto states = propagate(build_walker(cfg), cfg.epoch_gmt, 30, 60.0);
  const auto dm = shortest_paths(isl_topology(states, cfg));
  for (int i = 0; i < dm.n; ++i) {
    CHECK(dm.at(i, i) == 0.0);
    CHECK(dm.hop_count(i, i) == 0);
    for (int j = 0; j < dm.n; ++j) {
      CHECK(dm.at(i, j) == doctest::Approx(dm.at(j, i)).epsilon(1e-12));
      const auto p = dm.path(i, j);
      CHECK(static_cast<int>(p.size()) == dm.hop_count(i, j) + 1);
      double len = 0.0;
      for (std::size_t s = 1; s < p.size(); ++s) len += distance(states[p[s - 1]].ecef, states[p[s]].ecef);
      CHECK(len == doctest::Approx(dm.at(i, j)).epsilon(1e-9));
    }
  }
}

TEST_CASE("footprint central angle") {
  ConstellationConfig cfg;
  const double r = 6378.14 + 780.0, R = 6371.0, eps = 35.5 * kDeg;
  const double expect = std::asin(r / R * std::sin(eps)) - eps;
  CHECK(footprint_central_angle_rad(cfg) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(expect / kDeg == doctest::Approx(5.226).epsilon(1e-3));

  // Past the horizon the cap is limited by the tangent cone.
  cfg.half_view_angle_deg = 89.0;
  CHECK(footprint_central_angle_rad(cfg) == doctest::Approx(std::acos(R / r)).epsilon(1e-12));
}

TEST_CASE("region grid") {
  CHECK(region_index(-90.0, -180.0) == 0);
  CHECK(region_index(-90.0, -165.0) == 1);
  CHECK(region_index(-75.0, -180.0) == 24);
  CHECK(region_index(75.0, 165.0) == 287);
  CHECK(region_index(7.0, 0.0) == -1);
  CHECK(region_bounds(287).lat_min == 75.0);
  CHECK(region_bounds(287).lon_min == 165.0);

  CoverageGrid grid(ConstellationConfig{});
  double total = 0.0;
  for (int r = 0; r < kRegionCount; ++r) total += grid.region_area_km2(r);
  CHECK(total == doctest::Approx(4.0 * kPi * 6371.0 * 6371.0).epsilon(1e-9));
}

TEST_CASE("footprint fully inside one region") {
  ConstellationConfig cfg;
  CoverageGrid grid(cfg);
  const auto s = state_over(7.5, 7.5, cfg.orbit_radius_km());
  const int region = region_index(0.0, 0.0);
  const double gamma = footprint_central_angle_rad(cfg);

  // Independent cell sum over the same 0.5 degree lattice.
  const double R = cfg.earth_radius_km, res = 0.5;
  double expect = 0.0;
  for (int i = 0; i < 30; ++i) {
    const double lat = (i + 0.5) * res * kDeg;
    const double band = R * R * res * kDeg * (std::sin((i + 1) * res * kDeg) - std::sin(i * res * kDeg));
    for (int j = 0; j < 30; ++j) {
      const double lon = (j + 0.5) * res * kDeg;
      const double cosd = std::sin(lat) * std::sin(7.5 * kDeg) +
                          std::cos(lat) * std::cos(7.5 * kDeg) * std::cos(lon - 7.5 * kDeg);
      if (cosd >= std::cos(gamma)) expect += band;
    }
  }
  const auto c = grid.coverage(s, region);
  CHECK(c.area_km2 == doctest::Approx(expect).epsilon(1e-9));
  CHECK(c.fraction == doctest::Approx(c.area_km2 / grid.region_area_km2(region)));

  // A fine lattice approaches the analytic cap area.
  ConstellationConfig fine = cfg;
  fine.coverage_resolution_deg = 0.1;
  const double cap = 2.0 * kPi * R * R * (1.0 - std::cos(gamma));
  CHECK(CoverageGrid(fine).coverage(s, region).area_km2 == doctest::Approx(cap).epsilon(2e-3));

  const auto fp = grid.footprint(s);
  REQUIRE(fp.size() == 1);
  CHECK(fp[0].region == region);

  CHECK(grid.coverage(s, region_index(45.0, 90.0)).area_km2 == 0.0);
  CHECK(coverage_fraction(s, region, cfg).area_km2 == c.area_km2);
}

TEST_CASE("coverage converges under grid refinement") {
  ConstellationConfig coarse;
  ConstellationConfig fine = coarse;
  fine.coverage_resolution_deg = 0.25;
  CoverageGrid g1(coarse), g2(fine);
  const auto states = propagate(build_walker(coarse), coarse.epoch_gmt, 1, 60.0);
  int checked = 0;
  for (int i = 0; i < 72; i += 5) {
    for (const auto& rc : g2.footprint(states[i])) {
      const double a1 = g1.coverage(states[i], rc.region).area_km2;
      CHECK(std::abs(a1 - rc.area_km2) < 0.01 * g2.region_area_km2(rc.region));
      ++checked;
    }
  }
  CHECK(checked > 15);
}
