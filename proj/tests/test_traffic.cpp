#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "cpsa/constellation.hpp"
#include "cpsa/error.hpp"
#include "cpsa/traffic.hpp"

#ifndef CPSA_SOURCE_DIR
#define CPSA_SOURCE_DIR "."
#endif

using namespace cpsa;
using namespace cpsa::traffic;

namespace {

std::string grid_csv(int rows, const std::string& extra = "") {
  std::ostringstream out;
  out << "region_id,lat_min,lon_min,max_users\n# comment line\n";
  for (int r = 0; r < rows; ++r) {
    const auto b = constellation::region_bounds(r);
    out << r + 1 << ',' << b.lat_min << ',' << b.lon_min << ',' << 1000 * (r % 7) << '\n';
  }
  out << extra;
  return out.str();
}

RegionMap parse(const std::string& text) {
  std::istringstream in(text);
  return parse_region_map(in);
}

}  // namespace

TEST_CASE("region map ingestion") {
  const auto map = parse(grid_csv(288));
  REQUIRE(map.regions.size() == 288);
  CHECK(map.regions[25].region_id == 26);
  CHECK(map.regions[25].max_messages == doctest::Approx(40.0));
  CHECK(map.regions[0].utc_offset_hours == -12);
}

TEST_CASE("region map errors carry the row") {
  CHECK_THROWS_WITH_AS(parse(grid_csv(287)), doctest::Contains("expected 288"), IngestionError);
  CHECK_THROWS_WITH_AS(parse(grid_csv(288, "1,-90,-180,5\n")), doctest::Contains("row 289"), IngestionError);
  std::string neg = grid_csv(288);
  neg.replace(neg.find("\n2,-90,-165,1000"), 16, "\n2,-90,-165,-1");
  CHECK_THROWS_WITH_AS(parse(neg), doctest::Contains("row 2: negative"), IngestionError);
  std::string off = grid_csv(288);
  off.replace(off.find("\n3,-90,-150,"), 12, "\n3,-90,-151,");
  CHECK_THROWS_WITH_AS(parse(off), doctest::Contains("row 3"), IngestionError);
  std::string overlap = grid_csv(288);
  overlap.replace(overlap.find("\n4,-90,-135,"), 12, "\n4,-90,-150,");
  CHECK_THROWS_WITH_AS(parse(overlap), doctest::Contains("overlap"), IngestionError);
  CHECK_THROWS_AS(parse("id,a,b,c\n"), IngestionError);
}

TEST_CASE("region map write and read back") {
  const auto map = synthetic_region_map(3);
  std::stringstream io;
  write_region_map(io, map);
  const auto back = parse_region_map(io);
  for (int r = 0; r < 288; ++r) {
    CHECK(back.regions[r].region_id == map.regions[r].region_id);
    CHECK(back.regions[r].max_users == doctest::Approx(std::round(map.regions[r].max_users)));
    CHECK(back.regions[r].utc_offset_hours == map.regions[r].utc_offset_hours);
  }
}

TEST_CASE("bundled sample map") {
  const auto map = load_region_map(std::string(CPSA_SOURCE_DIR) + "/data/sample_region_map.csv");
  double users = 0.0;
  for (const auto& r : map.regions) users += r.max_users;
  CHECK(users > 4e9);
  CHECK(users < 6e9);
}

TEST_CASE("utc offset from longitude") {
  CHECK(utc_offset_for_longitude(7.5) == 1);
  CHECK(utc_offset_for_longitude(-7.5) == -1);
  CHECK(utc_offset_for_longitude(0.0) == 0);
  CHECK(utc_offset_for_longitude(172.5) == 12);
}

TEST_CASE("diurnal ramp") {
  CHECK(diurnal_factor_local(3.0) == 0.0);
  CHECK(diurnal_factor_local(14.0) == 1.0);
  CHECK(diurnal_factor_local(23.0) == 0.75);
  CHECK(diurnal_factor_local(8.0) == 0.5);
  CHECK(diurnal_factor_local(-1.0) == 0.75);
  CHECK(diurnal_factor_local(27.0) == 0.0);

  // Independent table at quarter-hour resolution.
  for (int q = 0; q < 96; ++q) {
    const double tau = q * 0.25;
    double expect = 0.0;
    if (tau >= 6.0 && tau < 10.0) expect = (tau - 6.0) / 4.0;
    if (tau >= 10.0 && tau < 22.0) expect = 1.0;
    if (tau >= 22.0) expect = 1.0 - (tau - 22.0) / 4.0;
    CHECK(diurnal_factor_local(tau) == doctest::Approx(expect).epsilon(1e-15));
  }

  Region r;
  r.utc_offset_hours = 8;
  CHECK(diurnal_factor(r, 1640995200 + 6 * 3600) == 1.0);  // 14:00 local
}

TEST_CASE("region request volume") {
  Region r;
  r.max_users = 1e6;
  r.max_messages = r.max_users / kUsersPerMessage;
  r.utc_offset_hours = 0;
  const TrafficParams p;
  CHECK(region_messages(r, 1640995200 + 14 * 3600, p) == doctest::Approx(500.0));
  CHECK(region_messages(r, 1640995200 + 3 * 3600, p) == 0.0);
  r.max_messages = 0.0;
  CHECK(region_messages(r, 1640995200 + 14 * 3600, p) == 0.0);

  TrafficParams bad;
  bad.eta1 = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("requests split by covered area") {
  std::vector<double> messages(288, 0.0);
  messages[10] = 400.0;
  messages[20] = 500.0;
  std::vector<std::vector<constellation::RegionCoverage>> fp(3);
  fp[0] = {{10, 300.0}};
  fp[1] = {{10, 100.0}};
  fp[2] = {{20, 50.0}};
  const auto rv = distribute_requests(fp, messages, TrafficParams{});
  CHECK(rv.exact[0] == doctest::Approx(300.0));
  CHECK(rv.exact[1] == doctest::Approx(100.0));
  CHECK(rv.exact[2] == doctest::Approx(500.0));
  CHECK(rv.counts == std::vector<std::int64_t>{300, 100, 500});
  CHECK(rv.covered_region_total == 900.0);

  std::vector<double> night(288, 0.0);
  const auto zero = distribute_requests(fp, night, TrafficParams{});
  CHECK(zero.total() == 0);
}

TEST_CASE("rounding policy") {
  std::vector<double> messages(288, 0.0);
  messages[0] = 10.0;
  std::vector<std::vector<constellation::RegionCoverage>> fp(3);
  for (auto& f : fp) f = {{0, 1.0}};
  TrafficParams floor_p, round_p;
  round_p.rounding = Rounding::round;
  CHECK(distribute_requests(fp, messages, floor_p).total() == 9);
  CHECK(distribute_requests(fp, messages, round_p).total() == 9);
  messages[0] = 11.0;
  CHECK(distribute_requests(fp, messages, round_p).counts[0] == 4);
  CHECK(distribute_requests(fp, messages, floor_p).counts[0] == 3);
}

TEST_CASE("satellite requests conserve covered traffic") {
  constellation::ConstellationConfig cfg;
  constellation::CoverageGrid grid(cfg);
  const auto el = constellation::build_walker(cfg);
  const auto map = synthetic_region_map(2022);
  for (int slot = 1; slot <= 1440; slot += 97) {
    const auto states = constellation::propagate(el, cfg.epoch_gmt, slot, 60.0);
    const auto rv = satellite_requests(states, map, cfg.epoch_gmt + (slot - 1) * 60, TrafficParams{}, grid);
    CHECK(rv.total_exact() == doctest::Approx(rv.covered_region_total).epsilon(1e-9));
    CHECK(rv.total() <= rv.total_exact());
    CHECK(rv.total_exact() - static_cast<double>(rv.total()) < 72.0);
  }
}
