#include <catch_amalgamated.hpp>

#include <sstream>

#include "combnet/experiment.hpp"

using namespace combnet;

TEST_CASE("curve rows on the grid") {
  const Topology topo(4, 2);
  CurveBuilder builder(topo, 6, 0);

  const CurveRow r2 = builder.grid_row(2);
  CHECK(r2.memory == Rational(2));
  CHECK(r2.load_base == make_ratio(7, 15));
  CHECK(r2.load_improved == make_ratio(7, 15));
  CHECK(r2.eq4_bound == make_ratio(2, 3));
  CHECK(r2.cutset_bound == make_ratio(1, 3));
  CHECK(r2.uncoded_gap == make_ratio(7, 5));

  const CurveRow r3 = builder.grid_row(3);
  CHECK(r3.load_base == make_ratio(3, 10));
  CHECK(r3.load_improved == make_ratio(47, 160));

  const CurveRow rk = builder.grid_row(6);
  CHECK(rk.load_base == Rational(0));
  CHECK(rk.eq4_bound == Rational(0));
  CHECK(rk.uncoded_gap == Rational(1));

  CHECK_THROWS_AS(builder.grid_row(7), parameter_error);
}

TEST_CASE("off-grid memory points interpolate by memory sharing") {
  const Topology topo(4, 2);
  CurveBuilder builder(topo, 6, 0);

  SECTION("grid-exact memory maps back to its t") {
    const CurveRow row = builder.memory_row(Rational(1));
    CHECK(row.t == 1);
    CHECK(row.load_base == make_ratio(11, 16));
  }

  SECTION("halfway between t=0 and t=1") {
    const CurveRow row = builder.memory_row(make_ratio(1, 2));
    CHECK(row.t == -1);
    // midpoint of (0, 3/2) and (1, 11/16) on the lower envelope
    CHECK(row.load_base == make_ratio(35, 32));
    CHECK(row.load_improved <= row.load_base);
    CHECK(row.cutset_bound <= row.load_base);
  }

  CHECK_THROWS_AS(builder.memory_row(Rational(7)), parameter_error);
  CHECK_THROWS_AS(builder.memory_row(Rational(-1)), parameter_error);
}

TEST_CASE("curve CSV format") {
  const Topology topo(4, 2);
  const std::string csv = curve_csv(topo, 6, 0);
  std::istringstream is(csv);
  std::string line;
  REQUIRE(std::getline(is, line));
  CHECK(line ==
        "t,M_num,M_den,load_base_num,load_base_den,load_improved_num,load_improved_den,"
        "eq4_num,eq4_den,cutset_num,cutset_den,gap_num,gap_den");
  int rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 12);
  }
  CHECK(rows == 7);  // t = 0..6

  SECTION("t=2 row is exact") {
    CHECK(csv.find("\n2,2,1,7,15,7,15,2,3,1,3,7,5\n") != std::string::npos);
  }

  SECTION("byte identical across rebuilds") {
    CHECK(csv == curve_csv(Topology(4, 2), 6, 0));
  }

  SECTION("memory rows carry t = -1") {
    const std::string with_memory = curve_csv(topo, 6, {}, {make_ratio(1, 2)}, 0);
    CHECK(with_memory.find("\n-1,1,2,35,32,") != std::string::npos);
  }
}
