#include <doctest.h>

#include <cstdlib>
#include <cstring>
#include <sstream>
#include <stdexcept>

#include "twinsim/io.hpp"

using namespace twinsim::io;
using twinsim::hom::VisibilityPoint;

TEST_CASE("format_double is shortest round-trip") {
  for (double v : {0.1, 1.0 / 3.0, 76e6, 1e-300, -0.9878, 13.157894736842105e-9}) {
    const std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(2.0) == "2");
}

TEST_CASE("key=value config parsing") {
  std::stringstream in(
      "# reference run\n"
      "eta_a = 0.42\n"
      "p = 0.001, 0.005 0.01\n"
      "  seed=42   # trailing comment\n"
      "name = run7\n");
  const auto cfg = KeyValueConfig::parse(in);
  CHECK(cfg.get_double("eta_a") == 0.42);
  CHECK(cfg.get_double_list("p") == std::vector<double>{0.001, 0.005, 0.01});
  CHECK(cfg.get_u64_or("seed", 0) == 42);
  CHECK(cfg.get_string("name") == "run7");
  CHECK(cfg.get_double_or("missing", 7.5) == 7.5);
  CHECK(!cfg.has("missing"));
  CHECK_THROWS_AS(cfg.get_double("missing"), std::invalid_argument);
  CHECK_THROWS_AS(cfg.get_double("name"), std::invalid_argument);

  std::stringstream bad("just a line without equals\n");
  CHECK_THROWS_AS(KeyValueConfig::parse(bad), std::invalid_argument);
}

TEST_CASE("visibility csv round trip") {
  std::vector<VisibilityPoint> pts = {{0.001, 0.9741169224129729, {}, false},
                                      {2.0, 0.584525669276751, {}, false}};
  std::stringstream buf;
  write_visibility_csv(buf, pts);
  const auto back = read_visibility_csv(buf);
  REQUIRE(back.size() == pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(back[i].p == pts[i].p);
    CHECK(back[i].v == pts[i].v);
  }
}

TEST_CASE("fit csv reader accepts optional sigma and header") {
  std::stringstream with_sigma("p,v,sigma_v\n0.001,0.974,0.004\n0.01,0.96,0.002\n");
  auto pts = read_fit_points_csv(with_sigma);
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].sigma_v == 0.004);
  CHECK(pts[1].p == 0.01);

  std::stringstream bare("0.001,0.974\n0.01,0.96\n");
  pts = read_fit_points_csv(bare);
  REQUIRE(pts.size() == 2);
  CHECK(!pts[0].sigma_v.has_value());

  std::stringstream malformed("0.001,0.974,0.004,9\n");
  CHECK_THROWS_AS(read_fit_points_csv(malformed), std::invalid_argument);

  SUBCASE("writer round trip") {
    std::stringstream buf;
    write_fit_points_csv(buf, pts);
    const auto back = read_fit_points_csv(buf);
    REQUIRE(back.size() == pts.size());
    CHECK(back[1].v == pts[1].v);
  }
}
