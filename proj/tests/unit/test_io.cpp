#include "flattop/error.hpp"
#include "flattop/io.hpp"

#include <doctest.h>

#include <numbers>

using namespace flattop;

TEST_CASE("parse_series formats")
{
  const auto a = parse_series("1 2 3\n4 5 6\n");
  CHECK(a.channels() == 3);
  CHECK(a.length() == 2);
  CHECK(a.channel(1)[1] == 5.0);
  const auto b = parse_series("# comment\nx,y\n1.5,2\n-3e-1,4\n\n");
  CHECK(b.channels() == 2);
  CHECK(b.label(0) == "x");
  CHECK(b.channel(0)[1] == -0.3);
  CHECK_THROWS_AS(parse_series("1 2\n3\n"), InvalidInput);
  CHECK_THROWS_AS(parse_series("1\nnan\n"), InvalidInput);
  CHECK_THROWS_AS(parse_series("1\nabc\n"), InvalidInput);
  CHECK_THROWS_AS(parse_series(""), InvalidInput);
  CHECK_THROWS_AS(read_series("/nonexistent/flattop/series.txt"), InvalidInput);
}

TEST_CASE("parse_frequency")
{
  constexpr double pi = std::numbers::pi;
  CHECK(parse_frequency("2") == 2.0);
  CHECK(parse_frequency("pi") == doctest::Approx(pi));
  CHECK(parse_frequency("-pi/2") == doctest::Approx(-pi / 2));
  CHECK(parse_frequency("2pi/3") == doctest::Approx(2 * pi / 3));
  CHECK(parse_frequency("2*pi/3") == doctest::Approx(2 * pi / 3));
  CHECK_THROWS_AS(parse_frequency("tau"), InvalidInput);
  CHECK_THROWS_AS(parse_frequency(""), InvalidInput);
}
