#include "flattop/cumulants.hpp"
#include "flattop/error.hpp"
#include "flattop/models.hpp"

#include "../oracles.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>

using namespace flattop;

TEST_CASE("central moment hand-computed values")
{
  const TimeSeries x(std::vector<double>{ 1, 2, 3, 4 });
  CHECK(central_moment_estimate(x, { 1 }) == doctest::Approx(0.3125).epsilon(1e-15));
  CHECK(central_moment_estimate(x, { 0, 0 }) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(central_moment_estimate(x, { 10 }) == 0.0);
  CHECK(central_moment_estimate(x, { -10 }) == 0.0);
  CHECK(central_moment_estimate(x, { 4, 1 }) == 0.0);
}

TEST_CASE("central moment orders outside 2 and 3 are rejected")
{
  const TimeSeries x(std::vector<double>{ 1, 2, 3, 4 });
  CHECK_THROWS_AS(central_moment_estimate(x, LagVector{}), InvalidInput);
  CHECK_THROWS_AS(central_moment_estimate(x, { 0, 0, 0 }), InvalidInput);
}

TEST_CASE("non-finite values are rejected")
{
  CHECK_THROWS_AS(TimeSeries(std::vector<double>{ 1, NAN, 3 }), InvalidInput);
  CHECK_THROWS_AS(TimeSeries(std::vector<double>{ 1, INFINITY }), InvalidInput);
  CHECK_THROWS_AS(TimeSeries(std::vector<double>{}), InvalidInput);
}

TEST_CASE("central moment agrees with the brute-force oracle")
{
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto data = testing::skewed_data(37, seed);
    const TimeSeries x(data);
    for (long t1 = -40; t1 <= 40; t1 += 3) {
      CHECK(central_moment_estimate(x, { t1 }) ==
            doctest::Approx(oracle::central_moment(data, { t1 })).epsilon(1e-12));
      for (long t2 = -12; t2 <= 12; t2 += 5) {
        CHECK(central_moment_estimate(x, { t1, t2 }) ==
              doctest::Approx(oracle::central_moment(data, { t1, t2 })).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("multi-channel central moment")
{
  const auto a = testing::normal_data(40, 1);
  const auto b = testing::skewed_data(40, 2);
  const TimeSeries x(std::vector<std::vector<double>>{ a, b });
  // cross moment of (a, b) by hand
  double ma = 0, mb = 0;
  for (std::size_t t = 0; t < 40; ++t) {
    ma += a[t];
    mb += b[t];
  }
  ma /= 40;
  mb /= 40;
  double s = 0;
  for (std::size_t t = 0; t + 2 < 40; ++t) {
    s += (a[t + 2] - ma) * (b[t] - mb);
  }
  CHECK(central_moment_estimate(x, { 0, 1 }, { 2 }) == doctest::Approx(s / 40).epsilon(1e-12));
  CHECK_THROWS_AS(central_moment_estimate(x, { 0, 5 }, { 2 }), InvalidInput);
}

TEST_CASE("sample third moment obeys the lag symmetries exactly")
{
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const TimeSeries x(testing::skewed_data(50, 100 + seed));
    for (long t1 = -10; t1 <= 10; ++t1) {
      for (long t2 = -10; t2 <= 10; ++t2) {
        const double c = central_moment_estimate(x, { t1, t2 });
        CHECK(central_moment_estimate(x, { t2, t1 }) == c);
        CHECK(central_moment_estimate(x, { -t1, t2 - t1 }) == c);
        CHECK(central_moment_estimate(x, { t1 - t2, -t2 }) == c);
      }
    }
  }
}

TEST_CASE("central moment is shift invariant")
{
  const auto data = testing::skewed_data(60, 5);
  auto shifted = data;
  for (auto& v : shifted) {
    v += 1000.0;
  }
  const TimeSeries x(data), y(shifted);
  for (long t = 0; t < 5; ++t) {
    CHECK(central_moment_estimate(y, { t }) ==
          doctest::Approx(central_moment_estimate(x, { t })).epsilon(1e-9));
    CHECK(central_moment_estimate(y, { t, 1 }) ==
          doctest::Approx(central_moment_estimate(x, { t, 1 })).epsilon(1e-8));
  }
}

TEST_CASE("set partitions match brute force enumeration")
{
  const std::array<std::size_t, 4> bell = { 1, 2, 5, 15 };
  for (int n = 1; n <= 4; ++n) {
    auto ours = set_partitions(n);
    auto ref = oracle::set_partitions(n);
    CHECK(ours.size() == bell[static_cast<std::size_t>(n - 1)]);
    auto canon = [](std::vector<std::vector<std::vector<int>>> ps) {
      for (auto& p : ps) {
        for (auto& b : p) {
          std::sort(b.begin(), b.end());
        }
        std::sort(p.begin(), p.end());
      }
      std::sort(ps.begin(), ps.end());
      return ps;
    };
    CHECK(canon(ours) == canon(ref));
  }
  CHECK_THROWS_AS(set_partitions(5), InvalidInput);
}

TEST_CASE("joint cumulant examples")
{
  const TimeSeries x(std::vector<double>{ 1, 2, 3, 4 });
  CHECK(joint_cumulant_estimate(x, { 0, 0 }, { 0 }) == doctest::Approx(1.25).epsilon(1e-15));
  const TimeSeries z(std::vector<double>(20, 0.0));
  CHECK(joint_cumulant_estimate(z, { 0, 0, 0 }, { 1, 2 }) == 0.0);
  CHECK_THROWS_AS(joint_cumulant_estimate(x, { 0, 0, 0, 0, 0 }, { 0, 0, 0, 0 }), InvalidInput);
  // fourth order runs and is finite
  const TimeSeries y(testing::normal_data(200, 3));
  CHECK(std::isfinite(joint_cumulant_estimate(y, { 0, 0, 0, 0 }, { 1, 2, 3 })));
}

TEST_CASE("joint cumulant approaches the central moment as N grows")
{
  auto gap = [](std::size_t n) {
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const TimeSeries x(generate(iid_model(), n, 77, seed));
      total += std::abs(joint_cumulant_estimate(x, { 0, 0, 0 }, { 2, 1 }) -
                        central_moment_estimate(x, { 0, 0, 0 }, { 2, 1 }));
      total += std::abs(joint_cumulant_estimate(x, { 0, 0 }, { 3 }) -
                        central_moment_estimate(x, { 0, 0 }, { 3 }));
    }
    return total;
  };
  CHECK(gap(4000) < gap(100));
}

TEST_CASE("normalized cumulant")
{
  const TimeSeries x(std::vector<double>{ 1, 2, 3, 4 });
  CHECK(normalized_cumulant(x, { 1 }) == doctest::Approx(0.25).epsilon(1e-14));
  const TimeSeries y(testing::skewed_data(100, 9));
  CHECK(normalized_cumulant(y, { 0 }) == doctest::Approx(1.0).epsilon(1e-14));
  const TimeSeries c(std::vector<double>(30, 2.5));
  CHECK_THROWS_AS(normalized_cumulant(c, { 1 }), DegenerateInput);
}

TEST_CASE("normalized third cumulant of Gaussian noise is small")
{
  int small = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const TimeSeries x(testing::normal_data(10000, 500 + seed));
    small += std::abs(normalized_cumulant(x, { 2, 1 })) < 0.05 ? 1 : 0;
  }
  CHECK(small >= 38);
}
