#include "flattop/error.hpp"
#include "flattop/spectra.hpp"

#include "../oracles.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace flattop;

namespace {

constexpr double pi = std::numbers::pi;

bool
close(std::complex<double> a, std::complex<double> b, double tol)
{
  return std::abs(a - b) <= tol;
}

} // namespace

TEST_CASE("wrap_frequency")
{
  CHECK(wrap_frequency(0.5) == 0.5);
  CHECK(wrap_frequency(pi) == doctest::Approx(-pi));
  CHECK(wrap_frequency(2 * pi + 0.25) == doctest::Approx(0.25));
  CHECK(wrap_frequency(-3 * pi + 0.1) == doctest::Approx(-pi + 0.1));
}

TEST_CASE("spectrum matches the naive double loop")
{
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto data = testing::skewed_data(50, seed);
    const TimeSeries x(data);
    for (const auto& w : { trapezoid_window(), parzen_window() }) {
      for (double M : { 2.0, 5.0, 60.0 }) {
        for (double omega : { 0.0, 0.7, 2.0, -1.3 }) {
          SpectrumOptions opt;
          opt.truncate_negative = false;
          const auto est = estimate_spectrum(x, w, M, omega, opt);
          const auto ref = oracle::spectrum(data, [&](double t) { return w(t); }, M, omega);
          CHECK(close(est.value, ref, 1e-10));
        }
      }
    }
  }
}

TEST_CASE("spectrum of a single lag is C(0) / 2 pi")
{
  const auto data = testing::normal_data(64, 3);
  const TimeSeries x(data);
  const double c0 = oracle::central_moment(data, { 0 });
  for (double omega : { 0.0, 1.0, 3.0 }) {
    CHECK(estimate_spectrum(x, trapezoid_window(), 0.5, omega).value.real() ==
          doctest::Approx(c0 / (2 * pi)).epsilon(1e-13));
  }
}

TEST_CASE("spectrum is real, periodic and truncated at zero")
{
  const TimeSeries x(testing::skewed_data(300, 5));
  for (double omega : { 0.1, 1.1, 2.9 }) {
    const auto a = estimate_spectrum(x, trapezoid_window(), 7.0, omega);
    CHECK(std::abs(a.value.imag()) < 1e-10);
    CHECK(a.value.real() >= 0.0);
    const auto b = estimate_spectrum(x, trapezoid_window(), 7.0, omega + 2 * pi);
    CHECK(close(a.value, b.value, 1e-12));
  }
  // flat-top estimates of short white noise dip below zero somewhere
  bool clamped = false;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const TimeSeries y(testing::normal_data(20, seed));
    for (int k = 0; k < 60; ++k) {
      SpectrumOptions keep;
      keep.truncate_negative = false;
      const double omega = -pi + k * (2 * pi / 60);
      const auto raw = estimate_spectrum(y, trapezoid_window(), 6.0, omega, keep);
      const auto cut = estimate_spectrum(y, trapezoid_window(), 6.0, omega);
      CHECK(cut.value.real() >= 0.0);
      if (raw.value.real() < 0.0) {
        clamped = true;
        CHECK(cut.truncated_negative);
        CHECK(cut.value.real() == 0.0);
      }
    }
  }
  CHECK(clamped);
  CHECK_THROWS_AS(estimate_spectrum(x, trapezoid_window(), 0.0, 0.0), InvalidInput);
  CHECK_THROWS_AS(estimate_spectrum(x, rpf_window(), 3.0, 0.0), InvalidInput);
}

TEST_CASE("bispectrum matches the naive full-square sum")
{
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto data = testing::skewed_data(50, 40 + seed);
    const TimeSeries x(data);
    for (const auto& w : { rpf_window(), rcf_window(), opt_window() }) {
      for (double M : { 2.0, 5.0 }) {
        for (const auto& om : { std::array<double, 2>{ 0.0, 0.0 }, { 2.0, 1.0 }, { -0.4, 2.7 } }) {
          const auto est = estimate_bispectrum(x, w, M, om);
          const auto ref = oracle::bispectrum(
            data, [&](double a, double b) { return w(a, b); }, M, om[0], om[1]);
          CHECK(close(est.value, ref, 1e-10));
        }
      }
    }
  }
}

TEST_CASE("bispectrum symmetries, conjugation and periodicity")
{
  const TimeSeries x(testing::skewed_data(200, 8));
  const BispectrumEstimator est(x, rpf_window(), 6.0);
  for (const auto& om : { std::array<double, 2>{ 0.3, 1.2 }, { 2.0, 1.0 }, { -2.2, 0.9 } }) {
    const double a = om[0], b = om[1];
    const auto f = est.value(a, b);
    CHECK(close(est.value(b, a), f, 1e-10));
    CHECK(close(est.value(a, -a - b), f, 1e-10));
    CHECK(close(est.value(-a - b, a), f, 1e-10));
    CHECK(close(est.value(b, -a - b), f, 1e-10));
    CHECK(close(est.value(-a - b, b), f, 1e-10));
    CHECK(close(est.value(-a, -b), std::conj(f), 1e-12));
    CHECK(close(est.value(a + 2 * pi, b - 2 * pi), f, 1e-11));
  }
}

TEST_CASE("restricting to the window support is exact")
{
  const auto data = testing::skewed_data(60, 17);
  const TimeSeries x(data);
  const auto w = rcf_window();
  const auto full = LagWindow::two_dimensional(
    "rcf-unbounded", [&](double a, double b) { return w(a, b); }, 0.51, std::nullopt, false);
  for (double M : { 3.0, 8.0 }) {
    const auto a = estimate_bispectrum(x, w, M, { 1.1, 0.4 });
    const auto b = estimate_bispectrum(x, full, M, { 1.1, 0.4 });
    CHECK(close(a.value, b.value, 1e-12));
  }
}

TEST_CASE("shared moment table gives the same estimates")
{
  const TimeSeries x(testing::skewed_data(400, 2));
  const ThirdMomentTable table(x, 0, 399);
  for (const auto& w : { rpf_window(), opt_window() }) {
    for (double M : { 1.0, 4.0 }) {
      const BispectrumEstimator direct(x, w, M);
      const BispectrumEstimator shared(table, BispectrumWeights::shared(w, M, x.length()));
      CHECK(close(direct.value(2.0, 1.0), shared.value(2.0, 1.0), 1e-12));
      CHECK(close(direct.value(0.0, 0.0), shared.value(0.0, 0.0), 1e-12));
    }
  }
  const ThirdMomentTable narrow(x, 0, 2);
  CHECK_THROWS_AS(BispectrumEstimator(narrow, BispectrumWeights::shared(rpf_window(), 8.0, 400)),
                  InvalidInput);
}

TEST_CASE("bispectrum derivatives match finite differences")
{
  const auto data = testing::skewed_data(80, 23);
  const TimeSeries x(data);
  const BispectrumEstimator est(x, rpf_window(), 4.0);
  const double h = 1e-3;
  const std::array<double, 2> om = { 0.9, 0.4 };
  for (int i = 1; i <= 2; ++i) {
    for (int j = 1; j <= 2; ++j) {
      const double ei[2] = { i == 1 ? h : 0.0, i == 2 ? h : 0.0 };
      const double ej[2] = { j == 1 ? h : 0.0, j == 2 ? h : 0.0 };
      const auto fd = (est.value(om[0] + ei[0] + ej[0], om[1] + ei[1] + ej[1]) -
                       est.value(om[0] + ei[0] - ej[0], om[1] + ei[1] - ej[1]) -
                       est.value(om[0] - ei[0] + ej[0], om[1] - ei[1] + ej[1]) +
                       est.value(om[0] - ei[0] - ej[0], om[1] - ei[1] - ej[1])) /
                      (4 * h * h);
      const auto an = est.partial(om[0], om[1], i, j);
      CHECK(std::abs(fd - an) / std::abs(an) < 1e-4);
      const auto ref = oracle::bispectrum(
        data, [](double a, double b) { return lambda_rpf(a, b, 0.51); }, 4.0, om[0], om[1], i, j);
      CHECK(close(an, ref, 1e-10));
    }
  }
  CHECK(est.partial(0.3, 0.2, 1, 2) == est.partial(0.3, 0.2, 2, 1));
  const TimeSeries zero(std::vector<double>(30, 0.0));
  CHECK(estimate_bispectrum_partial(zero, rpf_window(), 3.0, { 0.5, 0.5 }, 1, 1) == 0.0);
  CHECK_THROWS_AS(est.partial(0.1, 0.1, 3, 1), InvalidInput);
}

TEST_CASE("bispectrum argument validation")
{
  const TimeSeries x(testing::skewed_data(40, 1));
  CHECK_THROWS_AS(estimate_bispectrum(x, rpf_window(), -1.0, { 0, 0 }), InvalidInput);
  CHECK_THROWS_AS(estimate_bispectrum(x, parzen_window(), 2.0, { 0, 0 }), InvalidInput);
}

TEST_CASE("bispectrum of iid chi-square data is near the skewness constant")
{
  double total = 0.0;
  const int reps = 20;
  for (int r = 0; r < reps; ++r) {
    auto data = testing::normal_data(4000, 900 + static_cast<std::uint64_t>(r));
    for (auto& v : data) {
      v = v * v;
    }
    total += std::abs(estimate_bispectrum(TimeSeries(data), rpf_window(), 1.0, { 0, 0 }).value);
  }
  CHECK(total / reps == doctest::Approx(8.0 / (4 * pi * pi)).epsilon(0.15));
}
