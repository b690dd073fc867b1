#pragma once

// Brute-force reference implementations written straight from the defining
// formulas, sharing no code with the library.

#include <boost/multiprecision/cpp_dec_float.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

//! (1/N) sum_{t=1}^{N-gamma} prod_j (x_{t-alpha+tau_j} - mean), 1-based as printed.
inline double
central_moment(const std::vector<double>& x, std::vector<long> tau)
{
  const long n = static_cast<long>(x.size());
  tau.push_back(0);
  double mean = 0.0;
  for (double v : x) {
    mean += v;
  }
  mean /= static_cast<double>(n);
  const long alpha = std::min(0L, *std::min_element(tau.begin(), tau.end()));
  const long gamma = std::max(0L, *std::max_element(tau.begin(), tau.end())) - alpha;
  double sum = 0.0;
  for (long t = 1; t <= n - gamma; ++t) {
    double prod = 1.0;
    for (long tj : tau) {
      prod *= x[static_cast<std::size_t>(t - alpha + tj - 1)] - mean;
    }
    sum += prod;
  }
  return sum / static_cast<double>(n);
}

//! (1 / 2 pi) sum_{|tau| < N} lambda(tau / M) C(tau) e^{-i tau omega}.
inline std::complex<double>
spectrum(const std::vector<double>& x, const std::function<double(double)>& lambda, double M,
         double omega)
{
  const long n = static_cast<long>(x.size());
  std::complex<double> sum = 0.0;
  for (long t = -(n - 1); t <= n - 1; ++t) {
    const double w = lambda(static_cast<double>(t) / M);
    sum += w * central_moment(x, { t }) * std::exp(std::complex<double>(0.0, -omega * t));
  }
  return sum / (2.0 * std::numbers::pi);
}

//! (1 / (2 pi)^2) sum over the full lag square, optionally weighted by the
//! derivative factor (-i tau_i)(-i tau_j).
inline std::complex<double>
bispectrum(const std::vector<double>& x, const std::function<double(double, double)>& lambda,
           double M, double w1, double w2, int di = 0, int dj = 0)
{
  const long n = static_cast<long>(x.size());
  std::complex<double> sum = 0.0;
  for (long t1 = -(n - 1); t1 <= n - 1; ++t1) {
    for (long t2 = -(n - 1); t2 <= n - 1; ++t2) {
      const double w = lambda(static_cast<double>(t1) / M, static_cast<double>(t2) / M);
      if (w == 0.0) {
        continue;
      }
      const double c = central_moment(x, { t1, t2 });
      std::complex<double> factor = 1.0;
      const std::array<long, 3> tau = { 0, t1, t2 };
      if (di > 0) {
        factor *= std::complex<double>(0.0, -static_cast<double>(tau[static_cast<std::size_t>(di)]));
      }
      if (dj > 0) {
        factor *= std::complex<double>(0.0, -static_cast<double>(tau[static_cast<std::size_t>(dj)]));
      }
      sum += factor * w * c * std::exp(std::complex<double>(0.0, -(w1 * t1 + w2 * t2)));
    }
  }
  return sum / std::pow(2.0 * std::numbers::pi, 2);
}

//! Ascending series for J_2 in 50-digit decimal arithmetic.
inline double
bessel_j2(double x)
{
  using big = boost::multiprecision::cpp_dec_float_50;
  const big half = big(x) / 2;
  const big q = half * half;
  big term = q / 2; // (x/2)^2 / (0! 2!)
  big sum = term;
  for (int m = 1; m < 400; ++m) {
    term *= -q / (big(m) * big(m + 2));
    sum += term;
    if (abs(term) < big("1e-40")) {
      break;
    }
  }
  return static_cast<double>(sum);
}

//! The first `count` points of {0 < t2 < t1} u {(1, 0)} in lexicographic order.
inline std::vector<std::array<long, 2>>
lex_points(long count)
{
  std::vector<std::array<long, 2>> out{ { 1, 0 } };
  for (long i = 2; static_cast<long>(out.size()) < count; ++i) {
    for (long j = 1; j < i && static_cast<long>(out.size()) < count; ++j) {
      out.push_back({ i, j });
    }
  }
  return out;
}

//! Every set partition of {0, ..., n-1}, by brute-force restricted growth strings.
inline std::vector<std::vector<std::vector<int>>>
set_partitions(int n)
{
  std::vector<std::vector<std::vector<int>>> out;
  std::vector<int> a(static_cast<std::size_t>(n), 0);
  std::function<void(int, int)> rec = [&](int i, int blocks) {
    if (i == n) {
      std::vector<std::vector<int>> p(static_cast<std::size_t>(blocks));
      for (int k = 0; k < n; ++k) {
        p[static_cast<std::size_t>(a[static_cast<std::size_t>(k)])].push_back(k);
      }
      out.push_back(p);
      return;
    }
    for (int b = 0; b <= blocks; ++b) {
      a[static_cast<std::size_t>(i)] = b;
      rec(i + 1, std::max(blocks, b + 1));
    }
  };
  rec(0, 0);
  return out;
}

} // namespace oracle
