#include "flattop/bessel.hpp"

#include <cmath>
#include <numbers>

namespace flattop {

namespace {

double
ascending_series(double x)
{
  const long double h = static_cast<long double>(x) / 2.0L;
  const long double h2 = h * h;
  long double term = h2 / 2.0L; // m = 0: (x/2)^2 / (0! 2!)
  long double sum = term;
  for (int m = 1; m < 80; ++m) {
    term *= -h2 / (static_cast<long double>(m) * (m + 2));
    sum += term;
    if (std::fabs(term) < 1e-22L * std::fabs(sum) + 1e-30L) {
      break;
    }
  }
  return static_cast<double>(sum);
}

// Backward recurrence J_{k-1} = (2k/x) J_k - J_{k+1}, normalized with
// J_0 + 2 sum_{k>=1} J_{2k} = 1.
double
miller(double x)
{
  int start = 2 * (static_cast<int>(x + 20.0 + 4.0 * std::sqrt(x)) / 2);
  double next = 0.0;
  double cur = 1e-300;
  double norm = 0.0;
  double j2 = 0.0;
  for (int k = start; k >= 1; --k) {
    double prev = (2.0 * k / x) * cur - next;
    next = cur;
    cur = prev; // cur = J_{k-1}
    if (k - 1 == 2) {
      j2 = cur;
    }
    if ((k - 1) % 2 == 0 && k - 1 > 0) {
      norm += 2.0 * cur;
    }
    if (std::fabs(cur) > 1e250) {
      cur *= 1e-250;
      next *= 1e-250;
      norm *= 1e-250;
      j2 *= 1e-250;
    }
  }
  norm += cur; // J_0
  return j2 / norm;
}

double
hankel_asymptotic(double x)
{
  // mu = 4 nu^2 for nu = 2
  const double mu = 16.0;
  double p = 1.0;
  double q = 0.0;
  double term = 1.0;
  double last = INFINITY;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (k * 8.0 * x);
    if (std::fabs(term) > last) {
      break;
    }
    last = std::fabs(term);
    // a_k / x^k alternates between Q (odd k) and P (even k) with signs
    // +Q, -P, -Q, +P, ...
    switch (k % 4) {
      case 1: q += term; break;
      case 2: p -= term; break;
      case 3: q -= term; break;
      case 0: p += term; break;
    }
    if (last < 1e-18) {
      break;
    }
  }
  // chi = x - 5 pi / 4
  const double c = std::cos(x);
  const double s = std::sin(x);
  const double cos_chi = -(c + s) / std::numbers::sqrt2;
  const double sin_chi = (c - s) / std::numbers::sqrt2;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * cos_chi - q * sin_chi);
}

} // namespace

double
bessel_j2(double x)
{
  const double ax = std::fabs(x); // J_2 is even
  if (ax <= 12.0) {
    return ascending_series(ax);
  }
  if (ax <= 25.0) {
    return miller(ax);
  }
  return hankel_asymptotic(ax);
}

} // namespace flattop
