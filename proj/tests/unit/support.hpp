#pragma once

#include "flattop/time_series.hpp"

#include <random>
#include <vector>

namespace testing {

inline std::vector<double>
normal_data(std::size_t n, std::uint64_t seed)
{
  std::mt19937_64 g(seed);
  std::normal_distribution<double> nd;
  std::vector<double> x(n);
  for (auto& v : x) {
    v = nd(g);
  }
  return x;
}

//! Skewed data so that third-order quantities are not trivially small.
inline std::vector<double>
skewed_data(std::size_t n, std::uint64_t seed)
{
  auto x = normal_data(n, seed);
  for (auto& v : x) {
    v = v * v + 0.3 * v;
  }
  return x;
}

} // namespace testing
