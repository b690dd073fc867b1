#include "flattop/cumulants.hpp"

#include "flattop/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace flattop {

namespace {

std::vector<SetPartition>
enumerate_partitions(int n)
{
  // restricted growth strings: label[0] = 0, label[i] <= 1 + max(label[0..i))
  std::vector<SetPartition> out;
  std::vector<int> label(static_cast<std::size_t>(n), 0);
  while (true) {
    int blocks = 1 + *std::max_element(label.begin(), label.end());
    SetPartition p(static_cast<std::size_t>(blocks));
    for (int i = 0; i < n; ++i) {
      p[static_cast<std::size_t>(label[i])].push_back(i);
    }
    out.push_back(std::move(p));

    int i = n - 1;
    for (; i > 0; --i) {
      int prefix_max = *std::max_element(label.begin(), label.begin() + i);
      if (label[i] <= prefix_max) {
        ++label[i];
        std::fill(label.begin() + i + 1, label.end(), 0);
        break;
      }
    }
    if (i == 0) {
      break;
    }
  }
  return out;
}

void
check_channels(const TimeSeries& series, const ChannelTuple& channels,
               std::size_t order)
{
  if (channels.size() != order) {
    throw InvalidInput("channel tuple length " + std::to_string(channels.size()) +
                       " does not match order " + std::to_string(order));
  }
  for (auto a : channels) {
    if (a >= series.channels()) {
      throw InvalidInput("channel index " + std::to_string(a) + " out of range");
    }
  }
}

bool
single_channel(const ChannelTuple& channels)
{
  return std::all_of(channels.begin(), channels.end(),
                     [&](std::size_t a) { return a == channels.front(); });
}

double
variance_floor(const TimeSeries& series, std::size_t a)
{
  double scale = 0.0;
  for (double v : series.channel(a)) {
    scale = std::max(scale, std::abs(v));
  }
  double tiny = 1e-12 * scale;
  return tiny * tiny;
}

} // namespace

const std::vector<SetPartition>&
set_partitions(int n)
{
  static const std::array<std::vector<SetPartition>, 4> tables = {
    enumerate_partitions(1), enumerate_partitions(2), enumerate_partitions(3),
    enumerate_partitions(4)
  };
  if (n < 1 || n > 4) {
    throw InvalidInput("set partitions are tabulated for 1 <= n <= 4");
  }
  return tables[static_cast<std::size_t>(n - 1)];
}

double
centered_moment(std::span<const double> y, const LagVector& lags)
{
  const long n = static_cast<long>(y.size());
  std::array<long, 4> off{};
  const std::size_t s = lags.size() + 1;
  if (s > off.size()) {
    throw InvalidInput("centered_moment supports orders up to 4");
  }
  long lo = 0;
  long hi = 0;
  for (std::size_t j = 0; j < lags.size(); ++j) {
    off[j] = lags[j];
    lo = std::min(lo, lags[j]);
    hi = std::max(hi, lags[j]);
  }
  off[s - 1] = 0;
  const long gamma = hi - lo;
  if (n - gamma < 1) {
    return 0.0;
  }
  for (std::size_t j = 0; j < s; ++j) {
    off[j] -= lo;
  }
  std::sort(off.begin(), off.begin() + static_cast<long>(s));

  const long count = n - gamma;
  const double* p = y.data();
  double sum = 0.0;
  if (s == 2) {
    const long d = off[1];
    for (long t = 0; t < count; ++t) {
      sum += p[t] * p[t + d];
    }
  } else if (s == 3) {
    const long mid = off[1];
    const long top = off[2];
    for (long t = 0; t < count; ++t) {
      sum += (p[t] * p[t + top]) * p[t + mid];
    }
  } else {
    for (long t = 0; t < count; ++t) {
      double prod = 1.0;
      for (std::size_t j = 0; j < s; ++j) {
        prod *= p[t + off[j]];
      }
      sum += prod;
    }
  }
  return sum / static_cast<double>(n);
}

double
central_moment_estimate(const TimeSeries& series, const ChannelTuple& channels,
                        const LagVector& lags)
{
  const std::size_t s = lags.size() + 1;
  if (s < 2 || s > 3) {
    throw InvalidInput("central moment estimator supports orders 2 and 3, got " +
                       std::to_string(s));
  }
  check_channels(series, channels, s);

  if (single_channel(channels)) {
    return centered_moment(series.centered(channels.front()), lags);
  }

  const long n = static_cast<long>(series.length());
  long lo = 0;
  long hi = 0;
  for (long tau : lags) {
    lo = std::min(lo, tau);
    hi = std::max(hi, tau);
  }
  const long gamma = hi - lo;
  if (n - gamma < 1) {
    return 0.0;
  }

  std::vector<std::vector<double>> centered;
  std::vector<long> offset;
  for (std::size_t j = 0; j < s; ++j) {
    centered.push_back(series.centered(channels[j]));
    offset.push_back((j + 1 < s ? lags[j] : 0) - lo);
  }
  double sum = 0.0;
  for (long t = 0; t < n - gamma; ++t) {
    double prod = 1.0;
    for (std::size_t j = 0; j < s; ++j) {
      prod *= centered[j][static_cast<std::size_t>(t + offset[j])];
    }
    sum += prod;
  }
  return sum / static_cast<double>(n);
}

double
central_moment_estimate(const TimeSeries& series, const LagVector& lags)
{
  return central_moment_estimate(series, ChannelTuple(lags.size() + 1, 0), lags);
}

double
joint_cumulant_estimate(const TimeSeries& series, const ChannelTuple& channels,
                        const LagVector& lags)
{
  const std::size_t s = lags.size() + 1;
  if (s < 2 || s > 4) {
    throw InvalidInput("partition cumulant estimator supports orders 2 to 4, got " +
                       std::to_string(s));
  }
  check_channels(series, channels, s);

  const long n = static_cast<long>(series.length());
  std::vector<long> pos(lags.begin(), lags.end());
  pos.push_back(0);

  auto block_mean = [&](const std::vector<int>& block) {
    long lo = pos[static_cast<std::size_t>(block.front())];
    long hi = lo;
    for (int i : block) {
      lo = std::min(lo, pos[static_cast<std::size_t>(i)]);
      hi = std::max(hi, pos[static_cast<std::size_t>(i)]);
    }
    const long count = n - hi + lo;
    if (count < 1) {
      return 0.0;
    }
    double sum = 0.0;
    for (long k = 0; k < count; ++k) {
      double prod = 1.0;
      for (int i : block) {
        auto idx = static_cast<std::size_t>(k + pos[static_cast<std::size_t>(i)] - lo);
        prod *= series.channel(channels[static_cast<std::size_t>(i)])[idx];
      }
      sum += prod;
    }
    return sum / static_cast<double>(count);
  };

  double total = 0.0;
  for (const auto& partition : set_partitions(static_cast<int>(s))) {
    const auto p = static_cast<int>(partition.size());
    double coeff = (p % 2 == 1) ? 1.0 : -1.0;
    for (int k = 2; k < p; ++k) {
      coeff *= k;
    }
    double prod = coeff;
    for (const auto& block : partition) {
      prod *= block_mean(block);
    }
    total += prod;
  }
  return total;
}

double
normalized_cumulant(const TimeSeries& series, const ChannelTuple& channels,
                    const LagVector& lags)
{
  const double c = central_moment_estimate(series, channels, lags);
  double denom = 1.0;
  for (auto a : channels) {
    const double var = central_moment_estimate(series, { a, a }, { 0 });
    if (!(var > variance_floor(series, a))) {
      throw DegenerateInput("channel " + series.label(a) +
                            " has zero variance; normalized cumulant undefined");
    }
    denom *= var;
  }
  return c / std::sqrt(denom);
}

double
normalized_cumulant(const TimeSeries& series, const LagVector& lags)
{
  return normalized_cumulant(series, ChannelTuple(lags.size() + 1, 0), lags);
}

} // namespace flattop
