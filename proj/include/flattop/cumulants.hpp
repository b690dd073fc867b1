#pragma once

#include "flattop/time_series.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace flattop {

//! Channel indices a_1, ..., a_s attached to the lag positions
//! tau_1, ..., tau_{s-1}, 0.
using ChannelTuple = std::vector<std::size_t>;

enum class CumulantEstimator
{
  central_moment, //!< mean-centred product moment (orders 2 and 3)
  partition       //!< moment-partition formula (orders 2 to 4)
};

struct CumulantValue
{
  double value = 0.0;
  int order = 0;
  LagVector lags;
  CumulantEstimator kind = CumulantEstimator::central_moment;
};

//! A set partition of {0, ..., n-1}; each block lists its element indices.
using SetPartition = std::vector<std::vector<int>>;

//! All set partitions of an n-element set, 1 <= n <= 4 (Bell numbers 1, 2,
//! 5, 15). Tables are built once and shared.
const std::vector<SetPartition>& set_partitions(int n);

//! Sample central moment
//!   (1/N) sum_{t=1}^{N-gamma} prod_j (x^{(a_j)}_{t-alpha+tau_j} - mean_j),
//! alpha = min(0, tau), gamma = max(0, tau) - alpha. Empty sums give 0.
//! `channels` must have length s = lags.size() + 1 with s in {2, 3}.
double central_moment_estimate(const TimeSeries& series,
                               const ChannelTuple& channels,
                               const LagVector& lags);

//! Single-channel shorthand (channel 0 in every position).
double central_moment_estimate(const TimeSeries& series, const LagVector& lags);

//! Central moment of already-centred single-channel data. Positions are
//! sorted before multiplying so that every lag in a symmetry orbit yields a
//! bit-identical value.
double centered_moment(std::span<const double> y, const LagVector& lags);

//! Joint cumulant through the moment-partition formula, s in {2, 3, 4}.
//! Each block mean is normalized by its number of summands,
//! N - max(block) + min(block); blocks without summands contribute 0.
double joint_cumulant_estimate(const TimeSeries& series,
                               const ChannelTuple& channels,
                               const LagVector& lags);

//! rho(tau) = C(tau) / sqrt(prod_i C_{a_i}(0)) using the central-moment
//! estimator. Throws DegenerateInput when a channel has zero variance.
double normalized_cumulant(const TimeSeries& series,
                           const ChannelTuple& channels,
                           const LagVector& lags);

double normalized_cumulant(const TimeSeries& series, const LagVector& lags);

} // namespace flattop
