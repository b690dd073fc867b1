#include "flattop/time_series.hpp"

#include "flattop/error.hpp"

#include <cmath>
#include <numeric>

namespace flattop {

TimeSeries::TimeSeries(std::vector<double> values, std::string label)
{
  channels_.push_back(std::move(values));
  labels_.push_back(std::move(label));
  length_ = channels_.front().size();
  validate();
}

TimeSeries::TimeSeries(std::vector<std::vector<double>> channels,
                       std::vector<std::string> labels)
  : channels_(std::move(channels))
  , labels_(std::move(labels))
{
  if (channels_.empty()) {
    throw InvalidInput("time series needs at least one channel");
  }
  length_ = channels_.front().size();
  if (labels_.empty()) {
    for (std::size_t a = 0; a < channels_.size(); ++a) {
      labels_.push_back("x" + std::to_string(a));
    }
  }
  if (labels_.size() != channels_.size()) {
    throw InvalidInput("channel label count does not match channel count");
  }
  validate();
}

void
TimeSeries::validate() const
{
  if (length_ == 0) {
    throw InvalidInput("time series must have at least one observation");
  }
  for (std::size_t a = 0; a < channels_.size(); ++a) {
    if (channels_[a].size() != length_) {
      throw InvalidInput("all channels must have the same length");
    }
    for (std::size_t t = 0; t < length_; ++t) {
      if (!std::isfinite(channels_[a][t])) {
        throw InvalidInput("non-finite value in channel " + labels_[a] +
                           " at row " + std::to_string(t));
      }
    }
  }
}

std::span<const double>
TimeSeries::channel(std::size_t a) const
{
  return channels_.at(a);
}

double
TimeSeries::mean(std::size_t a) const
{
  const auto& x = channels_.at(a);
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(length_);
}

std::vector<double>
TimeSeries::centered(std::size_t a) const
{
  const double m = mean(a);
  std::vector<double> y(channels_.at(a));
  for (auto& v : y) {
    v -= m;
  }
  return y;
}

TimeSeries
TimeSeries::scaled(double factor) const
{
  TimeSeries out = *this;
  for (auto& ch : out.channels_) {
    for (auto& v : ch) {
      v *= factor;
    }
  }
  out.validate();
  return out;
}

} // namespace flattop
