#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace flattop {

//! Real-valued, possibly multi-channel, finite sample. Values are stored
//! channel-major so that each channel is a contiguous span.
class TimeSeries
{
public:
  TimeSeries() = default;

  //! Single-channel series.
  explicit TimeSeries(std::vector<double> values, std::string label = "x0");

  //! Multi-channel series from one vector per channel (all of equal length).
  explicit TimeSeries(std::vector<std::vector<double>> channels,
                      std::vector<std::string> labels = {});

  std::size_t length() const { return length_; }
  std::size_t channels() const { return channels_.size(); }

  std::span<const double> channel(std::size_t a) const;
  const std::string& label(std::size_t a) const { return labels_.at(a); }

  //! Sample mean of channel `a`.
  double mean(std::size_t a) const;

  //! Channel `a` with its sample mean removed.
  std::vector<double> centered(std::size_t a) const;

  //! Copy with every value of every channel multiplied by `factor`.
  TimeSeries scaled(double factor) const;

private:
  void validate() const;

  std::vector<std::vector<double>> channels_;
  std::vector<std::string> labels_;
  std::size_t length_ = 0;
};

//! Lag vector (tau_1, ..., tau_{s-1}) with the implicit tau_s = 0.
using LagVector = std::vector<long>;

} // namespace flattop
