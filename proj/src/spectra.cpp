#include "flattop/spectra.hpp"

#include "flattop/error.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <tuple>
#include <cmath>
#include <numbers>

namespace flattop {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

void
check_bandwidth(double M)
{
  if (!(M > 0.0) || !std::isfinite(M)) {
    throw InvalidInput("bandwidth M must be positive and finite");
  }
}

long
lag_radius(const LagWindow& window, double M, std::size_t length)
{
  const long full = static_cast<long>(length) - 1;
  if (!window.support_radius()) {
    return full;
  }
  const double r = std::floor(*window.support_radius() * M);
  return r >= static_cast<double>(full) ? full : static_cast<long>(r);
}

// e^{-i k w} for k in [-extent, extent], stored at k + extent
std::vector<std::complex<double>>
phase_table(double w, long extent)
{
  std::vector<std::complex<double>> table(static_cast<std::size_t>(2 * extent + 1));
  for (long k = 0; k <= extent; ++k) {
    const double arg = static_cast<double>(k) * w;
    const double c = std::cos(arg);
    const double s = std::sin(arg);
    table[static_cast<std::size_t>(extent + k)] = { c, -s };
    table[static_cast<std::size_t>(extent - k)] = { c, s };
  }
  return table;
}

// Distinct members of the symmetry orbit of a canonical lag (a, b).
int
orbit(int a, int b, std::array<std::array<int, 2>, 6>& out)
{
  if (a == 0) {
    out[0] = { 0, 0 };
    return 1;
  }
  if (b == 0) {
    out[0] = { a, 0 };
    out[1] = { 0, a };
    out[2] = { -a, -a };
    return 3;
  }
  if (a == b) {
    out[0] = { a, a };
    out[1] = { -a, 0 };
    out[2] = { 0, -a };
    return 3;
  }
  out[0] = { a, b };
  out[1] = { b, a };
  out[2] = { -a, b - a };
  out[3] = { b - a, -a };
  out[4] = { a - b, -b };
  out[5] = { -b, a - b };
  return 6;
}

} // namespace

double
wrap_frequency(double omega)
{
  if (!std::isfinite(omega)) {
    throw InvalidInput("frequency must be finite");
  }
  if (omega >= -std::numbers::pi && omega < std::numbers::pi) {
    return omega;
  }
  double w = std::fmod(omega + std::numbers::pi, two_pi);
  if (w < 0.0) {
    w += two_pi;
  }
  return w - std::numbers::pi;
}

// Second order -----------------------------------------------------------------

SpectrumEstimator::SpectrumEstimator(const TimeSeries& series, const LagWindow& window,
                                     double M, SpectrumOptions options)
  : bandwidth_(M)
  , window_(window.descriptor())
  , options_(options)
{
  check_bandwidth(M);
  if (window.order() != 2) {
    throw InvalidInput("spectrum estimation needs a one-dimensional window, got " +
                       window.name());
  }
  if (options.channel_a >= series.channels() || options.channel_b >= series.channels()) {
    throw InvalidInput("channel index out of range");
  }
  radius_ = lag_radius(window, M, series.length());

  const bool same = options.channel_a == options.channel_b;
  std::vector<double> y;
  if (same) {
    y = series.centered(options.channel_a);
  }
  for (long tau = -radius_; tau <= radius_; ++tau) {
    const double w = window(static_cast<double>(tau) / M);
    if (w == 0.0) {
      continue;
    }
    const double c = same ? centered_moment(y, { tau })
                          : central_moment_estimate(
                              series, { options.channel_a, options.channel_b }, { tau });
    terms_.push_back({ tau, w * c });
  }
}

SpectralEstimate
SpectrumEstimator::at(double omega) const
{
  SpectralEstimate est;
  const double w = wrap_frequency(omega);
  est.omega = { w };
  est.bandwidth = bandwidth_;
  est.window = window_;
  est.order = 2;

  std::complex<double> sum = 0.0;
  for (const auto& term : terms_) {
    const double arg = static_cast<double>(term.tau) * w;
    sum += term.coef * std::complex<double>(std::cos(arg), -std::sin(arg));
  }
  sum /= two_pi;

  if (options_.channel_a == options_.channel_b) {
    double re = sum.real();
    if (re < 0.0 && options_.truncate_negative) {
      re = 0.0;
      est.truncated_negative = true;
    }
    est.value = re;
  } else {
    est.value = sum;
  }
  return est;
}

SpectralEstimate
estimate_spectrum(const TimeSeries& series, const LagWindow& window, double M,
                  double omega, SpectrumOptions options)
{
  return SpectrumEstimator(series, window, M, options).at(omega);
}

// Third order ------------------------------------------------------------------

BispectrumWeights::BispectrumWeights(const LagWindow& window, double M,
                                     std::size_t length)
  : by_orbit_(window.lag_symmetric())
  , bandwidth_(M)
  , length_(length)
  , window_(window.descriptor())
{
  check_bandwidth(M);
  if (window.order() != 3) {
    throw InvalidInput("bispectrum estimation needs a two-dimensional window, got " +
                       window.name());
  }
  if (length == 0) {
    throw InvalidInput("series length must be positive");
  }
  radius_ = lag_radius(window, M, length);
  const long n = static_cast<long>(length);

  if (by_orbit_) {
    // orbit members of (a, b) all have sup norm <= a, and C vanishes once a >= N
    for (long a = 0; a <= radius_; ++a) {
      for (long b = 0; b <= a; ++b) {
        const double w = window(static_cast<double>(a) / M, static_cast<double>(b) / M);
        if (w != 0.0) {
          entries_.push_back({ static_cast<int>(a), static_cast<int>(b), w });
        }
      }
    }
    return;
  }
  for (long t1 = -radius_; t1 <= radius_; ++t1) {
    for (long t2 = -radius_; t2 <= radius_; ++t2) {
      const long gamma = std::max({ 0L, t1, t2 }) - std::min({ 0L, t1, t2 });
      if (gamma >= n) {
        continue;
      }
      const double w = window(static_cast<double>(t1) / M, static_cast<double>(t2) / M);
      if (w != 0.0) {
        entries_.push_back({ static_cast<int>(t1), static_cast<int>(t2), w });
      }
    }
  }
}

std::shared_ptr<const BispectrumWeights>
BispectrumWeights::shared(const LagWindow& window, double M, std::size_t length)
{
  using Key = std::tuple<std::string, double, std::size_t>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const BispectrumWeights>> cache;
  static std::size_t cached_entries = 0;
  constexpr std::size_t max_entries = 1 << 24;

  Key key{ window.descriptor(), M, length };
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) {
      return it->second;
    }
  }
  auto weights = std::make_shared<const BispectrumWeights>(window, M, length);
  std::lock_guard<std::mutex> lock(mutex);
  if (cache.size() >= 64 || cached_entries + weights->entries().size() > max_entries) {
    cache.clear();
    cached_entries = 0;
  }
  auto [it, inserted] = cache.emplace(key, weights);
  if (inserted) {
    cached_entries += weights->entries().size();
  }
  return it->second;
}

BispectrumEstimator::BispectrumEstimator(const TimeSeries& series,
                                         const LagWindow& window, double M,
                                         ChannelTuple channels)
  : BispectrumEstimator(series,
                        std::make_shared<const BispectrumWeights>(window, M,
                                                                  series.length()),
                        std::move(channels))
{
}

BispectrumEstimator::BispectrumEstimator(const TimeSeries& series,
                                         std::shared_ptr<const BispectrumWeights> weights,
                                         ChannelTuple channels)
  : weights_(std::move(weights))
{
  if (!weights_) {
    throw InvalidInput("missing lag weights");
  }
  if (weights_->length() != series.length()) {
    throw InvalidInput("lag weights were tabulated for a different series length");
  }
  if (channels.size() != 3) {
    throw InvalidInput("bispectrum needs a channel triple");
  }
  for (auto a : channels) {
    if (a >= series.channels()) {
      throw InvalidInput("channel index out of range");
    }
  }
  window_symmetric_ = weights_->by_orbit();
  build(series, channels);
}

ThirdMomentTable::ThirdMomentTable(const TimeSeries& series, std::size_t channel,
                                   long radius)
  : length_(series.length())
{
  const long n = static_cast<long>(length_);
  if (radius < 0) {
    throw InvalidInput("moment table radius must be non-negative");
  }
  radius_ = std::min(radius, n - 1);
  const std::vector<double> y = series.centered(channel);
  std::vector<double> z(static_cast<std::size_t>(n));
  values_.assign(static_cast<std::size_t>((radius_ + 1) * (radius_ + 2) / 2), 0.0);
  for (long a = 0; a <= radius_; ++a) {
    for (long t = 0; t < n - a; ++t) {
      z[static_cast<std::size_t>(t)] =
        y[static_cast<std::size_t>(t)] * y[static_cast<std::size_t>(t + a)];
    }
    for (long b = 0; b <= a; ++b) {
      double sum = 0.0;
      const double* zp = z.data();
      const double* yp = y.data() + b;
      for (long t = 0; t < n - a; ++t) {
        sum += zp[t] * yp[t];
      }
      values_[static_cast<std::size_t>(a * (a + 1) / 2 + b)] = sum / static_cast<double>(n);
    }
  }
}

BispectrumEstimator::BispectrumEstimator(const ThirdMomentTable& moments,
                                         std::shared_ptr<const BispectrumWeights> weights)
  : weights_(std::move(weights))
{
  if (!weights_) {
    throw InvalidInput("missing lag weights");
  }
  if (weights_->length() != moments.length()) {
    throw InvalidInput("lag weights were tabulated for a different series length");
  }
  if (!weights_->by_orbit()) {
    throw InvalidInput("moment tables need a lag-symmetric window");
  }
  const long n = static_cast<long>(moments.length());
  if (moments.radius() < std::min(weights_->radius(), n - 1)) {
    throw InvalidInput("moment table does not cover the window support");
  }
  for (const auto& e : weights_->entries()) {
    if (e.t1 >= n) {
      continue;
    }
    const double c = moments(e.t1, e.t2);
    if (c != 0.0) {
      terms_.push_back({ e.t1, e.t2, e.weight * c });
      extent_ = std::max<long>(extent_, e.t1);
    }
  }
}

void
BispectrumEstimator::build(const TimeSeries& series, const ChannelTuple& channels)
{
  const long n = static_cast<long>(series.length());
  const double inv_n = 1.0 / static_cast<double>(n);
  const bool single = channels[0] == channels[1] && channels[1] == channels[2];

  if (single && weights_->by_orbit()) {
    // canonical lags arrive sorted by t1; C(a, b) = (1/N) sum (y_t y_{t+a}) y_{t+b}
    const std::vector<double> y = series.centered(channels[0]);
    std::vector<double> z(static_cast<std::size_t>(n));
    long current = -1;
    for (const auto& e : weights_->entries()) {
      const long a = e.t1;
      const long b = e.t2;
      if (a >= n) {
        continue;
      }
      if (a != current) {
        for (long t = 0; t < n - a; ++t) {
          z[static_cast<std::size_t>(t)] = y[static_cast<std::size_t>(t)] *
                                           y[static_cast<std::size_t>(t + a)];
        }
        current = a;
      }
      double sum = 0.0;
      const double* zp = z.data();
      const double* yp = y.data() + b;
      for (long t = 0; t < n - a; ++t) {
        sum += zp[t] * yp[t];
      }
      const double c = sum / static_cast<double>(n);
      if (c != 0.0) {
        terms_.push_back({ e.t1, e.t2, e.weight * c });
        extent_ = std::max(extent_, a);
      }
    }
    return;
  }

  // general path: one term per lag, cumulants straight from the definition
  std::array<std::vector<double>, 3> centered;
  for (std::size_t j = 0; j < 3; ++j) {
    centered[j] = series.centered(channels[j]);
  }
  auto moment = [&](long t1, long t2) {
    const long lo = std::min({ 0L, t1, t2 });
    const long gamma = std::max({ 0L, t1, t2 }) - lo;
    if (n - gamma < 1) {
      return 0.0;
    }
    const std::array<long, 3> off = { t1 - lo, t2 - lo, -lo };
    double sum = 0.0;
    for (long t = 0; t < n - gamma; ++t) {
      sum += centered[0][static_cast<std::size_t>(t + off[0])] *
             centered[1][static_cast<std::size_t>(t + off[1])] *
             centered[2][static_cast<std::size_t>(t + off[2])];
    }
    return sum * inv_n;
  };
  auto add = [&](int t1, int t2, double w) {
    const double c = moment(t1, t2);
    if (c != 0.0) {
      terms_.push_back({ t1, t2, w * c });
      extent_ = std::max<long>(extent_, std::max(std::abs(t1), std::abs(t2)));
    }
  };

  std::array<std::array<int, 2>, 6> members{};
  for (const auto& e : weights_->entries()) {
    if (weights_->by_orbit()) {
      const int k = orbit(e.t1, e.t2, members);
      for (int m = 0; m < k; ++m) {
        add(members[static_cast<std::size_t>(m)][0],
            members[static_cast<std::size_t>(m)][1], e.weight);
      }
    } else {
      add(e.t1, e.t2, e.weight);
    }
  }
  window_symmetric_ = window_symmetric_ && single;
  orbit_terms_ = false;
}

BispectrumDerivatives
BispectrumEstimator::sum(double w1, double w2, bool with_derivatives) const
{
  const auto e1 = phase_table(w1, extent_);
  const auto e2 = phase_table(w2, extent_);
  const auto at = [&](const std::vector<std::complex<double>>& t, int k) {
    return t[static_cast<std::size_t>(k + extent_)];
  };

  BispectrumDerivatives acc{};
  std::array<std::array<int, 2>, 6> members{};
  for (const auto& term : terms_) {
    int count = 1;
    if (orbit_terms_) {
      count = orbit(term.t1, term.t2, members);
    } else {
      members[0] = { term.t1, term.t2 };
    }
    std::complex<double> s0 = 0.0;
    std::complex<double> s11 = 0.0;
    std::complex<double> s12 = 0.0;
    std::complex<double> s22 = 0.0;
    for (int m = 0; m < count; ++m) {
      const int x = members[static_cast<std::size_t>(m)][0];
      const int y = members[static_cast<std::size_t>(m)][1];
      const std::complex<double> e = at(e1, x) * at(e2, y);
      s0 += e;
      if (with_derivatives) {
        const double dx = x;
        const double dy = y;
        s11 += (dx * dx) * e;
        s12 += (dx * dy) * e;
        s22 += (dy * dy) * e;
      }
    }
    acc.value += term.coef * s0;
    if (with_derivatives) {
      acc.d11 += term.coef * s11;
      acc.d12 += term.coef * s12;
      acc.d22 += term.coef * s22;
    }
  }
  const double scale = 1.0 / (two_pi * two_pi);
  acc.value *= scale;
  // two derivatives of e^{-i tau . omega} bring down (-i tau_i)(-i tau_j) = -tau_i tau_j
  acc.d11 *= -scale;
  acc.d12 *= -scale;
  acc.d22 *= -scale;
  return acc;
}

std::complex<double>
BispectrumEstimator::value(double w1, double w2) const
{
  return sum(wrap_frequency(w1), wrap_frequency(w2), false).value;
}

BispectrumDerivatives
BispectrumEstimator::derivatives(double w1, double w2) const
{
  return sum(wrap_frequency(w1), wrap_frequency(w2), true);
}

std::complex<double>
BispectrumEstimator::partial(double w1, double w2, int i, int j) const
{
  if ((i != 1 && i != 2) || (j != 1 && j != 2)) {
    throw InvalidInput("partial derivative indices must be 1 or 2");
  }
  const auto d = derivatives(w1, w2);
  if (i == 1 && j == 1) {
    return d.d11;
  }
  if (i == 2 && j == 2) {
    return d.d22;
  }
  return d.d12;
}

SpectralEstimate
BispectrumEstimator::at(double w1, double w2) const
{
  SpectralEstimate est;
  est.omega = { wrap_frequency(w1), wrap_frequency(w2) };
  est.value = sum(est.omega[0], est.omega[1], false).value;
  est.bandwidth = weights_->bandwidth();
  est.window = weights_->window_name();
  est.order = 3;
  est.window_symmetric = window_symmetric_;
  return est;
}

SpectralEstimate
estimate_bispectrum(const TimeSeries& series, const LagWindow& window, double M,
                    std::array<double, 2> omega, ChannelTuple channels)
{
  return BispectrumEstimator(series, window, M, std::move(channels))
    .at(omega[0], omega[1]);
}

std::complex<double>
estimate_bispectrum_partial(const TimeSeries& series, const LagWindow& window, double M,
                            std::array<double, 2> omega, int i, int j)
{
  return BispectrumEstimator(series, window, M).partial(omega[0], omega[1], i, j);
}

} // namespace flattop
