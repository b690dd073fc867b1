#include "flattop/bandwidth.hpp"

#include "flattop/error.hpp"
#include "flattop/parallel.hpp"
#include "flattop/random.hpp"
#include "flattop/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>

namespace flattop {

namespace {

double
log_in(LogBase base, double x)
{
  return base == LogBase::base10 ? std::log10(x) : std::log(x);
}

// rho(tau) for one series and channel tuple, memoized by lag.
class RhoTable
{
public:
  RhoTable(const TimeSeries& series, ChannelTuple channels, int order)
    : series_(series)
    , channels_(std::move(channels))
  {
    if (channels_.empty()) {
      channels_.assign(static_cast<std::size_t>(order), 0);
    }
    if (channels_.size() != static_cast<std::size_t>(order)) {
      throw InvalidInput("channel tuple length does not match order");
    }
    single_ = std::all_of(channels_.begin(), channels_.end(),
                          [&](std::size_t a) { return a == channels_.front(); });
    // throws on a zero-variance channel
    (void)normalized_cumulant(series_, channels_, LagVector(static_cast<std::size_t>(order - 1), 0));
    double denom = 1.0;
    for (auto a : channels_) {
      denom *= central_moment_estimate(series_, { a, a }, { 0 });
    }
    scale_ = std::sqrt(denom);
    if (single_) {
      centered_ = series_.centered(channels_.front());
    }
  }

  double operator()(const LagVector& tau)
  {
    auto it = memo_.find(tau);
    if (it != memo_.end()) {
      return it->second;
    }
    const double c = single_ ? centered_moment(centered_, tau)
                             : central_moment_estimate(series_, channels_, tau);
    const double rho = c / scale_;
    memo_.emplace(tau, rho);
    return rho;
  }

private:
  const TimeSeries& series_;
  ChannelTuple channels_;
  bool single_ = true;
  std::vector<double> centered_;
  double scale_ = 1.0;
  std::map<LagVector, double> memo_;
};

} // namespace

long
BandwidthSelection::integer_bandwidth() const
{
  // tolerate i / b landing a hair below an integer
  const double f = std::floor(M_hat + 1e-9);
  return std::max(1L, static_cast<long>(f));
}

std::vector<LagVector>
annulus_lags(int dimension, const AnnulusSpec& spec)
{
  if (!(spec.inner >= 0.0 && spec.outer > spec.inner)) {
    throw InvalidInput("annulus needs 0 <= inner < outer");
  }
  const long r = static_cast<long>(std::floor(spec.outer));
  std::vector<LagVector> out;
  auto inside = [&](long t1, long t2) {
    if (spec.norm == LagNorm::sup) {
      const double n = static_cast<double>(std::max(std::abs(t1), std::abs(t2)));
      return spec.inner < n && n <= spec.outer;
    }
    const double sq = static_cast<double>(t1 * t1 + t2 * t2);
    return spec.inner * spec.inner < sq && sq <= spec.outer * spec.outer;
  };
  if (dimension == 1) {
    for (long t = -r; t <= r; ++t) {
      if (inside(t, 0)) {
        out.push_back({ t });
      }
    }
  } else if (dimension == 2) {
    for (long t1 = -r; t1 <= r; ++t1) {
      for (long t2 = -r; t2 <= r; ++t2) {
        if (inside(t1, t2)) {
          out.push_back({ t1, t2 });
        }
      }
    }
  } else {
    throw InvalidInput("annulus dimension must be 1 or 2");
  }
  return out;
}

BandwidthSelection
select_bandwidth_general(const TimeSeries& series, const GeneralRuleConfig& config)
{
  if (config.order != 2 && config.order != 3) {
    throw InvalidInput("general bandwidth rule supports orders 2 and 3");
  }
  if (!(config.k > 0.0)) {
    throw InvalidInput("threshold constant k must be positive");
  }
  if (config.a_N < 1) {
    throw InvalidInput("a_N must be at least 1");
  }
  if (!(config.b > 0.0 && config.b <= 1.0)) {
    throw InvalidInput("flat-top radius b must lie in (0, 1]");
  }
  RhoTable rho(series, config.channels, config.order);

  const double n = static_cast<double>(series.length());
  const double threshold = config.k * std::sqrt(log_in(config.log_base, n) / n);

  BandwidthSelection sel;
  sel.rule = "general";
  sel.thresholds = { threshold };
  const long cap = std::max(1L, static_cast<long>(series.length()) / 4);

  for (long m = 1; m <= cap; ++m) {
    const auto lags = annulus_lags(
      config.order - 1,
      { static_cast<double>(m), static_cast<double>(m + config.a_N), config.norm });
    bool ok = true;
    for (const auto& tau : lags) {
      const double r = rho(tau);
      if (!(std::abs(r) < threshold)) {
        sel.trace.push_back({ tau, r, threshold });
        ok = false;
        break;
      }
    }
    if (ok) {
      for (const auto& tau : lags) {
        sel.trace.push_back({ tau, rho(tau), threshold });
      }
      sel.m_hat = m;
      sel.M_hat = static_cast<double>(m) / config.b;
      return sel;
    }
  }
  sel.cap_hit = true;
  sel.m_hat = cap;
  sel.M_hat = static_cast<double>(cap) / config.b;
  return sel;
}

std::array<long, 2>
lex_point(long n)
{
  if (n < 1) {
    throw InvalidInput("lexicographic index must be at least 1");
  }
  if (n == 1) {
    return { 1, 0 };
  }
  // i = floor(3/2 + sqrt(2n - 2)), i.e. the largest i with (2i - 3)^2 <= 8(n - 1)
  const long target = 8 * (n - 1);
  long i = static_cast<long>(std::floor(1.5 + std::sqrt(2.0 * static_cast<double>(n - 1))));
  while (i > 2 && (2 * i - 3) * (2 * i - 3) > target) {
    --i;
  }
  while ((2 * i - 1) * (2 * i - 1) <= target) {
    ++i;
  }
  const long j = n - (i * i - 3 * i) / 2 - 2;
  return { i, j };
}

BandwidthSelection
select_bandwidth_bispectrum(const TimeSeries& series, const BispectrumRuleConfig& config)
{
  if (!(config.k1 > 0.0) || !(config.k2 > 0.0)) {
    throw InvalidInput("threshold constants k1, k2 must be positive");
  }
  if (config.L < 1) {
    throw InvalidInput("L must be at least 1");
  }
  if (!(config.b > 0.0 && config.b <= 1.0)) {
    throw InvalidInput("flat-top radius b must lie in (0, 1]");
  }
  RhoTable rho(series, {}, 3);

  const double n = static_cast<double>(series.length());
  const double base = std::sqrt(log_in(config.log_base, n) / n);
  BandwidthSelection sel;
  sel.rule = "bispectrum";
  sel.thresholds = { config.k1 * base, config.k2 * base };
  const long cap_lag = std::max(1L, static_cast<long>(series.length()) / 4);

  long m = 1;
  for (; lex_point(m)[0] <= cap_lag; ++m) {
    bool ok = true;
    for (long l = 1; l <= config.L; ++l) {
      const long idx = m + l;
      const auto p = lex_point(idx);
      const double threshold = (idx == 1 ? config.k1 : config.k2) * base;
      const LagVector tau = { p[0], p[1] };
      const double r = rho(tau);
      if (!(std::abs(r) < threshold)) {
        sel.trace.push_back({ tau, r, threshold });
        ok = false;
        break;
      }
    }
    if (ok) {
      for (long l = 1; l <= config.L; ++l) {
        const long idx = m + l;
        const auto p = lex_point(idx);
        const LagVector tau = { p[0], p[1] };
        sel.trace.push_back({ tau, rho(tau), (idx == 1 ? config.k1 : config.k2) * base });
      }
      sel.m_hat = m;
      sel.M_hat = static_cast<double>(lex_point(m)[0]) / config.b;
      return sel;
    }
  }
  sel.cap_hit = true;
  sel.m_hat = m - 1;
  sel.M_hat = static_cast<double>(lex_point(std::max(1L, m - 1))[0]) / config.b;
  return sel;
}

BootstrapThreshold
bootstrap_threshold(const TimeSeries& series, const BootstrapConfig& config)
{
  const long n = static_cast<long>(series.length());
  if (config.replicates < 100) {
    throw InvalidInput("bootstrap needs at least 100 replicates");
  }
  if (config.tau0.empty() || config.tau0.size() > 2) {
    throw InvalidInput("bootstrap lag must have length 1 or 2");
  }
  long block = config.block_length;
  if (block == 0) {
    block = static_cast<long>(std::ceil(std::cbrt(static_cast<double>(n)) - 1e-12));
  }
  if (block < 1) {
    throw InvalidInput("block length must be at least 1");
  }
  if (n < 2 * block) {
    throw InvalidInput("series of length " + std::to_string(n) +
                       " is shorter than two blocks of length " + std::to_string(block));
  }
  ChannelTuple channels = config.channels;
  if (channels.empty()) {
    channels.assign(config.tau0.size() + 1, 0);
  }
  // surface degenerate input before resampling
  (void)normalized_cumulant(series, channels, config.tau0);

  const std::size_t r = series.channels();
  std::vector<double> stats(static_cast<std::size_t>(config.replicates));
  parallel_for(stats.size(), config.threads, [&](std::size_t b) {
    auto engine = make_engine(config.seed, 0xb007, b);
    std::uniform_int_distribution<long> start(0, n - 1);
    std::vector<std::vector<double>> data(r, std::vector<double>(static_cast<std::size_t>(n)));
    long t = 0;
    while (t < n) {
      const long s = start(engine);
      for (long k = 0; k < block && t < n; ++k, ++t) {
        const auto src = static_cast<std::size_t>((s + k) % n);
        for (std::size_t a = 0; a < r; ++a) {
          data[a][static_cast<std::size_t>(t)] = series.channel(a)[src];
        }
      }
    }
    TimeSeries replicate(std::move(data));
    stats[b] = normalized_cumulant(replicate, channels, config.tau0);
  });

  const double mean =
    std::accumulate(stats.begin(), stats.end(), 0.0) / static_cast<double>(stats.size());
  double ss = 0.0;
  for (double v : stats) {
    ss += (v - mean) * (v - mean);
  }
  const double sd = std::sqrt(ss / static_cast<double>(stats.size() - 1));

  BootstrapThreshold out;
  out.sigma_hat = std::sqrt(static_cast<double>(n)) * sd;
  out.k = 2.0 * out.sigma_hat;
  out.block_length = block;
  return out;
}

// Plug-in rule -------------------------------------------------------------------

WindowConstants
window_constants(const LagWindow& window)
{
  static std::mutex mutex;
  static std::map<std::string, WindowConstants> cache;
  if (window.order() != 3) {
    throw InvalidInput("plug-in constants need a two-dimensional window");
  }
  const std::string key = window.descriptor();
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) {
      return it->second;
    }
  }

  WindowConstants out;
  const double h = 1e-4;
  out.curvature = (window(h, 0.0) - 2.0 * window(0.0, 0.0) + window(-h, 0.0)) / (h * h);

  const double radius = std::min(window.support_radius().value_or(40.0), 40.0);
  long intervals = static_cast<long>(std::ceil(2.0 * radius / 0.05));
  intervals += intervals % 2;
  const double step = 2.0 * radius / static_cast<double>(intervals);
  auto simpson_weight = [&](long i) {
    if (i == 0 || i == intervals) {
      return 1.0;
    }
    return (i % 2 == 1) ? 4.0 : 2.0;
  };
  double total = 0.0;
  for (long i = 0; i <= intervals; ++i) {
    const double x = -radius + static_cast<double>(i) * step;
    double row = 0.0;
    for (long j = 0; j <= intervals; ++j) {
      const double y = -radius + static_cast<double>(j) * step;
      const double v = window(x, y);
      row += simpson_weight(j) * v * v;
    }
    total += simpson_weight(i) * row;
  }
  out.l2_norm = std::sqrt(total * (step / 3.0) * (step / 3.0));

  std::lock_guard<std::mutex> lock(mutex);
  cache.emplace(key, out);
  return out;
}

double
plugin_formula(double N, const WindowConstants& constants, double spectral_product,
               double derivative_abs)
{
  if (!(spectral_product > 0.0)) {
    throw DegenerateInput("pilot spectral product f(w1) f(w2) f(w1 + w2) is not positive");
  }
  if (!(constants.l2_norm > 0.0)) {
    throw InvalidInput("window L2 norm must be positive");
  }
  const double brace = std::numbers::pi * N * constants.curvature * constants.curvature *
                       derivative_abs * derivative_abs /
                       (constants.l2_norm * spectral_product);
  return std::pow(brace, 1.0 / 6.0);
}

std::vector<PluginResult>
plugin_bandwidths(const LagWindow& window, const TimeSeries& series,
                  const std::vector<std::array<double, 2>>& omegas, PilotKind pilot,
                  const PluginConfig& config, const ThirdMomentTable* moments)
{
  const WindowConstants constants = window_constants(window);
  if (std::abs(constants.curvature) < 1e-8) {
    throw InvalidInput("window " + window.name() +
                       " is flat at the origin; the plug-in rule needs a second-order window");
  }
  const std::size_t n = series.length();
  const double nd = static_cast<double>(n);
  auto pilot_bandwidth = [&](double m) {
    return config.integer_pilot_bandwidths ? std::max(1.0, std::floor(m + 1e-9)) : m;
  };

  std::optional<LagWindow> spectrum_window;
  std::optional<LagWindow> bispectrum_window;
  double spectrum_m = 0.0;
  double bispectrum_m = 0.0;
  if (pilot == PilotKind::flat_top) {
    GeneralRuleConfig general;
    general.b = config.c;
    general.a_N = config.a_N;
    if (config.k) {
      general.k = *config.k;
    } else {
      BootstrapConfig boot;
      boot.tau0 = { 3 };
      boot.replicates = config.bootstrap_replicates;
      boot.seed = config.seed;
      general.k = bootstrap_threshold(series, boot).k;
    }
    spectrum_m = pilot_bandwidth(select_bandwidth_general(series, general).M_hat);
    spectrum_window = trapezoid_window(config.c);

    BispectrumRuleConfig rule;
    rule.b = config.c;
    rule.L = config.L;
    BootstrapConfig boot;
    boot.replicates = config.bootstrap_replicates;
    if (config.k1) {
      rule.k1 = *config.k1;
    } else {
      boot.tau0 = bispectrum_k1_lag;
      boot.seed = config.seed + 1;
      rule.k1 = bootstrap_threshold(series, boot).k;
    }
    if (config.k2) {
      rule.k2 = *config.k2;
    } else {
      boot.tau0 = bispectrum_k2_lag;
      boot.seed = config.seed + 2;
      rule.k2 = bootstrap_threshold(series, boot).k;
    }
    bispectrum_m = pilot_bandwidth(select_bandwidth_bispectrum(series, rule).M_hat);
    bispectrum_window = rpf_window(config.c);
  } else {
    spectrum_m = std::max(1.0, std::floor(std::pow(nd, 1.0 / 5.0) + 1e-9));
    spectrum_window = parzen_window();
    bispectrum_m = std::max(1.0, std::floor(std::pow(nd, 1.0 / 6.0) + 1e-9));
    bispectrum_window = opt_window(config.opt_tolerance);
  }

  const SpectrumEstimator spectrum(series, *spectrum_window, spectrum_m);
  auto weights = BispectrumWeights::shared(*bispectrum_window, bispectrum_m, n);
  const BispectrumEstimator bispectrum = moments != nullptr
                                           ? BispectrumEstimator(*moments, weights)
                                           : BispectrumEstimator(series, weights);

  std::vector<PluginResult> out;
  for (const auto& omega : omegas) {
    PluginResult r;
    r.spectrum_pilot_bandwidth = spectrum_m;
    r.bispectrum_pilot_bandwidth = bispectrum_m;
    r.spectra = { spectrum.at(omega[0]).value.real(), spectrum.at(omega[1]).value.real(),
                  spectrum.at(omega[0] + omega[1]).value.real() };
    const auto d = bispectrum.derivatives(omega[0], omega[1]);
    r.derivative_combination = d.d11 - d.d12 + d.d22;
    const double dabs = std::abs(r.derivative_combination);
    r.zero_derivative = dabs == 0.0;
    r.M_hat = plugin_formula(nd, constants, r.spectra[0] * r.spectra[1] * r.spectra[2], dabs);
    r.bandwidth = std::max(1L, std::lround(r.M_hat));
    out.push_back(r);
  }
  return out;
}

PluginResult
plugin_bandwidth(const LagWindow& window, const TimeSeries& series,
                 std::array<double, 2> omega, PilotKind pilot, const PluginConfig& config)
{
  return plugin_bandwidths(window, series, { omega }, pilot, config).front();
}

} // namespace flattop
