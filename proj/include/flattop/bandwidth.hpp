#pragma once

#include "flattop/cumulants.hpp"
#include "flattop/spectra.hpp"
#include "flattop/time_series.hpp"
#include "flattop/windows.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace flattop {

enum class LagNorm
{
  euclidean,
  sup
};

enum class LogBase
{
  base10,
  natural
};

//! Half-open annulus B_{x,y} = { tau : x < ||tau|| <= y } of integer lags.
struct AnnulusSpec
{
  double inner = 0.0;
  double outer = 1.0;
  LagNorm norm = LagNorm::euclidean;
};

//! Integer lags of dimension 1 or 2 inside the annulus.
std::vector<LagVector> annulus_lags(int dimension, const AnnulusSpec& spec);

struct BandwidthSelection
{
  double M_hat = 0.0;
  long m_hat = 0;
  std::string rule;
  std::vector<double> thresholds; //!< absolute thresholds on |rho|
  struct Inspected
  {
    LagVector tau;
    double rho;
    double threshold;
  };
  std::vector<Inspected> trace;
  bool cap_hit = false;

  //! floor(M_hat), at least 1: the integer bandwidth used downstream
  //! (c = 0.51 turns i / c into 1, 3, 5, ...).
  long integer_bandwidth() const;
};

// General rule ---------------------------------------------------------------

struct GeneralRuleConfig
{
  int order = 2;
  ChannelTuple channels; //!< empty: channel 0 in every position
  double k = 2.0;
  int a_N = 5;
  double b = default_flat_top_c;
  LagNorm norm = LagNorm::euclidean;
  LogBase log_base = LogBase::base10;
};

//! Smallest m >= 1 with |rho(tau)| < k sqrt(log N / N) on B_{m, m + a_N};
//! M = m / b. The search stops at m = N / 4 and flags `cap_hit`.
BandwidthSelection select_bandwidth_general(const TimeSeries& series,
                                            const GeneralRuleConfig& config);

// Bispectrum rule --------------------------------------------------------------

//! n-th point of {0 < tau_2 < tau_1} u {(1, 0)} in lexicographic order.
std::array<long, 2> lex_point(long n);

struct BispectrumRuleConfig
{
  double k1 = 2.0; //!< threshold constant at P_1 = (1, 0)
  double k2 = 2.0; //!< threshold constant at interior points
  int L = 5;
  double b = default_flat_top_c;
  LogBase log_base = LogBase::natural;
};

//! Smallest m >= 1 with |rho(P_{m+l})| < k~ sqrt(log N / N) for l = 1..L,
//! where k~ = k1 at P_1 and k2 elsewhere; M = (first coordinate of P_m) / b.
BandwidthSelection select_bandwidth_bispectrum(const TimeSeries& series,
                                               const BispectrumRuleConfig& config);

// Block bootstrap ----------------------------------------------------------------

struct BootstrapConfig
{
  LagVector tau0 = { 3 };
  ChannelTuple channels; //!< empty: channel 0 in every position
  long block_length = 0; //!< 0: ceil(N^{1/3})
  int replicates = 500;
  std::uint64_t seed = 20240601;
  unsigned threads = 1;
};

struct BootstrapThreshold
{
  double sigma_hat = 0.0; //!< sqrt(N) * sd of bootstrap rho(tau0)
  double k = 0.0;         //!< 2 sigma_hat
  long block_length = 0;
};

//! Circular block bootstrap of rho(tau0).
BootstrapThreshold bootstrap_threshold(const TimeSeries& series,
                                       const BootstrapConfig& config);

//! Default interior / boundary calibration lags for the bispectrum rule.
inline const LagVector bispectrum_k2_lag = { 6, 3 };
inline const LagVector bispectrum_k1_lag = { 3, 0 };

// Plug-in rule -------------------------------------------------------------------

//! ||lambda||_{L2} and d^2 lambda / d tau_1^2 at the origin.
struct WindowConstants
{
  double l2_norm = 0.0;
  double curvature = 0.0;
};

//! Numerical constants: central differences (h = 1e-4) for the curvature
//! and composite 2-D Simpson on [-R, R]^2 for the norm, R = min(support, 40).
//! Results are cached per window descriptor.
WindowConstants window_constants(const LagWindow& window);

//! { pi N curvature^2 |D f|^2 / (||lambda|| f(w1) f(w2) f(w1 + w2)) }^{1/6}.
double plugin_formula(double N, const WindowConstants& constants,
                      double spectral_product, double derivative_abs);

enum class PilotKind
{
  flat_top,    //!< trapezoid spectrum + rpf bispectrum, data-driven bandwidths
  second_order //!< Parzen at floor(N^{1/5}) + lambda_opt at floor(N^{1/6})
};

struct PluginConfig
{
  double c = default_flat_top_c;
  std::optional<double> k;  //!< spectrum pilot threshold; bootstrap when empty
  std::optional<double> k1; //!< bispectrum pilot thresholds; bootstrap when empty
  std::optional<double> k2;
  int a_N = 5;
  int L = 5;
  int bootstrap_replicates = 500;
  std::uint64_t seed = 20240601;
  //! Round data-driven pilot bandwidths down to integers.
  bool integer_pilot_bandwidths = true;
  double opt_tolerance = default_opt_tolerance;
};

struct PluginResult
{
  double M_hat = 0.0;
  long bandwidth = 1; //!< max(1, round(M_hat))
  bool zero_derivative = false;
  double spectrum_pilot_bandwidth = 0.0;
  double bispectrum_pilot_bandwidth = 0.0;
  std::array<double, 3> spectra{}; //!< f(w1), f(w2), f(w1 + w2)
  std::complex<double> derivative_combination; //!< (d11 - d12 + d22) f
};

PluginResult plugin_bandwidth(const LagWindow& window, const TimeSeries& series,
                              std::array<double, 2> omega, PilotKind pilot,
                              const PluginConfig& config = {});

//! Several frequencies sharing one set of pilot estimates. `moments`, when
//! given, supplies the third moments of channel 0 for the bispectrum pilot.
std::vector<PluginResult> plugin_bandwidths(const LagWindow& window,
                                            const TimeSeries& series,
                                            const std::vector<std::array<double, 2>>& omegas,
                                            PilotKind pilot,
                                            const PluginConfig& config = {},
                                            const ThirdMomentTable* moments = nullptr);

} // namespace flattop
