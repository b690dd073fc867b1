#pragma once

#include "flattop/cumulants.hpp"
#include "flattop/time_series.hpp"
#include "flattop/windows.hpp"

#include <array>
#include <complex>
#include <memory>
#include <string>
#include <vector>

namespace flattop {

//! Map a frequency into [-pi, pi).
double wrap_frequency(double omega);

struct SpectralEstimate
{
  std::complex<double> value;
  std::vector<double> omega; //!< wrapped into [-pi, pi)
  double bandwidth = 0.0;
  std::string window;
  int order = 2;
  bool truncated_negative = false; //!< order 2 only: negative estimate clamped to 0
  bool window_symmetric = true;    //!< order 3: window certified lag-symmetric
};

// Second order -----------------------------------------------------------------

struct SpectrumOptions
{
  std::size_t channel_a = 0;
  std::size_t channel_b = 0;
  //! Clamp negative auto-spectrum estimates to zero.
  bool truncate_negative = true;
};

//! Lag-window spectrum estimator; sample autocovariances over the window
//! support are computed once and reused for every frequency.
class SpectrumEstimator
{
public:
  SpectrumEstimator(const TimeSeries& series, const LagWindow& window, double M,
                    SpectrumOptions options = {});

  SpectralEstimate at(double omega) const;

  //! Largest |tau| that carries weight.
  long radius() const { return radius_; }

private:
  struct Term
  {
    long tau;
    double coef; // lambda(tau / M) * C(tau)
  };
  std::vector<Term> terms_;
  long radius_ = 0;
  double bandwidth_;
  std::string window_;
  SpectrumOptions options_;
};

//! (1 / 2 pi) sum_{|tau| < N} lambda(tau / M) C(tau) e^{-i tau omega}.
SpectralEstimate estimate_spectrum(const TimeSeries& series, const LagWindow& window,
                                   double M, double omega, SpectrumOptions options = {});

// Third order ------------------------------------------------------------------

//! lambda(tau / M) tabulated over every lag an order-3 estimate can use for
//! a series of the given length. For lag-symmetric windows only canonical
//! lags 0 <= tau_2 <= tau_1 are stored; each stands for its symmetry orbit.
//! Depends only on (window, M, N), so simulation studies share one table.
class BispectrumWeights
{
public:
  BispectrumWeights(const LagWindow& window, double M, std::size_t length);

  //! Process-wide cache keyed by (window descriptor, M, length).
  static std::shared_ptr<const BispectrumWeights> shared(const LagWindow& window,
                                                         double M, std::size_t length);

  struct Entry
  {
    int t1;
    int t2;
    double weight;
  };

  const std::vector<Entry>& entries() const { return entries_; }
  bool by_orbit() const { return by_orbit_; }
  double bandwidth() const { return bandwidth_; }
  std::size_t length() const { return length_; }
  const std::string& window_name() const { return window_; }
  long radius() const { return radius_; }

private:
  std::vector<Entry> entries_;
  bool by_orbit_ = true;
  double bandwidth_;
  std::size_t length_;
  std::string window_;
  long radius_ = 0;
};

//! Third central moments C(a, b), 0 <= b <= a <= radius, of one channel.
//! Independent of window and bandwidth, so several estimates of the same
//! series can share it.
class ThirdMomentTable
{
public:
  ThirdMomentTable(const TimeSeries& series, std::size_t channel, long radius);

  double operator()(long a, long b) const
  {
    return values_[static_cast<std::size_t>(a * (a + 1) / 2 + b)];
  }
  long radius() const { return radius_; }
  std::size_t length() const { return length_; }

private:
  std::vector<double> values_;
  long radius_ = 0;
  std::size_t length_ = 0;
};

//! Value and second partial derivatives of the bispectrum estimate.
struct BispectrumDerivatives
{
  std::complex<double> value;
  std::complex<double> d11;
  std::complex<double> d12;
  std::complex<double> d22;
};

class BispectrumEstimator
{
public:
  BispectrumEstimator(const TimeSeries& series, const LagWindow& window, double M,
                      ChannelTuple channels = { 0, 0, 0 });

  BispectrumEstimator(const TimeSeries& series,
                      std::shared_ptr<const BispectrumWeights> weights,
                      ChannelTuple channels = { 0, 0, 0 });

  //! Single-channel estimate from precomputed moments; the table must
  //! cover the weight radius (or the whole series).
  BispectrumEstimator(const ThirdMomentTable& moments,
                      std::shared_ptr<const BispectrumWeights> weights);

  std::complex<double> value(double w1, double w2) const;

  //! d^2 f / (d omega_i d omega_j), i, j in {1, 2}.
  std::complex<double> partial(double w1, double w2, int i, int j) const;

  BispectrumDerivatives derivatives(double w1, double w2) const;

  SpectralEstimate at(double w1, double w2) const;

  //! Number of lag terms (orbit representatives when by orbit) kept.
  std::size_t terms() const { return terms_.size(); }

private:
  struct Term
  {
    int t1;
    int t2;
    double coef; // lambda(tau / M) * C(tau)
  };

  void build(const TimeSeries& series, const ChannelTuple& channels);
  BispectrumDerivatives sum(double w1, double w2, bool with_derivatives) const;

  std::shared_ptr<const BispectrumWeights> weights_;
  std::vector<Term> terms_;
  long extent_ = 0; // max |coordinate| over all lags in the expanded sum
  bool orbit_terms_ = true; // each term stands for its symmetry orbit
  bool window_symmetric_ = true;
};

//! (1 / (2 pi)^2) sum lambda(tau / M) C(tau1, tau2) e^{-i (tau1 w1 + tau2 w2)}.
SpectralEstimate estimate_bispectrum(const TimeSeries& series, const LagWindow& window,
                                     double M, std::array<double, 2> omega,
                                     ChannelTuple channels = { 0, 0, 0 });

//! Second partial derivative of the bispectrum estimate,
//! -(1 / (2 pi)^2) sum tau_i tau_j lambda(tau / M) C(tau) e^{-i tau . omega}.
std::complex<double> estimate_bispectrum_partial(const TimeSeries& series,
                                                 const LagWindow& window, double M,
                                                 std::array<double, 2> omega, int i,
                                                 int j);

} // namespace flattop
