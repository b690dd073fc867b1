#pragma once

#include "flattop/time_series.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace flattop {

enum class ModelKind
{
  iid_chisq1, //!< X_t = Z_t^2
  arma11,     //!< X_t = phi X_{t-1} + theta Z_{t-1} + Z_t
  garch11,    //!< X_t = sqrt(h_t) Z_t, h_t = a0 + a1 X_{t-1}^2 + a2 h_{t-1}
  bilinear,   //!< X_t = a X_{t-1} + b X_{t-1} Z_{t-1} + Z_t
  ma          //!< X_t = Z_t + sum_k theta_k Z_{t-k}
};

struct ModelSpec
{
  ModelKind kind = ModelKind::iid_chisq1;
  double phi = 0.5;
  double theta = -0.5;
  std::array<double, 3> alpha{ 0.1, 0.8, 0.1 };
  double a = 0.4;
  double b = 0.4;
  std::vector<double> ma_coefficients;
  //! Discarded warm-up samples; empty means 1000 for recursive models, 0 otherwise.
  std::optional<long> burn_in;

  //! Short kind name: iid, arma11, garch11, bilinear, ma.
  std::string name() const;
  //! Name plus parameters, e.g. "arma11:phi=0.5,theta=-0.5".
  std::string descriptor() const;
  long effective_burn_in() const;
  //! Throws InvalidInput on non-stationary or malformed parameters.
  void validate() const;
};

ModelSpec iid_model();
ModelSpec arma_model(double phi = 0.5, double theta = -0.5);
ModelSpec garch_model(std::array<double, 3> alpha = { 0.1, 0.8, 0.1 });
ModelSpec bilinear_model(double a = 0.4, double b = 0.4);
ModelSpec ma_model(std::vector<double> coefficients);

//! "iid", "arma11:phi=0.5,theta=-0.5", "garch11:a0=0.1,a1=0.8,a2=0.1",
//! "bilinear:a=0.4,b=0.4", "ma:t1=0.5,t2=0.3", optionally with burn=...
ModelSpec parse_model(const std::string& text);

//! N samples after burn-in. Replication `replication` under root `seed` is
//! an independent stream; identical arguments give identical output.
TimeSeries generate(const ModelSpec& spec, std::size_t N, std::uint64_t seed,
                    std::uint64_t replication = 0);

// Reference values -----------------------------------------------------------

struct OracleRow
{
  std::string model; //!< ModelSpec::descriptor()
  int order = 3;
  double omega1 = 0.0;
  double omega2 = 0.0; //!< 0 for order 2
  double re = 0.0;
  double im = 0.0;
  long replications = 0;
  long length = 0;
  std::uint64_t seed = 0;
};

//! Simulated reference spectra and bispectra, persisted as versioned CSV.
class OracleTable
{
public:
  static constexpr int version = 1;

  void add(OracleRow row);
  const std::vector<OracleRow>& rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }

  std::optional<std::complex<double>> lookup(const std::string& model, int order,
                                             double omega1, double omega2 = 0.0) const;

  //! Rows of `other` replace matching rows here.
  void merge(const OracleTable& other);

  void save(const std::string& path) const;
  static OracleTable load(const std::string& path);

private:
  std::vector<OracleRow> rows_;
};

bool has_closed_form_spectrum(const ModelSpec& spec);
bool has_closed_form_bispectrum(const ModelSpec& spec);

//! True spectrum; models without a closed form read the oracle table and
//! throw MissingOracle when it has no entry.
double true_spectrum(const ModelSpec& spec, double omega,
                     const OracleTable* oracle = nullptr);

//! True (or simulated reference) bispectrum.
std::complex<double> reference_bispectrum(const ModelSpec& spec,
                                          std::array<double, 2> omega,
                                          const OracleTable* oracle = nullptr);

struct OracleConfig
{
  long replications = 50;
  long length = 20000;
  std::uint64_t seed = 20240601;
  unsigned threads = 1;
  int bootstrap_replicates = 200;
  double c = 0.51;
};

//! Ensemble-averaged flat-top estimates: the bispectrum as the mean of the
//! rpf and rcf estimates with data-driven bandwidths, the spectrum (only for
//! models without a closed form) from the trapezoid window.
OracleTable build_oracle(const ModelSpec& spec,
                         const std::vector<std::array<double, 2>>& bispectrum_points,
                         const std::vector<double>& spectrum_points,
                         const OracleConfig& config = {});

} // namespace flattop
