#pragma once

#include "flattop/models.hpp"
#include "flattop/windows.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace flattop {

using FrequencyPoint = std::array<double, 2>;

//! The (n - 1)(n - 2) / 2 points (pi (2i + 2j) / (3n), 2 pi j / (3n)),
//! i = 1..n-1, j = 1..n-i-1, inside the principal triangle.
std::vector<FrequencyPoint> composite_grid(int n);

//! Point of the second evaluation criterion.
inline constexpr FrequencyPoint evaluation_point{ 2.0, 1.0 };

//! sum_k |estimate_k - truth_k| / denominator_k.
double err_lambda(const std::vector<std::complex<double>>& estimates,
                  const std::vector<std::complex<double>>& truth,
                  const std::vector<double>& denominators);

enum class Criterion
{
  abs_origin,
  re_21,
  im_21,
  abs_21,
  t_composite
};

inline constexpr std::array<Criterion, 5> all_criteria{ Criterion::abs_origin, Criterion::re_21,
                                                        Criterion::im_21, Criterion::abs_21,
                                                        Criterion::t_composite };

//! "abs@origin", "re@(2,1)", "im@(2,1)", "abs@(2,1)", "T_composite".
std::string criterion_name(Criterion c);

//! How grid errors are scaled in the composite criterion.
enum class Standardization
{
  sqrt_product, //!< |f^ - f| / sqrt(f(w1) f(w2) f(w1 + w2))
  product       //!< |f^ - f| / (f(w1) f(w2) f(w1 + w2))
};

std::string standardization_name(Standardization s);
Standardization parse_standardization(const std::string& text);

//! Reference values needed to score one model.
struct StudyTruth
{
  std::complex<double> origin;
  std::complex<double> at21;
  std::vector<FrequencyPoint> grid;
  std::vector<std::complex<double>> grid_values;
  std::vector<double> denominators;
  std::string bispectrum_source; //!< "closed-form" or "oracle"
  std::string spectrum_source;
};

StudyTruth study_truth(const ModelSpec& model, int grid_n, Standardization standardization,
                       const OracleTable* oracle = nullptr);

//! Every frequency a study of `grid_n` evaluates: the bispectrum points and
//! the spectrum arguments of the standardization.
std::vector<FrequencyPoint> study_bispectrum_points(int grid_n);
std::vector<double> study_spectrum_points(int grid_n);

struct CriterionResult
{
  Criterion criterion = Criterion::abs_origin;
  std::vector<double> values; //!< per replication statistic (|f^|, Re f^, ..., err)
  std::vector<double> losses; //!< per replication squared error
  double mse = 0.0;
  double mean_value = 0.0;
  int rank = 0; //!< 1 / 2 for the best / second best bandwidth of a sweep
};

struct StudyCell
{
  std::string model;
  std::size_t N = 0;
  std::string procedure; //!< rpf, rcf, opt-fp, opt-sp, or the window of a sweep
  std::string window;
  std::string rule; //!< "auto" or "fixed"
  double fixed_M = 0.0;
  std::vector<double> bandwidths; //!< per replication bandwidth at the origin
  std::vector<CriterionResult> criteria;
  std::string truth_source;
  long replications = 0;

  const CriterionResult& at(Criterion c) const;
};

struct StudyConfig
{
  std::vector<ModelSpec> models{ iid_model() };
  //! Automatic procedures: rpf, rcf (practical bispectrum rule), opt-fp,
  //! opt-sp (plug-in with flat-top / second-order pilots).
  std::vector<std::string> procedures{ "rpf", "rcf", "opt-fp", "opt-sp" };
  //! Fixed-bandwidth sweep: every window here at every M in sweep_bandwidths.
  std::vector<std::string> sweep_windows;
  std::vector<double> sweep_bandwidths;
  std::vector<std::size_t> lengths{ 200, 2000 };
  long replications = 100;
  std::uint64_t seed = 20240601;
  unsigned threads = 1;
  int grid_n = 5;
  Standardization standardization = Standardization::sqrt_product;
  const OracleTable* oracle = nullptr;
  int bootstrap_replicates = 500;
  double c = default_flat_top_c;
  double opt_tolerance = default_opt_tolerance;
  //! Score every replication against its own estimate (all losses 0).
  bool self_test = false;
};

struct StudyReport
{
  std::vector<StudyCell> cells;
  long replications = 0;
  std::uint64_t seed = 0;
  int grid_n = 5;
  Standardization standardization = Standardization::sqrt_product;

  //! One row per (cell, criterion).
  std::string to_csv() const;
  std::string to_json() const;
};

StudyReport run_mse_study(const StudyConfig& config);

// Bandwidth procedures ------------------------------------------------------

//! (a) practical bispectrum rule, (b) / (c) plug-in at the origin / (2, 1)
//! with flat-top pilots, (d) / (e) the same with second-order pilots.
enum class BandwidthProcedure
{
  a,
  b,
  c,
  d,
  e
};

inline constexpr std::array<BandwidthProcedure, 5> all_procedures{
  BandwidthProcedure::a, BandwidthProcedure::b, BandwidthProcedure::c, BandwidthProcedure::d,
  BandwidthProcedure::e
};

char procedure_letter(BandwidthProcedure p);
BandwidthProcedure parse_procedure(char letter);

struct HistogramConfig
{
  std::vector<ModelSpec> models{ iid_model() };
  std::vector<BandwidthProcedure> procedures{ all_procedures.begin(), all_procedures.end() };
  std::vector<std::size_t> lengths{ 200, 2000 };
  long replications = 100;
  std::uint64_t seed = 20240601;
  unsigned threads = 1;
  //! Benchmark bandwidth per model descriptor; models other than the
  //! bilinear one default to 1.
  std::map<std::string, double> benchmarks;
  int bootstrap_replicates = 500;
  double c = default_flat_top_c;
  double opt_tolerance = default_opt_tolerance;
};

struct HistogramCell
{
  std::string model;
  std::size_t N = 0;
  BandwidthProcedure procedure = BandwidthProcedure::a;
  double benchmark = 1.0;
  std::vector<long> bandwidths; //!< per replication selected integer bandwidth
  std::vector<double> raw;      //!< per replication unrounded estimate
  std::map<long, long> counts;
  double relative_mse = 0.0; //!< mean of (M / benchmark - 1)^2
  double mean_bandwidth = 0.0;
  long modal_bandwidth = 0;
};

struct HistogramReport
{
  std::vector<HistogramCell> cells;
  long replications = 0;
  std::uint64_t seed = 0;

  const HistogramCell& find(const std::string& model, std::size_t N,
                            BandwidthProcedure procedure) const;

  //! (model, N, procedure, bandwidth, count) rows.
  std::string counts_csv() const;
  //! (model, N, procedure, benchmark, mean, mode, relative MSE) rows.
  std::string summary_csv() const;
  std::string to_json() const;
};

HistogramReport bandwidth_histogram_study(const HistogramConfig& config);

} // namespace flattop
