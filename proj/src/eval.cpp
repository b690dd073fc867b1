#include "flattop/eval.hpp"

#include "flattop/bandwidth.hpp"
#include "flattop/error.hpp"
#include "flattop/parallel.hpp"
#include "flattop/random.hpp"
#include "flattop/spectra.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>

namespace flattop {

namespace {

constexpr std::uint64_t bootstrap_stream = 0x626f6f74ULL;
constexpr long moment_table_threshold = 64;

std::string
fmt(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string
quoted(const std::string& s)
{
  return s.find(',') == std::string::npos ? s : "\"" + s + "\"";
}

//! Replication index shared by every study, so all procedures see the same data.
std::uint64_t
replication_index(std::size_t N, long r)
{
  return (static_cast<std::uint64_t>(N) << 32) | static_cast<std::uint64_t>(r);
}

struct Thresholds
{
  double k1;
  double k2;
  std::uint64_t spectrum_seed;
};

Thresholds
bispectrum_thresholds(const TimeSeries& x, std::uint64_t seed, std::uint64_t index,
                      int replicates)
{
  auto sub = make_engine(seed, bootstrap_stream, index);
  BootstrapConfig boot;
  boot.replicates = replicates;
  boot.tau0 = bispectrum_k1_lag;
  boot.seed = sub();
  const double k1 = bootstrap_threshold(x, boot).k;
  boot.tau0 = bispectrum_k2_lag;
  boot.seed = sub();
  const double k2 = bootstrap_threshold(x, boot).k;
  return { k1, k2, sub() };
}

// Lazily built full-range third moments of channel 0.
class LazyMoments
{
public:
  explicit LazyMoments(const TimeSeries& x)
    : x_(x)
  {
  }

  const ThirdMomentTable& get()
  {
    if (!table_) {
      table_.emplace(x_, 0, static_cast<long>(x_.length()) - 1);
    }
    return *table_;
  }

  BispectrumEstimator estimator(const LagWindow& window, double M)
  {
    auto weights = BispectrumWeights::shared(window, M, x_.length());
    if (weights->by_orbit() && weights->radius() > moment_table_threshold) {
      return BispectrumEstimator(get(), weights);
    }
    return BispectrumEstimator(x_, weights);
  }

private:
  const TimeSeries& x_;
  std::optional<ThirdMomentTable> table_;
};

// Estimates at [origin, (2,1), grid...] for one procedure in one replication.
struct PointEstimates
{
  std::vector<std::complex<double>> values;
  double bandwidth_at_origin = 0.0;
};

void
score(const StudyTruth& truth, const PointEstimates& est, bool self_test,
      std::array<double, 5>& values, std::array<double, 5>& losses)
{
  const auto& v = est.values;
  const std::complex<double> origin = self_test ? v[0] : truth.origin;
  const std::complex<double> at21 = self_test ? v[1] : truth.at21;
  values[0] = std::abs(v[0]);
  losses[0] = std::pow(values[0] - std::abs(origin), 2);
  values[1] = v[1].real();
  losses[1] = std::pow(values[1] - at21.real(), 2);
  values[2] = v[1].imag();
  losses[2] = std::pow(values[2] - at21.imag(), 2);
  values[3] = std::abs(v[1]);
  losses[3] = std::pow(values[3] - std::abs(at21), 2);
  std::vector<std::complex<double>> grid(v.begin() + 2, v.end());
  const double err =
    err_lambda(grid, self_test ? grid : truth.grid_values, truth.denominators);
  values[4] = err;
  losses[4] = err * err;
}

} // namespace

std::vector<FrequencyPoint>
composite_grid(int n)
{
  if (n < 3) {
    throw InvalidInput("composite grid needs n >= 3");
  }
  std::vector<FrequencyPoint> out;
  const double dn = static_cast<double>(n);
  for (int i = 1; i <= n - 1; ++i) {
    for (int j = 1; j <= n - i - 1; ++j) {
      out.push_back({ std::numbers::pi * (2.0 * i + 2.0 * j) / (3.0 * dn),
                      2.0 * std::numbers::pi * j / (3.0 * dn) });
    }
  }
  return out;
}

double
err_lambda(const std::vector<std::complex<double>>& estimates,
           const std::vector<std::complex<double>>& truth, const std::vector<double>& denominators)
{
  if (estimates.size() != truth.size() || estimates.size() != denominators.size()) {
    throw InvalidInput("err_lambda needs aligned estimate, truth and denominator arrays");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < estimates.size(); ++k) {
    if (!(denominators[k] > 0.0)) {
      throw InvalidInput("standardizing denominator must be positive");
    }
    sum += std::abs(estimates[k] - truth[k]) / denominators[k];
  }
  return sum;
}

std::string
criterion_name(Criterion c)
{
  switch (c) {
    case Criterion::abs_origin:
      return "abs@origin";
    case Criterion::re_21:
      return "re@(2,1)";
    case Criterion::im_21:
      return "im@(2,1)";
    case Criterion::abs_21:
      return "abs@(2,1)";
    case Criterion::t_composite:
      return "T_composite";
  }
  return "unknown";
}

std::string
standardization_name(Standardization s)
{
  return s == Standardization::sqrt_product ? "sqrt-product" : "product";
}

Standardization
parse_standardization(const std::string& text)
{
  if (text == "sqrt-product") {
    return Standardization::sqrt_product;
  }
  if (text == "product") {
    return Standardization::product;
  }
  throw InvalidInput("unknown standardization '" + text + "' (sqrt-product | product)");
}

std::vector<FrequencyPoint>
study_bispectrum_points(int grid_n)
{
  std::vector<FrequencyPoint> out{ { 0.0, 0.0 }, evaluation_point };
  const auto grid = composite_grid(grid_n);
  out.insert(out.end(), grid.begin(), grid.end());
  return out;
}

std::vector<double>
study_spectrum_points(int grid_n)
{
  std::vector<double> out;
  for (const auto& w : composite_grid(grid_n)) {
    for (double v : { w[0], w[1], w[0] + w[1] }) {
      if (std::none_of(out.begin(), out.end(), [&](double u) { return std::abs(u - v) < 1e-12; })) {
        out.push_back(v);
      }
    }
  }
  return out;
}

StudyTruth
study_truth(const ModelSpec& model, int grid_n, Standardization standardization,
            const OracleTable* oracle)
{
  StudyTruth t;
  t.grid = composite_grid(grid_n);
  t.origin = reference_bispectrum(model, { 0.0, 0.0 }, oracle);
  t.at21 = reference_bispectrum(model, evaluation_point, oracle);
  for (const auto& w : t.grid) {
    t.grid_values.push_back(reference_bispectrum(model, w, oracle));
    const double product = true_spectrum(model, w[0], oracle) * true_spectrum(model, w[1], oracle) *
                           true_spectrum(model, w[0] + w[1], oracle);
    t.denominators.push_back(standardization == Standardization::sqrt_product ? std::sqrt(product)
                                                                              : product);
  }
  t.bispectrum_source = has_closed_form_bispectrum(model) ? "closed-form" : "oracle";
  t.spectrum_source = has_closed_form_spectrum(model) ? "closed-form" : "oracle";
  return t;
}

const CriterionResult&
StudyCell::at(Criterion c) const
{
  for (const auto& r : criteria) {
    if (r.criterion == c) {
      return r;
    }
  }
  throw InvalidInput("criterion " + criterion_name(c) + " not in cell");
}

StudyReport
run_mse_study(const StudyConfig& config)
{
  if (config.replications < 1) {
    throw InvalidInput("study needs at least one replication");
  }
  for (const auto& p : config.procedures) {
    if (p != "rpf" && p != "rcf" && p != "opt-fp" && p != "opt-sp") {
      throw InvalidInput("unknown procedure '" + p + "' (rpf | rcf | opt-fp | opt-sp)");
    }
  }
  std::vector<LagWindow> sweep_windows;
  for (const auto& w : config.sweep_windows) {
    sweep_windows.push_back(parse_window(w));
    if (sweep_windows.back().order() != 3) {
      throw InvalidInput("sweep window " + w + " is not two-dimensional");
    }
  }
  for (double M : config.sweep_bandwidths) {
    if (!(M > 0.0)) {
      throw InvalidInput("sweep bandwidths must be positive");
    }
  }
  if (!sweep_windows.empty() && config.sweep_bandwidths.empty()) {
    throw InvalidInput("sweep windows given without sweep bandwidths");
  }

  const auto points = study_bispectrum_points(config.grid_n);
  const LagWindow rpf = rpf_window(config.c);
  const LagWindow rcf = rcf_window(config.c);
  const LagWindow opt = opt_window(config.opt_tolerance);
  auto has = [&](const std::string& p) {
    return std::find(config.procedures.begin(), config.procedures.end(), p) !=
           config.procedures.end();
  };

  StudyReport report;
  report.replications = config.replications;
  report.seed = config.seed;
  report.grid_n = config.grid_n;
  report.standardization = config.standardization;

  for (const auto& model : config.models) {
    model.validate();
    StudyTruth truth;
    if (!config.self_test) {
      truth = study_truth(model, config.grid_n, config.standardization, config.oracle);
    } else {
      truth.grid = composite_grid(config.grid_n);
      truth.denominators.assign(truth.grid.size(), 1.0);
      truth.bispectrum_source = truth.spectrum_source = "self";
    }

    for (std::size_t N : config.lengths) {
      // cell layout: auto procedures in config order, then sweep (window-major)
      std::vector<StudyCell> cells;
      for (const auto& p : config.procedures) {
        StudyCell cell;
        cell.procedure = p;
        cell.window = p == "rpf" ? rpf.descriptor() : p == "rcf" ? rcf.descriptor()
                                                                 : opt.descriptor();
        cell.rule = "auto";
        cells.push_back(cell);
      }
      for (std::size_t w = 0; w < sweep_windows.size(); ++w) {
        for (double M : config.sweep_bandwidths) {
          StudyCell cell;
          cell.procedure = config.sweep_windows[w];
          cell.window = sweep_windows[w].descriptor();
          cell.rule = "fixed";
          cell.fixed_M = M;
          cells.push_back(cell);
        }
      }
      const std::size_t ncells = cells.size();
      const auto R = static_cast<std::size_t>(config.replications);
      // [rep][cell] -> per criterion values / losses, bandwidth
      std::vector<std::vector<std::array<double, 5>>> values(R), losses(R);
      std::vector<std::vector<double>> bandwidths(R);

      parallel_for(R, config.threads, [&](std::size_t r) {
        const std::uint64_t index = replication_index(N, static_cast<long>(r));
        const TimeSeries x = generate(model, N, config.seed, index);
        LazyMoments moments(x);
        values[r].resize(ncells);
        losses[r].resize(ncells);
        bandwidths[r].resize(ncells);

        std::optional<Thresholds> thresholds;
        if (has("rpf") || has("rcf") || has("opt-fp")) {
          thresholds = bispectrum_thresholds(x, config.seed, index, config.bootstrap_replicates);
        }
        std::optional<double> rule_bandwidth;
        if (has("rpf") || has("rcf")) {
          BispectrumRuleConfig rule;
          rule.k1 = thresholds->k1;
          rule.k2 = thresholds->k2;
          rule.b = config.c;
          rule_bandwidth =
            static_cast<double>(select_bandwidth_bispectrum(x, rule).integer_bandwidth());
        }

        auto fixed_estimates = [&](const LagWindow& window, double M) {
          PointEstimates est;
          const BispectrumEstimator e = moments.estimator(window, M);
          for (const auto& w : points) {
            est.values.push_back(e.value(w[0], w[1]));
          }
          est.bandwidth_at_origin = M;
          return est;
        };
        auto plugin_estimates = [&](PilotKind pilot) {
          PluginConfig pc;
          pc.c = config.c;
          pc.bootstrap_replicates = config.bootstrap_replicates;
          pc.opt_tolerance = config.opt_tolerance;
          if (thresholds) {
            pc.k1 = thresholds->k1;
            pc.k2 = thresholds->k2;
            pc.seed = thresholds->spectrum_seed;
          }
          const auto picks = plugin_bandwidths(opt, x, points, pilot, pc,
                                               pilot == PilotKind::second_order ? &moments.get()
                                                                                : nullptr);
          PointEstimates est;
          std::map<long, BispectrumEstimator> by_bandwidth;
          for (std::size_t p = 0; p < points.size(); ++p) {
            const long M = picks[p].bandwidth;
            auto it = by_bandwidth.find(M);
            if (it == by_bandwidth.end()) {
              it = by_bandwidth.emplace(M, moments.estimator(opt, static_cast<double>(M))).first;
            }
            est.values.push_back(it->second.value(points[p][0], points[p][1]));
          }
          est.bandwidth_at_origin = static_cast<double>(picks[0].bandwidth);
          return est;
        };

        for (std::size_t c = 0; c < ncells; ++c) {
          const StudyCell& cell = cells[c];
          PointEstimates est;
          if (cell.rule == "fixed") {
            const std::size_t w = c - config.procedures.size();
            est = fixed_estimates(sweep_windows[w / config.sweep_bandwidths.size()], cell.fixed_M);
          } else if (cell.procedure == "rpf") {
            est = fixed_estimates(rpf, *rule_bandwidth);
          } else if (cell.procedure == "rcf") {
            est = fixed_estimates(rcf, *rule_bandwidth);
          } else if (cell.procedure == "opt-fp") {
            est = plugin_estimates(PilotKind::flat_top);
          } else {
            est = plugin_estimates(PilotKind::second_order);
          }
          score(truth, est, config.self_test, values[r][c], losses[r][c]);
          bandwidths[r][c] = est.bandwidth_at_origin;
        }
      });

      for (std::size_t c = 0; c < ncells; ++c) {
        StudyCell& cell = cells[c];
        cell.model = model.descriptor();
        cell.N = N;
        cell.replications = config.replications;
        cell.truth_source = truth.bispectrum_source + "/" + truth.spectrum_source;
        for (std::size_t r = 0; r < R; ++r) {
          cell.bandwidths.push_back(bandwidths[r][c]);
        }
        for (std::size_t k = 0; k < all_criteria.size(); ++k) {
          CriterionResult res;
          res.criterion = all_criteria[k];
          double sv = 0.0;
          double sl = 0.0;
          for (std::size_t r = 0; r < R; ++r) {
            res.values.push_back(values[r][c][k]);
            res.losses.push_back(losses[r][c][k]);
            sv += values[r][c][k];
            sl += losses[r][c][k];
          }
          res.mean_value = sv / static_cast<double>(R);
          res.mse = sl / static_cast<double>(R);
          cell.criteria.push_back(std::move(res));
        }
      }

      // best and second best bandwidth of each sweep window
      for (std::size_t w = 0; w < sweep_windows.size(); ++w) {
        const std::size_t first = config.procedures.size() + w * config.sweep_bandwidths.size();
        for (std::size_t k = 0; k < all_criteria.size(); ++k) {
          std::vector<std::size_t> order(config.sweep_bandwidths.size());
          std::iota(order.begin(), order.end(), first);
          std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return cells[a].criteria[k].mse < cells[b].criteria[k].mse;
          });
          for (std::size_t q = 0; q < std::min<std::size_t>(2, order.size()); ++q) {
            cells[order[q]].criteria[k].rank = static_cast<int>(q + 1);
          }
        }
      }
      for (auto& cell : cells) {
        report.cells.push_back(std::move(cell));
      }
    }
  }
  return report;
}

std::string
StudyReport::to_csv() const
{
  std::ostringstream out;
  out << "model,N,procedure,window,rule,M,criterion,mse,mean_value,rank,replications,truth_"
         "source,standardization\n";
  for (const auto& cell : cells) {
    for (const auto& c : cell.criteria) {
      out << quoted(cell.model) << ',' << cell.N << ',' << quoted(cell.procedure) << ','
          << quoted(cell.window) << ',' << cell.rule << ','
          << (cell.rule == "fixed" ? fmt(cell.fixed_M) : std::string()) << ','
          << criterion_name(c.criterion) << ',' << fmt(c.mse) << ',' << fmt(c.mean_value) << ','
          << c.rank << ',' << cell.replications << ',' << cell.truth_source << ','
          << standardization_name(standardization) << '\n';
    }
  }
  return out.str();
}

std::string
StudyReport::to_json() const
{
  nlohmann::json j;
  j["replications"] = replications;
  j["seed"] = seed;
  j["grid_n"] = grid_n;
  j["standardization"] = standardization_name(standardization);
  j["cells"] = nlohmann::json::array();
  for (const auto& cell : cells) {
    nlohmann::json c;
    c["model"] = cell.model;
    c["N"] = cell.N;
    c["procedure"] = cell.procedure;
    c["window"] = cell.window;
    c["rule"] = cell.rule;
    if (cell.rule == "fixed") {
      c["M"] = cell.fixed_M;
    }
    c["truth_source"] = cell.truth_source;
    c["bandwidths"] = cell.bandwidths;
    for (const auto& r : cell.criteria) {
      c["criteria"][criterion_name(r.criterion)] = {
        { "mse", r.mse }, { "mean_value", r.mean_value }, { "rank", r.rank }
      };
    }
    j["cells"].push_back(c);
  }
  return j.dump(2) + "\n";
}

// Bandwidth procedures ------------------------------------------------------

char
procedure_letter(BandwidthProcedure p)
{
  return static_cast<char>('a' + static_cast<int>(p));
}

BandwidthProcedure
parse_procedure(char letter)
{
  if (letter < 'a' || letter > 'e') {
    throw InvalidInput(std::string("unknown bandwidth procedure '") + letter + "' (a-e)");
  }
  return static_cast<BandwidthProcedure>(letter - 'a');
}

const HistogramCell&
HistogramReport::find(const std::string& model, std::size_t N, BandwidthProcedure procedure) const
{
  for (const auto& c : cells) {
    if (c.model == model && c.N == N && c.procedure == procedure) {
      return c;
    }
  }
  throw InvalidInput("no histogram cell for " + model + ", N = " + std::to_string(N));
}

HistogramReport
bandwidth_histogram_study(const HistogramConfig& config)
{
  if (config.replications < 1) {
    throw InvalidInput("study needs at least one replication");
  }
  auto wants = [&](BandwidthProcedure p) {
    return std::find(config.procedures.begin(), config.procedures.end(), p) !=
           config.procedures.end();
  };
  const bool flat_top_plugin = wants(BandwidthProcedure::b) || wants(BandwidthProcedure::c);
  const bool second_order_plugin = wants(BandwidthProcedure::d) || wants(BandwidthProcedure::e);
  const LagWindow opt = opt_window(config.opt_tolerance);
  const std::vector<FrequencyPoint> plug_points{ { 0.0, 0.0 }, evaluation_point };

  HistogramReport report;
  report.replications = config.replications;
  report.seed = config.seed;

  for (const auto& model : config.models) {
    model.validate();
    double benchmark = 1.0;
    if (auto it = config.benchmarks.find(model.descriptor()); it != config.benchmarks.end()) {
      benchmark = it->second;
    } else if (model.kind == ModelKind::bilinear) {
      throw InvalidInput("model " + model.descriptor() +
                         " needs a benchmark bandwidth (e.g. the best bandwidth of a fixed-M "
                         "sweep)");
    }
    if (!(benchmark > 0.0)) {
      throw InvalidInput("benchmark bandwidth must be positive");
    }

    for (std::size_t N : config.lengths) {
      const auto R = static_cast<std::size_t>(config.replications);
      // [rep][procedure] -> (integer bandwidth, raw estimate)
      std::vector<std::array<std::pair<long, double>, 5>> picks(R);

      parallel_for(R, config.threads, [&](std::size_t r) {
        const std::uint64_t index = replication_index(N, static_cast<long>(r));
        const TimeSeries x = generate(model, N, config.seed, index);
        const Thresholds th =
          bispectrum_thresholds(x, config.seed, index, config.bootstrap_replicates);
        if (wants(BandwidthProcedure::a)) {
          BispectrumRuleConfig rule;
          rule.k1 = th.k1;
          rule.k2 = th.k2;
          rule.b = config.c;
          const auto sel = select_bandwidth_bispectrum(x, rule);
          picks[r][0] = { sel.integer_bandwidth(), sel.M_hat };
        }
        PluginConfig pc;
        pc.c = config.c;
        pc.bootstrap_replicates = config.bootstrap_replicates;
        pc.opt_tolerance = config.opt_tolerance;
        pc.k1 = th.k1;
        pc.k2 = th.k2;
        pc.seed = th.spectrum_seed;
        if (flat_top_plugin) {
          const auto res = plugin_bandwidths(opt, x, plug_points, PilotKind::flat_top, pc);
          picks[r][1] = { res[0].bandwidth, res[0].M_hat };
          picks[r][2] = { res[1].bandwidth, res[1].M_hat };
        }
        if (second_order_plugin) {
          const ThirdMomentTable table(x, 0, static_cast<long>(N) - 1);
          const auto res =
            plugin_bandwidths(opt, x, plug_points, PilotKind::second_order, pc, &table);
          picks[r][3] = { res[0].bandwidth, res[0].M_hat };
          picks[r][4] = { res[1].bandwidth, res[1].M_hat };
        }
      });

      for (BandwidthProcedure p : config.procedures) {
        const auto k = static_cast<std::size_t>(p);
        HistogramCell cell;
        cell.model = model.descriptor();
        cell.N = N;
        cell.procedure = p;
        cell.benchmark = benchmark;
        double sq = 0.0;
        double sum = 0.0;
        for (std::size_t r = 0; r < R; ++r) {
          const long m = picks[r][k].first;
          cell.bandwidths.push_back(m);
          cell.raw.push_back(picks[r][k].second);
          ++cell.counts[m];
          const double rel = static_cast<double>(m) / benchmark - 1.0;
          sq += rel * rel;
          sum += static_cast<double>(m);
        }
        cell.relative_mse = sq / static_cast<double>(R);
        cell.mean_bandwidth = sum / static_cast<double>(R);
        long best = 0;
        for (const auto& [m, n] : cell.counts) {
          if (n > best) {
            best = n;
            cell.modal_bandwidth = m;
          }
        }
        report.cells.push_back(std::move(cell));
      }
    }
  }
  return report;
}

std::string
HistogramReport::counts_csv() const
{
  std::ostringstream out;
  out << "model,N,procedure,bandwidth,count\n";
  for (const auto& c : cells) {
    for (const auto& [m, n] : c.counts) {
      out << quoted(c.model) << ',' << c.N << ',' << procedure_letter(c.procedure) << ',' << m
          << ',' << n << '\n';
    }
  }
  return out.str();
}

std::string
HistogramReport::summary_csv() const
{
  std::ostringstream out;
  out << "model,N,procedure,benchmark,mean_bandwidth,modal_bandwidth,relative_mse,replications\n";
  for (const auto& c : cells) {
    out << quoted(c.model) << ',' << c.N << ',' << procedure_letter(c.procedure) << ','
        << fmt(c.benchmark) << ',' << fmt(c.mean_bandwidth) << ',' << c.modal_bandwidth << ','
        << fmt(c.relative_mse) << ',' << replications << '\n';
  }
  return out.str();
}

std::string
HistogramReport::to_json() const
{
  nlohmann::json j;
  j["replications"] = replications;
  j["seed"] = seed;
  j["cells"] = nlohmann::json::array();
  for (const auto& c : cells) {
    nlohmann::json cell;
    cell["model"] = c.model;
    cell["N"] = c.N;
    cell["procedure"] = std::string(1, procedure_letter(c.procedure));
    cell["benchmark"] = c.benchmark;
    cell["bandwidths"] = c.bandwidths;
    cell["raw"] = c.raw;
    cell["relative_mse"] = c.relative_mse;
    cell["mean_bandwidth"] = c.mean_bandwidth;
    cell["modal_bandwidth"] = c.modal_bandwidth;
    j["cells"].push_back(cell);
  }
  return j.dump(2) + "\n";
}

} // namespace flattop
