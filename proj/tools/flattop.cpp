#include "flattop/bandwidth.hpp"
#include "flattop/error.hpp"
#include "flattop/eval.hpp"
#include "flattop/io.hpp"
#include "flattop/models.hpp"
#include "flattop/parallel.hpp"
#include "flattop/spectra.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace flattop;

namespace {

enum ExitCode
{
  exit_ok = 0,
  exit_input = 2,
  exit_degenerate = 3,
  exit_oracle = 4
};

struct Common
{
  std::string output;
  std::string output_dir;
  unsigned threads = 0;
  std::uint64_t seed = 20240601;
};

std::string
fmt(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::vector<std::string>
split(const std::string& s, char sep)
{
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) {
    if (!item.empty()) {
      out.push_back(item);
    }
  }
  return out;
}

template<class T>
std::vector<T>
parse_list(const std::string& s, const std::string& what)
{
  std::vector<T> out;
  for (const auto& item : split(s, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || used == 0) {
      throw InvalidInput(what + ": '" + item + "' is not a number");
    }
    if constexpr (std::is_integral_v<T>) {
      if (v < 0 || v != static_cast<double>(static_cast<long>(v))) {
        throw InvalidInput(what + ": '" + item + "' is not a non-negative integer");
      }
    }
    out.push_back(static_cast<T>(v));
  }
  return out;
}

fs::path
output_base(const Common& common)
{
  if (!common.output_dir.empty()) {
    return common.output_dir;
  }
  if (const char* env = std::getenv("FLATTOP_OUTPUT_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return ".";
}

fs::path
resolve_output(const Common& common, const std::string& name)
{
  fs::path p(name);
  if (p.is_absolute()) {
    return p;
  }
  return output_base(common) / p;
}

void
write_file(const fs::path& path, const std::string& content)
{
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw InvalidInput("cannot write '" + path.string() + "'");
  }
  out << content;
}

//! Every option of the subcommand as parsed, for the provenance sidecar.
nlohmann::json
run_config(const CLI::App* sub)
{
  nlohmann::json j;
  j["subcommand"] = sub->get_name();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_name(false, true);
    if (name.empty() || name == "--help" || name == "-h") {
      continue;
    }
    std::string key = opt->get_lnames().empty() ? name : opt->get_lnames().front();
    if (opt->get_type_size() == 0) {
      j["options"][key] = opt->count() > 0;
    } else if (opt->count() > 0) {
      j["options"][key] = opt->results();
    } else {
      j["options"][key] = opt->get_default_str();
    }
  }
  if (const char* env = std::getenv("FLATTOP_OUTPUT_DIR"); env != nullptr) {
    j["env"]["FLATTOP_OUTPUT_DIR"] = env;
  }
  return j;
}

void
write_sidecar(const CLI::App* sub, const fs::path& output)
{
  fs::path side = output;
  side.replace_extension(".config.json");
  write_file(side, run_config(sub).dump(2) + "\n");
}

// Data source --------------------------------------------------------------

struct Source
{
  std::string input;
  std::string model;
  std::size_t length = 2000;
  std::uint64_t replication = 0;

  void add_options(CLI::App* sub)
  {
    sub->add_option("--input,-i", input, "Series file: one row per time step, columns = channels");
    sub->add_option("--model,-m", model, "Simulate a model instead (iid, arma11, garch11, bilinear, ma:t1=..)");
    sub->add_option("--length,-n", length, "Length of the simulated series")->capture_default_str();
    sub->add_option("--replication", replication, "Replication index of the simulated series")
      ->capture_default_str();
  }

  TimeSeries load(std::uint64_t seed) const
  {
    if (input.empty() == model.empty()) {
      throw InvalidInput("give exactly one of --input and --model");
    }
    if (!input.empty()) {
      return read_series(input);
    }
    return generate(parse_model(model), length, seed, replication);
  }
};

std::vector<std::array<double, 2>>
parse_points(const std::vector<std::string>& at, int order)
{
  std::vector<std::array<double, 2>> out;
  for (const auto& item : at) {
    const auto parts = split(item, ',');
    if (static_cast<int>(parts.size()) != order - 1) {
      throw InvalidInput("--at '" + item + "' needs " + std::to_string(order - 1) +
                         " comma separated frequencies");
    }
    out.push_back({ parse_frequency(parts[0]), order == 3 ? parse_frequency(parts[1]) : 0.0 });
  }
  return out;
}

ChannelTuple
parse_channels(const std::string& text, int order, const TimeSeries& series)
{
  if (text.empty()) {
    return ChannelTuple(static_cast<std::size_t>(order), 0);
  }
  auto ch = parse_list<std::size_t>(text, "--channels");
  if (static_cast<int>(ch.size()) != order) {
    throw InvalidInput("--channels needs " + std::to_string(order) + " indices");
  }
  for (auto a : ch) {
    if (a >= series.channels()) {
      throw InvalidInput("channel " + std::to_string(a) + " out of range");
    }
  }
  return ch;
}

bool
single_channel(const ChannelTuple& ch)
{
  return std::all_of(ch.begin(), ch.end(), [&](std::size_t a) { return a == ch.front(); });
}

// estimate -----------------------------------------------------------------

struct EstimateOptions
{
  Source source;
  int order = 3;
  std::string window;
  std::string bandwidth = "auto";
  std::vector<std::string> at;
  int grid = 0;
  std::string channels;
  std::optional<double> k;
  std::optional<double> k1;
  std::optional<double> k2;
  int bootstrap = 500;
  std::string pilot = "flat-top";
  std::string format = "csv";
  bool keep_negative = false;
};

int
run_estimate(const EstimateOptions& o, const Common& common, const CLI::App* sub)
{
  const TimeSeries x = o.source.load(common.seed);
  const int order = o.order;
  const LagWindow window = parse_window(
    o.window.empty() ? (order == 2 ? "trapezoid:c=0.51" : "rpf:c=0.51") : o.window);
  if (window.order() != order) {
    throw InvalidInput("window " + window.name() + " does not match --order " +
                       std::to_string(order));
  }
  const ChannelTuple ch = parse_channels(o.channels, order, x);
  std::vector<std::array<double, 2>> points = parse_points(o.at, order);
  if (o.grid > 0) {
    if (order != 3) {
      throw InvalidInput("--grid applies to --order 3");
    }
    for (const auto& w : composite_grid(o.grid)) {
      points.push_back(w);
    }
  }
  if (points.empty()) {
    points.push_back({ 0.0, 0.0 });
  }

  const std::size_t n = x.length();
  const unsigned threads = resolve_threads(common.threads);
  std::vector<double> bandwidths(points.size(), 0.0);
  const bool automatic = o.bandwidth == "auto";
  if (!automatic) {
    double M = 0.0;
    std::size_t used = 0;
    try {
      M = std::stod(o.bandwidth, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != o.bandwidth.size() || !(M > 0.0)) {
      throw InvalidInput("--bandwidth must be 'auto' or a positive number");
    }
    std::fill(bandwidths.begin(), bandwidths.end(), M);
  } else if (order == 2) {
    GeneralRuleConfig rule;
    rule.channels = { ch[0], ch[1] };
    if (o.k) {
      rule.k = *o.k;
    } else {
      BootstrapConfig boot;
      boot.channels = rule.channels;
      boot.replicates = o.bootstrap;
      boot.seed = common.seed;
      boot.threads = threads;
      rule.k = bootstrap_threshold(x, boot).k;
    }
    if (window.flat_top_radius() > 0.0) {
      rule.b = window.flat_top_radius();
    }
    std::fill(bandwidths.begin(), bandwidths.end(),
              static_cast<double>(select_bandwidth_general(x, rule).integer_bandwidth()));
  } else if (window.flat_top_radius() > 0.0) {
    auto threshold = [&](const LagVector& tau, std::uint64_t seed, std::optional<double> given) {
      if (given) {
        return *given;
      }
      BootstrapConfig boot;
      boot.tau0 = tau;
      boot.channels = ch;
      boot.replicates = o.bootstrap;
      boot.seed = seed;
      boot.threads = threads;
      return bootstrap_threshold(x, boot).k;
    };
    long M = 1;
    if (single_channel(ch)) {
      BispectrumRuleConfig rule;
      rule.k1 = threshold(bispectrum_k1_lag, common.seed, o.k1);
      rule.k2 = threshold(bispectrum_k2_lag, common.seed + 1, o.k2);
      rule.b = window.flat_top_radius();
      TimeSeries channel(std::vector<double>(x.channel(ch[0]).begin(), x.channel(ch[0]).end()));
      M = select_bandwidth_bispectrum(channel, rule).integer_bandwidth();
    } else {
      GeneralRuleConfig rule;
      rule.order = 3;
      rule.channels = ch;
      rule.k = threshold(bispectrum_k2_lag, common.seed, o.k);
      rule.b = window.flat_top_radius();
      M = select_bandwidth_general(x, rule).integer_bandwidth();
    }
    std::fill(bandwidths.begin(), bandwidths.end(), static_cast<double>(M));
  } else {
    if (!single_channel(ch)) {
      throw InvalidInput("the plug-in bandwidth needs a single channel");
    }
    if (o.pilot != "flat-top" && o.pilot != "second-order") {
      throw InvalidInput("--pilot must be flat-top or second-order");
    }
    TimeSeries channel(std::vector<double>(x.channel(ch[0]).begin(), x.channel(ch[0]).end()));
    PluginConfig pc;
    pc.k = o.k;
    pc.k1 = o.k1;
    pc.k2 = o.k2;
    pc.bootstrap_replicates = o.bootstrap;
    pc.seed = common.seed;
    const auto picks = plugin_bandwidths(
      window, channel, points,
      o.pilot == "flat-top" ? PilotKind::flat_top : PilotKind::second_order, pc);
    for (std::size_t p = 0; p < points.size(); ++p) {
      bandwidths[p] = static_cast<double>(picks[p].bandwidth);
    }
  }

  std::vector<std::complex<double>> values(points.size());
  if (order == 2) {
    SpectrumOptions so;
    so.channel_a = ch[0];
    so.channel_b = ch[1];
    so.truncate_negative = !o.keep_negative;
    std::map<double, SpectrumEstimator> cache;
    for (std::size_t p = 0; p < points.size(); ++p) {
      auto it = cache.find(bandwidths[p]);
      if (it == cache.end()) {
        it = cache.emplace(bandwidths[p], SpectrumEstimator(x, window, bandwidths[p], so)).first;
      }
      values[p] = it->second.at(points[p][0]).value;
    }
  } else {
    std::map<double, BispectrumEstimator> cache;
    for (std::size_t p = 0; p < points.size(); ++p) {
      auto it = cache.find(bandwidths[p]);
      if (it == cache.end()) {
        it = cache
               .emplace(bandwidths[p],
                        BispectrumEstimator(x, BispectrumWeights::shared(window, bandwidths[p], n),
                                            ch))
               .first;
      }
      values[p] = it->second.value(points[p][0], points[p][1]);
    }
  }

  std::ostringstream out;
  if (o.format == "json") {
    nlohmann::json j;
    j["order"] = order;
    j["window"] = window.descriptor();
    j["N"] = n;
    j["rows"] = nlohmann::json::array();
    for (std::size_t p = 0; p < points.size(); ++p) {
      nlohmann::json row;
      row["omega1"] = points[p][0];
      if (order == 3) {
        row["omega2"] = points[p][1];
      }
      row["re"] = values[p].real();
      row["im"] = values[p].imag();
      row["M"] = bandwidths[p];
      j["rows"].push_back(row);
    }
    out << j.dump(2) << "\n";
  } else if (o.format == "csv") {
    out << (order == 3 ? "omega1,omega2,re,im,M,window,N\n" : "omega,re,im,M,window,N\n");
    for (std::size_t p = 0; p < points.size(); ++p) {
      out << fmt(points[p][0]) << ',';
      if (order == 3) {
        out << fmt(points[p][1]) << ',';
      }
      out << fmt(values[p].real()) << ',' << fmt(values[p].imag()) << ',' << fmt(bandwidths[p])
          << ",\"" << window.descriptor() << "\"," << n << '\n';
    }
  } else {
    throw InvalidInput("--format must be csv or json");
  }

  if (common.output.empty()) {
    std::cout << out.str();
  } else {
    const fs::path path = resolve_output(common, common.output);
    write_file(path, out.str());
    write_sidecar(sub, path);
  }
  return exit_ok;
}

// bandwidth ------------------------------------------------------------------

struct BandwidthOptions
{
  Source source;
  std::string rule = "bispectrum";
  int order = 3;
  std::string channels;
  std::optional<double> k;
  std::optional<double> k1;
  std::optional<double> k2;
  int a_N = 5;
  int L = 5;
  double c = default_flat_top_c;
  std::string norm = "euclidean";
  std::string log_base;
  int bootstrap = 500;
  std::vector<std::string> at;
  std::string pilot = "flat-top";
  std::string window = "opt";
};

nlohmann::json
selection_json(const BandwidthSelection& sel)
{
  nlohmann::json j;
  j["rule"] = sel.rule;
  j["M_hat"] = sel.M_hat;
  j["m_hat"] = sel.m_hat;
  j["bandwidth"] = sel.integer_bandwidth();
  j["thresholds"] = sel.thresholds;
  j["cap_hit"] = sel.cap_hit;
  j["trace"] = nlohmann::json::array();
  for (const auto& t : sel.trace) {
    j["trace"].push_back({ { "tau", t.tau }, { "rho", t.rho }, { "threshold", t.threshold } });
  }
  return j;
}

int
run_bandwidth(const BandwidthOptions& o, const Common& common, const CLI::App* sub)
{
  const TimeSeries x = o.source.load(common.seed);
  const unsigned threads = resolve_threads(common.threads);
  auto bootstrap = [&](const LagVector& tau, const ChannelTuple& ch, std::uint64_t seed) {
    BootstrapConfig boot;
    boot.tau0 = tau;
    boot.channels = ch;
    boot.replicates = o.bootstrap;
    boot.seed = seed;
    boot.threads = threads;
    return bootstrap_threshold(x, boot).k;
  };
  auto log_base = [&](LogBase fallback) {
    if (o.log_base.empty()) {
      return fallback;
    }
    if (o.log_base == "10") {
      return LogBase::base10;
    }
    if (o.log_base == "e") {
      return LogBase::natural;
    }
    throw InvalidInput("--log must be 10 or e");
  };

  nlohmann::json j;
  if (o.rule == "general") {
    if (o.order != 2 && o.order != 3) {
      throw InvalidInput("--order must be 2 or 3");
    }
    GeneralRuleConfig rule;
    rule.order = o.order;
    rule.channels = parse_channels(o.channels, o.order, x);
    rule.a_N = o.a_N;
    rule.b = o.c;
    rule.log_base = log_base(LogBase::base10);
    if (o.norm == "sup") {
      rule.norm = LagNorm::sup;
    } else if (o.norm != "euclidean") {
      throw InvalidInput("--norm must be euclidean or sup");
    }
    rule.k = o.k ? *o.k : bootstrap(o.order == 2 ? LagVector{ 3 } : bispectrum_k2_lag,
                                    rule.channels, common.seed);
    j = selection_json(select_bandwidth_general(x, rule));
    j["k"] = rule.k;
  } else if (o.rule == "bispectrum") {
    BispectrumRuleConfig rule;
    rule.L = o.L;
    rule.b = o.c;
    rule.log_base = log_base(LogBase::natural);
    rule.k1 = o.k1 ? *o.k1 : bootstrap(bispectrum_k1_lag, {}, common.seed);
    rule.k2 = o.k2 ? *o.k2 : bootstrap(bispectrum_k2_lag, {}, common.seed + 1);
    j = selection_json(select_bandwidth_bispectrum(x, rule));
    j["k1"] = rule.k1;
    j["k2"] = rule.k2;
  } else if (o.rule == "plugin") {
    if (o.pilot != "flat-top" && o.pilot != "second-order") {
      throw InvalidInput("--pilot must be flat-top or second-order");
    }
    auto points = parse_points(o.at, 3);
    if (points.empty()) {
      points.push_back({ 0.0, 0.0 });
    }
    PluginConfig pc;
    pc.c = o.c;
    pc.k = o.k;
    pc.k1 = o.k1;
    pc.k2 = o.k2;
    pc.a_N = o.a_N;
    pc.L = o.L;
    pc.bootstrap_replicates = o.bootstrap;
    pc.seed = common.seed;
    const auto res = plugin_bandwidths(
      parse_window(o.window), x, points,
      o.pilot == "flat-top" ? PilotKind::flat_top : PilotKind::second_order, pc);
    j["rule"] = "plugin";
    j["pilot"] = o.pilot;
    j["points"] = nlohmann::json::array();
    for (std::size_t p = 0; p < points.size(); ++p) {
      const auto& r = res[p];
      j["points"].push_back({ { "omega", points[p] },
                              { "M_hat", r.M_hat },
                              { "bandwidth", r.bandwidth },
                              { "zero_derivative", r.zero_derivative },
                              { "spectrum_pilot_bandwidth", r.spectrum_pilot_bandwidth },
                              { "bispectrum_pilot_bandwidth", r.bispectrum_pilot_bandwidth },
                              { "spectra", r.spectra },
                              { "derivative_abs", std::abs(r.derivative_combination) } });
    }
  } else {
    throw InvalidInput("--rule must be general, bispectrum or plugin");
  }
  j["N"] = x.length();
  const std::string text = j.dump(2) + "\n";
  if (common.output.empty()) {
    std::cout << text;
  } else {
    const fs::path path = resolve_output(common, common.output);
    write_file(path, text);
    write_sidecar(sub, path);
  }
  return exit_ok;
}

// studies ----------------------------------------------------------------------

std::vector<ModelSpec>
parse_models(const std::vector<std::string>& names, std::vector<ModelSpec> fallback)
{
  if (names.empty()) {
    return fallback;
  }
  std::vector<ModelSpec> out;
  for (const auto& n : names) {
    out.push_back(parse_model(n));
  }
  return out;
}

std::optional<OracleTable>
load_oracle(const Common& common, const std::string& path, const std::vector<ModelSpec>& models)
{
  const bool needed = std::any_of(models.begin(), models.end(), [](const ModelSpec& m) {
    return !has_closed_form_bispectrum(m) || !has_closed_form_spectrum(m);
  });
  const fs::path p = resolve_output(common, path.empty() ? "oracle.csv" : path);
  if (!needed) {
    return std::nullopt;
  }
  if (!fs::exists(p)) {
    throw MissingOracle("no oracle table at '" + p.string() +
                        "'; run `flattop oracle` for the garch11 / bilinear models first");
  }
  return OracleTable::load(p.string());
}

struct StudyOptions
{
  std::vector<std::string> models;
  std::string procedures = "rpf,rcf,opt-fp,opt-sp";
  std::vector<std::string> sweep_windows;
  std::string sweep_M;
  std::string lengths = "200,2000";
  long replications = 100;
  int grid = 5;
  std::string standardization = "sqrt-product";
  std::string oracle;
  int bootstrap = 500;
};

int
run_study(const StudyOptions& o, const Common& common, const CLI::App* sub)
{
  StudyConfig cfg;
  cfg.models = parse_models(o.models, { iid_model() });
  cfg.procedures = split(o.procedures, ',');
  cfg.sweep_windows = o.sweep_windows;
  cfg.sweep_bandwidths = parse_list<double>(o.sweep_M, "--sweep-M");
  cfg.lengths = parse_list<std::size_t>(o.lengths, "--lengths");
  cfg.replications = o.replications;
  cfg.seed = common.seed;
  cfg.threads = resolve_threads(common.threads);
  cfg.grid_n = o.grid;
  cfg.standardization = parse_standardization(o.standardization);
  cfg.bootstrap_replicates = o.bootstrap;
  const auto oracle = load_oracle(common, o.oracle, cfg.models);
  cfg.oracle = oracle ? &*oracle : nullptr;

  const StudyReport report = run_mse_study(cfg);
  const fs::path base = resolve_output(common, common.output.empty() ? "study" : common.output);
  fs::path csv = base;
  csv.replace_extension(".csv");
  fs::path json = base;
  json.replace_extension(".json");
  write_file(csv, report.to_csv());
  write_file(json, report.to_json());
  write_sidecar(sub, base);
  std::cout << csv.string() << "\n";
  return exit_ok;
}

struct HistogramOptions
{
  std::vector<std::string> models;
  std::string procedures = "abcde";
  std::string lengths = "200,2000";
  long replications = 100;
  std::optional<double> benchmark;
  int bootstrap = 500;
};

int
run_histogram(const HistogramOptions& o, const Common& common, const CLI::App* sub)
{
  HistogramConfig cfg;
  cfg.models = parse_models(o.models, { iid_model() });
  cfg.procedures.clear();
  for (char ch : o.procedures) {
    cfg.procedures.push_back(parse_procedure(ch));
  }
  cfg.lengths = parse_list<std::size_t>(o.lengths, "--lengths");
  cfg.replications = o.replications;
  cfg.seed = common.seed;
  cfg.threads = resolve_threads(common.threads);
  cfg.bootstrap_replicates = o.bootstrap;
  if (o.benchmark) {
    for (const auto& m : cfg.models) {
      cfg.benchmarks[m.descriptor()] = *o.benchmark;
    }
  }
  const HistogramReport report = bandwidth_histogram_study(cfg);
  const fs::path base =
    resolve_output(common, common.output.empty() ? "histogram" : common.output);
  const std::string stem = base.filename().string();
  write_file(base.parent_path() / (stem + "_counts.csv"), report.counts_csv());
  write_file(base.parent_path() / (stem + "_summary.csv"), report.summary_csv());
  write_file(base.parent_path() / (stem + ".json"), report.to_json());
  write_sidecar(sub, base);
  std::cout << report.summary_csv();
  return exit_ok;
}

struct OracleOptions
{
  std::vector<std::string> models;
  long replications = 50;
  long length = 20000;
  int grid = 5;
  int bootstrap = 200;
};

int
run_oracle(const OracleOptions& o, const Common& common, const CLI::App* sub)
{
  const auto models = parse_models(o.models, { garch_model(), bilinear_model() });
  const fs::path path = resolve_output(common, common.output.empty() ? "oracle.csv" : common.output);
  OracleTable table;
  if (fs::exists(path)) {
    table = OracleTable::load(path.string());
  }
  OracleConfig cfg;
  cfg.replications = o.replications;
  cfg.length = o.length;
  cfg.seed = common.seed;
  cfg.threads = resolve_threads(common.threads);
  cfg.bootstrap_replicates = o.bootstrap;
  for (const auto& m : models) {
    table.merge(build_oracle(m, study_bispectrum_points(o.grid), study_spectrum_points(o.grid), cfg));
  }
  table.save(path.string());
  write_sidecar(sub, path);
  std::cout << path.string() << "\n";
  return exit_ok;
}

void
add_common(CLI::App* sub, Common& common, bool output_is_prefix)
{
  sub->add_option("--output,-o", common.output,
                  output_is_prefix ? "Output file prefix (relative to the output directory)"
                                   : "Output file (default: standard output)");
  sub->add_option("--output-dir", common.output_dir,
                  "Directory for relative outputs (default: $FLATTOP_OUTPUT_DIR or .)");
  sub->add_option("--threads,-j", common.threads, "Worker threads (0 = all cores)")
    ->capture_default_str();
  sub->add_option("--seed", common.seed, "Root random seed")->capture_default_str();
}

} // namespace

int
main(int argc, char** argv)
{
  CLI::App app{ "Flat-top spectrum and bispectrum estimation" };
  app.require_subcommand(1);
  Common common;

  EstimateOptions est;
  auto* estimate = app.add_subcommand("estimate", "Estimate a spectrum or bispectrum");
  est.source.add_options(estimate);
  estimate->add_option("--order", est.order, "2 (spectrum) or 3 (bispectrum)")
    ->check(CLI::IsMember({ 2, 3 }))
    ->capture_default_str();
  estimate->add_option("--window,-w", est.window,
                       "Lag window, e.g. rpf:c=0.51, rcf, opt, trapezoid, parzen");
  estimate->add_option("--bandwidth,-M", est.bandwidth, "auto or a positive number")
    ->capture_default_str();
  estimate->add_option("--at", est.at, "Frequency point w1[,w2]; pi literals allowed (repeatable)");
  estimate->add_option("--grid", est.grid, "Also evaluate on the n-point principal grid")
    ->check(CLI::Range(3, 1000));
  estimate->add_option("--channels", est.channels, "Channel indices, e.g. 0,1,0");
  estimate->add_option("--k", est.k, "Threshold constant of the spectrum rule (default: bootstrap)");
  estimate->add_option("--k1", est.k1, "Boundary threshold constant of the bispectrum rule");
  estimate->add_option("--k2", est.k2, "Interior threshold constant of the bispectrum rule");
  estimate->add_option("--bootstrap", est.bootstrap, "Bootstrap replicates for thresholds")
    ->capture_default_str();
  estimate->add_option("--pilot", est.pilot, "Plug-in pilots: flat-top or second-order")
    ->capture_default_str();
  estimate->add_option("--format", est.format, "csv or json")->capture_default_str();
  estimate->add_flag("--keep-negative", est.keep_negative,
                     "Do not clamp negative spectrum estimates to zero");
  add_common(estimate, common, false);

  BandwidthOptions bw;
  auto* bandwidth = app.add_subcommand("bandwidth", "Run a bandwidth selection rule");
  bw.source.add_options(bandwidth);
  bandwidth->add_option("--rule", bw.rule, "general, bispectrum or plugin")->capture_default_str();
  bandwidth->add_option("--order", bw.order, "Order for the general rule")->capture_default_str();
  bandwidth->add_option("--channels", bw.channels, "Channel indices for the general rule");
  bandwidth->add_option("--k", bw.k, "Threshold constant (general rule / spectrum pilot)");
  bandwidth->add_option("--k1", bw.k1, "Boundary threshold constant (bispectrum rule)");
  bandwidth->add_option("--k2", bw.k2, "Interior threshold constant (bispectrum rule)");
  bandwidth->add_option("--a-N", bw.a_N, "Annulus width of the general rule")->capture_default_str();
  bandwidth->add_option("--L", bw.L, "Points checked by the bispectrum rule")->capture_default_str();
  bandwidth->add_option("--c", bw.c, "Flat-top radius")->capture_default_str();
  bandwidth->add_option("--norm", bw.norm, "Lag norm: euclidean or sup")->capture_default_str();
  bandwidth->add_option("--log", bw.log_base, "Logarithm in the threshold: 10 or e");
  bandwidth->add_option("--bootstrap", bw.bootstrap, "Bootstrap replicates")->capture_default_str();
  bandwidth->add_option("--at", bw.at, "Plug-in frequency w1,w2 (repeatable)");
  bandwidth->add_option("--pilot", bw.pilot, "flat-top or second-order")->capture_default_str();
  bandwidth->add_option("--window,-w", bw.window, "Window for the plug-in rule")
    ->capture_default_str();
  add_common(bandwidth, common, false);

  StudyOptions st;
  auto* study = app.add_subcommand("study", "Monte Carlo MSE study");
  study->add_option("--model,-m", st.models, "Model (repeatable; default iid)");
  study->add_option("--procedures", st.procedures, "Comma list of rpf, rcf, opt-fp, opt-sp")
    ->capture_default_str();
  study->add_option("--sweep-window", st.sweep_windows, "Window for a fixed-M sweep (repeatable)");
  study->add_option("--sweep-M", st.sweep_M, "Comma list of fixed bandwidths");
  study->add_option("--lengths", st.lengths, "Comma list of series lengths")->capture_default_str();
  study->add_option("--replications,-R", st.replications, "Replications")
    ->check(CLI::PositiveNumber)
    ->capture_default_str();
  study->add_option("--grid", st.grid, "Principal grid size n")
    ->check(CLI::Range(3, 1000))
    ->capture_default_str();
  study->add_option("--standardization", st.standardization, "sqrt-product or product")
    ->capture_default_str();
  study->add_option("--oracle", st.oracle, "Oracle table (default: oracle.csv in the output dir)");
  study->add_option("--bootstrap", st.bootstrap, "Bootstrap replicates")->capture_default_str();
  add_common(study, common, true);

  HistogramOptions hi;
  auto* histogram = app.add_subcommand("histogram", "Compare bandwidth procedures (a)-(e)");
  histogram->add_option("--model,-m", hi.models, "Model (repeatable; default iid)");
  histogram->add_option("--procedures", hi.procedures, "Letters among abcde")
    ->capture_default_str();
  histogram->add_option("--lengths", hi.lengths, "Comma list of series lengths")
    ->capture_default_str();
  histogram->add_option("--replications,-R", hi.replications, "Replications")
    ->check(CLI::PositiveNumber)
    ->capture_default_str();
  histogram->add_option("--benchmark", hi.benchmark,
                        "Benchmark bandwidth M (required for the bilinear model)");
  histogram->add_option("--bootstrap", hi.bootstrap, "Bootstrap replicates")->capture_default_str();
  add_common(histogram, common, true);

  OracleOptions orc;
  auto* oracle = app.add_subcommand("oracle", "Simulate reference bispectra for garch / bilinear");
  oracle->add_option("--model,-m", orc.models, "Model (repeatable; default garch11 and bilinear)");
  oracle->add_option("--replications,-R", orc.replications, "Replications")
    ->check(CLI::PositiveNumber)
    ->capture_default_str();
  oracle->add_option("--length,-n", orc.length, "Length of each simulated series")
    ->capture_default_str();
  oracle->add_option("--grid", orc.grid, "Principal grid size n")
    ->check(CLI::Range(3, 1000))
    ->capture_default_str();
  oracle->add_option("--bootstrap", orc.bootstrap, "Bootstrap replicates")->capture_default_str();
  add_common(oracle, common, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_input;
  }

  try {
    if (*estimate) {
      return run_estimate(est, common, estimate);
    }
    if (*bandwidth) {
      return run_bandwidth(bw, common, bandwidth);
    }
    if (*study) {
      return run_study(st, common, study);
    }
    if (*histogram) {
      return run_histogram(hi, common, histogram);
    }
    return run_oracle(orc, common, oracle);
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_input;
  } catch (const DegenerateInput& e) {
    std::cerr << "degenerate input: " << e.what() << "\n";
    return exit_degenerate;
  } catch (const MissingOracle& e) {
    std::cerr << "missing oracle: " << e.what() << "\n";
    return exit_oracle;
  }
}
