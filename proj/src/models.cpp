#include "flattop/models.hpp"

#include "flattop/bandwidth.hpp"
#include "flattop/error.hpp"
#include "flattop/parallel.hpp"
#include "flattop/params.hpp"
#include "flattop/random.hpp"
#include "flattop/spectra.hpp"
#include "flattop/windows.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace flattop {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double frequency_match = 1e-9;

std::string
number(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::string
exact_number(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t
stream_of(ModelKind kind)
{
  return 0x6d6f64656c00ULL + static_cast<std::uint64_t>(kind);
}

std::vector<std::string>
split_csv(const std::string& line)
{
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
    } else if (ch == ',' && !quoted) {
      out.push_back(field);
      field.clear();
    } else {
      field.push_back(ch);
    }
  }
  out.push_back(field);
  return out;
}

} // namespace

std::string
ModelSpec::name() const
{
  switch (kind) {
    case ModelKind::iid_chisq1:
      return "iid";
    case ModelKind::arma11:
      return "arma11";
    case ModelKind::garch11:
      return "garch11";
    case ModelKind::bilinear:
      return "bilinear";
    case ModelKind::ma:
      return "ma";
  }
  return "unknown";
}

std::string
ModelSpec::descriptor() const
{
  std::string out = name();
  switch (kind) {
    case ModelKind::iid_chisq1:
      break;
    case ModelKind::arma11:
      out += ":phi=" + number(phi) + ",theta=" + number(theta);
      break;
    case ModelKind::garch11:
      out += ":a0=" + number(alpha[0]) + ",a1=" + number(alpha[1]) + ",a2=" + number(alpha[2]);
      break;
    case ModelKind::bilinear:
      out += ":a=" + number(a) + ",b=" + number(b);
      break;
    case ModelKind::ma:
      for (std::size_t k = 0; k < ma_coefficients.size(); ++k) {
        out += (k == 0 ? ":t" : ",t") + std::to_string(k + 1) + "=" + number(ma_coefficients[k]);
      }
      break;
  }
  if (burn_in) {
    out += (out.find(':') == std::string::npos ? ":burn=" : ",burn=") + std::to_string(*burn_in);
  }
  return out;
}

long
ModelSpec::effective_burn_in() const
{
  if (burn_in) {
    return *burn_in;
  }
  switch (kind) {
    case ModelKind::arma11:
    case ModelKind::garch11:
    case ModelKind::bilinear:
      return 1000;
    default:
      return 0;
  }
}

void
ModelSpec::validate() const
{
  if (burn_in && *burn_in < 0) {
    throw InvalidInput("burn-in must be non-negative");
  }
  switch (kind) {
    case ModelKind::iid_chisq1:
      break;
    case ModelKind::arma11:
      if (!(std::abs(phi) < 1.0) || !std::isfinite(theta)) {
        throw InvalidInput("arma11 needs |phi| < 1, got phi = " + number(phi));
      }
      break;
    case ModelKind::garch11:
      if (!(alpha[0] > 0.0) || !(alpha[1] >= 0.0) || !(alpha[2] >= 0.0)) {
        throw InvalidInput("garch11 needs a0 > 0 and a1, a2 >= 0");
      }
      if (!(alpha[1] + alpha[2] < 1.0)) {
        throw InvalidInput("garch11 is not stationary: a1 + a2 = " +
                           number(alpha[1] + alpha[2]) + " >= 1");
      }
      break;
    case ModelKind::bilinear:
      if (!(a * a + b * b < 1.0)) {
        throw InvalidInput("bilinear model is not stationary: a^2 + b^2 = " +
                           number(a * a + b * b) + " >= 1");
      }
      break;
    case ModelKind::ma:
      for (double t : ma_coefficients) {
        if (!std::isfinite(t)) {
          throw InvalidInput("MA coefficients must be finite");
        }
      }
      break;
  }
}

ModelSpec
iid_model()
{
  return {};
}

ModelSpec
arma_model(double phi, double theta)
{
  ModelSpec m;
  m.kind = ModelKind::arma11;
  m.phi = phi;
  m.theta = theta;
  return m;
}

ModelSpec
garch_model(std::array<double, 3> alpha)
{
  ModelSpec m;
  m.kind = ModelKind::garch11;
  m.alpha = alpha;
  return m;
}

ModelSpec
bilinear_model(double a, double b)
{
  ModelSpec m;
  m.kind = ModelKind::bilinear;
  m.a = a;
  m.b = b;
  return m;
}

ModelSpec
ma_model(std::vector<double> coefficients)
{
  ModelSpec m;
  m.kind = ModelKind::ma;
  m.ma_coefficients = std::move(coefficients);
  return m;
}

ModelSpec
parse_model(const std::string& text)
{
  NamedParams parsed = parse_named_params(text, "model");
  ModelSpec m;
  const std::string& name = parsed.name;
  if (name == "iid" || name == "iid-chisq1") {
    m = iid_model();
  } else if (name == "arma11" || name == "arma") {
    m = arma_model(parsed.take("phi", 0.5), parsed.take("theta", -0.5));
  } else if (name == "garch11" || name == "garch") {
    m = garch_model({ parsed.take("a0", 0.1), parsed.take("a1", 0.8), parsed.take("a2", 0.1) });
  } else if (name == "bilinear") {
    m = bilinear_model(parsed.take("a", 0.4), parsed.take("b", 0.4));
  } else if (name == "ma") {
    std::vector<double> coefs;
    for (int k = 1; parsed.params.count("t" + std::to_string(k)) != 0; ++k) {
      coefs.push_back(parsed.take("t" + std::to_string(k), 0.0));
    }
    m = ma_model(std::move(coefs));
  } else {
    throw InvalidInput("unknown model '" + name + "'");
  }
  if (parsed.params.count("burn") != 0) {
    const double burn = parsed.take("burn", 0.0);
    if (burn < 0.0 || burn != std::floor(burn)) {
      throw InvalidInput("burn must be a non-negative integer");
    }
    m.burn_in = static_cast<long>(burn);
  }
  parsed.expect_consumed("model");
  m.validate();
  return m;
}

TimeSeries
generate(const ModelSpec& spec, std::size_t N, std::uint64_t seed, std::uint64_t replication)
{
  spec.validate();
  if (N < 1) {
    throw InvalidInput("series length must be at least 1");
  }
  auto engine = make_engine(seed, stream_of(spec.kind), replication);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto burn = static_cast<std::size_t>(spec.effective_burn_in());
  const std::size_t total = N + burn;
  std::vector<double> out(N);
  auto keep = [&](std::size_t t, double x) {
    if (t >= burn) {
      out[t - burn] = x;
    }
  };

  switch (spec.kind) {
    case ModelKind::iid_chisq1:
      for (std::size_t t = 0; t < total; ++t) {
        const double z = normal(engine);
        keep(t, z * z);
      }
      break;
    case ModelKind::arma11: {
      double x = 0.0;
      double z_prev = 0.0;
      for (std::size_t t = 0; t < total; ++t) {
        const double z = normal(engine);
        x = spec.phi * x + spec.theta * z_prev + z;
        z_prev = z;
        keep(t, x);
      }
      break;
    }
    case ModelKind::garch11: {
      double h = spec.alpha[0] / (1.0 - spec.alpha[1] - spec.alpha[2]);
      double x = 0.0;
      for (std::size_t t = 0; t < total; ++t) {
        if (t > 0) {
          h = spec.alpha[0] + spec.alpha[1] * x * x + spec.alpha[2] * h;
        }
        x = std::sqrt(h) * normal(engine);
        keep(t, x);
      }
      break;
    }
    case ModelKind::bilinear: {
      double x = 0.0;
      double z_prev = 0.0;
      for (std::size_t t = 0; t < total; ++t) {
        const double z = normal(engine);
        x = spec.a * x + spec.b * x * z_prev + z;
        z_prev = z;
        keep(t, x);
      }
      break;
    }
    case ModelKind::ma: {
      const std::size_t q = spec.ma_coefficients.size();
      std::vector<double> z(total + q);
      for (auto& v : z) {
        v = normal(engine);
      }
      for (std::size_t t = 0; t < total; ++t) {
        double x = z[t + q];
        for (std::size_t k = 0; k < q; ++k) {
          x += spec.ma_coefficients[k] * z[t + q - k - 1];
        }
        keep(t, x);
      }
      break;
    }
  }
  return TimeSeries(std::move(out), spec.name());
}

// Oracle table -----------------------------------------------------------------

void
OracleTable::add(OracleRow row)
{
  rows_.push_back(std::move(row));
}

std::optional<std::complex<double>>
OracleTable::lookup(const std::string& model, int order, double omega1, double omega2) const
{
  for (const auto& r : rows_) {
    if (r.model == model && r.order == order && std::abs(r.omega1 - omega1) < frequency_match &&
        std::abs(r.omega2 - omega2) < frequency_match) {
      return std::complex<double>(r.re, r.im);
    }
  }
  return std::nullopt;
}

void
OracleTable::merge(const OracleTable& other)
{
  for (const auto& row : other.rows_) {
    bool replaced = false;
    for (auto& r : rows_) {
      if (r.model == row.model && r.order == row.order &&
          std::abs(r.omega1 - row.omega1) < frequency_match &&
          std::abs(r.omega2 - row.omega2) < frequency_match) {
        r = row;
        replaced = true;
        break;
      }
    }
    if (!replaced) {
      rows_.push_back(row);
    }
  }
}

void
OracleTable::save(const std::string& path) const
{
  std::ofstream out(path);
  if (!out) {
    throw InvalidInput("cannot write oracle table '" + path + "'");
  }
  out << "# flattop-oracle v" << version << "\n";
  out << "model,order,omega1,omega2,re,im,replications,length,seed\n";
  for (const auto& r : rows_) {
    out << '"' << r.model << "\"," << r.order << ',' << exact_number(r.omega1) << ','
        << exact_number(r.omega2) << ',' << exact_number(r.re) << ',' << exact_number(r.im)
        << ',' << r.replications << ',' << r.length << ',' << r.seed << "\n";
  }
}

OracleTable
OracleTable::load(const std::string& path)
{
  std::ifstream in(path);
  if (!in) {
    throw MissingOracle("oracle table '" + path + "' not found; run `flattop oracle` first");
  }
  std::string line;
  std::getline(in, line);
  const std::string tag = "# flattop-oracle v";
  if (line.rfind(tag, 0) != 0) {
    throw InvalidInput("'" + path + "' is not an oracle table");
  }
  if (std::stoi(line.substr(tag.size())) != version) {
    throw InvalidInput("oracle table '" + path + "' has unsupported version " +
                       line.substr(tag.size()));
  }
  std::getline(in, line);
  OracleTable table;
  long lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) {
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != 9) {
      throw InvalidInput(path + ":" + std::to_string(lineno) + ": expected 9 fields");
    }
    try {
      OracleRow r;
      r.model = f[0];
      r.order = std::stoi(f[1]);
      r.omega1 = std::stod(f[2]);
      r.omega2 = std::stod(f[3]);
      r.re = std::stod(f[4]);
      r.im = std::stod(f[5]);
      r.replications = std::stol(f[6]);
      r.length = std::stol(f[7]);
      r.seed = std::stoull(f[8]);
      table.add(std::move(r));
    } catch (const std::logic_error&) {
      throw InvalidInput(path + ":" + std::to_string(lineno) + ": malformed number");
    }
  }
  return table;
}

// Reference values -----------------------------------------------------------

bool
has_closed_form_spectrum(const ModelSpec& spec)
{
  return spec.kind != ModelKind::bilinear;
}

bool
has_closed_form_bispectrum(const ModelSpec& spec)
{
  return spec.kind == ModelKind::iid_chisq1 || spec.kind == ModelKind::arma11 ||
         spec.kind == ModelKind::ma;
}

double
true_spectrum(const ModelSpec& spec, double omega, const OracleTable* oracle)
{
  switch (spec.kind) {
    case ModelKind::iid_chisq1:
      return 2.0 / two_pi;
    case ModelKind::arma11: {
      const std::complex<double> e = std::polar(1.0, -omega);
      return std::norm(1.0 + spec.theta * e) / std::norm(1.0 - spec.phi * e) / two_pi;
    }
    case ModelKind::garch11:
      return spec.alpha[0] / (1.0 - spec.alpha[1] - spec.alpha[2]) / two_pi;
    case ModelKind::ma: {
      std::complex<double> t = 1.0;
      for (std::size_t k = 0; k < spec.ma_coefficients.size(); ++k) {
        t += spec.ma_coefficients[k] * std::polar(1.0, -omega * static_cast<double>(k + 1));
      }
      return std::norm(t) / two_pi;
    }
    case ModelKind::bilinear:
      break;
  }
  if (oracle != nullptr) {
    if (auto v = oracle->lookup(spec.descriptor(), 2, omega)) {
      return v->real();
    }
  }
  throw MissingOracle("no reference spectrum for " + spec.descriptor() + " at omega = " +
                      number(omega) + "; run `flattop oracle` first");
}

std::complex<double>
reference_bispectrum(const ModelSpec& spec, std::array<double, 2> omega,
                     const OracleTable* oracle)
{
  switch (spec.kind) {
    case ModelKind::iid_chisq1:
      return 8.0 / (two_pi * two_pi);
    case ModelKind::arma11:
    case ModelKind::ma:
      return 0.0;
    default:
      break;
  }
  if (oracle != nullptr) {
    if (auto v = oracle->lookup(spec.descriptor(), 3, omega[0], omega[1])) {
      return *v;
    }
  }
  throw MissingOracle("no reference bispectrum for " + spec.descriptor() + " at (" +
                      number(omega[0]) + ", " + number(omega[1]) +
                      "); run `flattop oracle` first");
}

OracleTable
build_oracle(const ModelSpec& spec, const std::vector<std::array<double, 2>>& bispectrum_points,
             const std::vector<double>& spectrum_points, const OracleConfig& config)
{
  spec.validate();
  if (config.replications < 1 || config.length < 16) {
    throw InvalidInput("oracle needs at least one replication of length >= 16");
  }
  const bool with_spectrum = !has_closed_form_spectrum(spec) && !spectrum_points.empty();
  const std::size_t nb = bispectrum_points.size();
  const std::size_t ns = with_spectrum ? spectrum_points.size() : 0;
  const auto reps = static_cast<std::size_t>(config.replications);
  const auto length = static_cast<std::size_t>(config.length);
  std::vector<std::vector<std::complex<double>>> bis(reps);
  std::vector<std::vector<double>> spec_values(reps);
  const LagWindow rpf = rpf_window(config.c);
  const LagWindow rcf = rcf_window(config.c);
  const LagWindow trap = trapezoid_window(config.c);

  parallel_for(reps, config.threads, [&](std::size_t r) {
    const TimeSeries x = generate(spec, length, config.seed, r);
    auto sub = make_engine(config.seed, 0x6f7261636c65ULL, r);

    BootstrapConfig boot;
    boot.replicates = config.bootstrap_replicates;
    BispectrumRuleConfig rule;
    rule.b = config.c;
    boot.tau0 = bispectrum_k1_lag;
    boot.seed = sub();
    rule.k1 = bootstrap_threshold(x, boot).k;
    boot.tau0 = bispectrum_k2_lag;
    boot.seed = sub();
    rule.k2 = bootstrap_threshold(x, boot).k;
    const double M = static_cast<double>(select_bandwidth_bispectrum(x, rule).integer_bandwidth());

    const BispectrumEstimator e1(x, BispectrumWeights::shared(rpf, M, length));
    const BispectrumEstimator e2(x, BispectrumWeights::shared(rcf, M, length));
    bis[r].resize(nb);
    for (std::size_t p = 0; p < nb; ++p) {
      const auto& w = bispectrum_points[p];
      bis[r][p] = 0.5 * (e1.value(w[0], w[1]) + e2.value(w[0], w[1]));
    }

    if (ns > 0) {
      GeneralRuleConfig general;
      general.b = config.c;
      boot.tau0 = { 3 };
      boot.seed = sub();
      general.k = bootstrap_threshold(x, boot).k;
      const double Ms =
        static_cast<double>(select_bandwidth_general(x, general).integer_bandwidth());
      const SpectrumEstimator s(x, trap, Ms);
      spec_values[r].resize(ns);
      for (std::size_t p = 0; p < ns; ++p) {
        spec_values[r][p] = s.at(spectrum_points[p]).value.real();
      }
    }
  });

  OracleTable table;
  const double inv = 1.0 / static_cast<double>(reps);
  for (std::size_t p = 0; p < nb; ++p) {
    std::complex<double> sum = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      sum += bis[r][p];
    }
    sum *= inv;
    table.add({ spec.descriptor(), 3, bispectrum_points[p][0], bispectrum_points[p][1],
                sum.real(), sum.imag(), config.replications, config.length, config.seed });
  }
  for (std::size_t p = 0; p < ns; ++p) {
    double sum = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      sum += spec_values[r][p];
    }
    table.add({ spec.descriptor(), 2, spectrum_points[p], 0.0, sum * inv, 0.0,
                config.replications, config.length, config.seed });
  }
  return table;
}

} // namespace flattop
