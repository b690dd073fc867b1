#include "flattop/bandwidth.hpp"
#include "flattop/bessel.hpp"
#include "flattop/cumulants.hpp"
#include "flattop/error.hpp"
#include "flattop/eval.hpp"
#include "flattop/io.hpp"
#include "flattop/models.hpp"
#include "flattop/spectra.hpp"
#include "flattop/windows.hpp"

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace flattop;

namespace {

//! 1-D array -> one channel, 2-D (N x r) array -> r channels.
TimeSeries
to_series(const py::array_t<double, py::array::c_style | py::array::forcecast>& a)
{
  if (a.ndim() == 1) {
    return TimeSeries(std::vector<double>(a.data(), a.data() + a.shape(0)));
  }
  if (a.ndim() != 2) {
    throw InvalidInput("series must be a 1-D or 2-D array");
  }
  const auto n = static_cast<std::size_t>(a.shape(0));
  const auto r = static_cast<std::size_t>(a.shape(1));
  std::vector<std::vector<double>> channels(r, std::vector<double>(n));
  auto view = a.unchecked<2>();
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t k = 0; k < r; ++k) {
      channels[k][t] = view(static_cast<py::ssize_t>(t), static_cast<py::ssize_t>(k));
    }
  }
  return TimeSeries(std::move(channels));
}

py::array_t<double>
to_array(const TimeSeries& x)
{
  py::array_t<double> out({ static_cast<py::ssize_t>(x.length()),
                            static_cast<py::ssize_t>(x.channels()) });
  auto view = out.mutable_unchecked<2>();
  for (std::size_t k = 0; k < x.channels(); ++k) {
    const auto c = x.channel(k);
    for (std::size_t t = 0; t < x.length(); ++t) {
      view(static_cast<py::ssize_t>(t), static_cast<py::ssize_t>(k)) = c[t];
    }
  }
  if (x.channels() == 1) {
    return out.reshape({ static_cast<py::ssize_t>(x.length()) });
  }
  return out;
}

LagWindow
window_of(const py::object& w)
{
  if (py::isinstance<py::str>(w)) {
    return parse_window(w.cast<std::string>());
  }
  return w.cast<LagWindow>();
}

ModelSpec
model_of(const py::object& m)
{
  if (py::isinstance<py::str>(m)) {
    return parse_model(m.cast<std::string>());
  }
  return m.cast<ModelSpec>();
}

} // namespace

PYBIND11_MODULE(_flattop, m)
{
  m.doc() = "Flat-top spectrum and bispectrum estimation";

  auto invalid = py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<DegenerateInput>(m, "DegenerateInput", PyExc_ArithmeticError);
  py::register_exception<MissingOracle>(m, "MissingOracle", PyExc_LookupError);

  // cumulants
  m.def(
    "central_moment",
    [](py::array_t<double, py::array::c_style | py::array::forcecast> x, LagVector lags,
       std::optional<ChannelTuple> channels) {
      const TimeSeries s = to_series(x);
      return central_moment_estimate(s, channels.value_or(ChannelTuple(lags.size() + 1, 0)), lags);
    },
    py::arg("x"), py::arg("lags"), py::arg("channels") = py::none(),
    "Central-moment estimate of the cumulant at the given lags (order 2 or 3).");
  m.def(
    "joint_cumulant",
    [](py::array_t<double, py::array::c_style | py::array::forcecast> x, LagVector lags,
       std::optional<ChannelTuple> channels) {
      const TimeSeries s = to_series(x);
      return joint_cumulant_estimate(s, channels.value_or(ChannelTuple(lags.size() + 1, 0)), lags);
    },
    py::arg("x"), py::arg("lags"), py::arg("channels") = py::none(),
    "Partition-formula cumulant estimate (orders 2 to 4).");
  m.def(
    "normalized_cumulant",
    [](py::array_t<double, py::array::c_style | py::array::forcecast> x, LagVector lags,
       std::optional<ChannelTuple> channels) {
      const TimeSeries s = to_series(x);
      return normalized_cumulant(s, channels.value_or(ChannelTuple(lags.size() + 1, 0)), lags);
    },
    py::arg("x"), py::arg("lags"), py::arg("channels") = py::none());

  // windows
  py::class_<LagWindow>(m, "LagWindow")
    .def_property_readonly("name", &LagWindow::name)
    .def_property_readonly("order", &LagWindow::order)
    .def_property_readonly("flat_top_radius", &LagWindow::flat_top_radius)
    .def_property_readonly("support_radius", &LagWindow::support_radius)
    .def_property_readonly("lag_symmetric", &LagWindow::lag_symmetric)
    .def("descriptor", &LagWindow::descriptor)
    .def("__call__", py::overload_cast<double>(&LagWindow::operator(), py::const_), py::arg("x"))
    .def("__call__", py::overload_cast<double, double>(&LagWindow::operator(), py::const_),
         py::arg("x"), py::arg("y"))
    .def("__repr__", [](const LagWindow& w) { return "<LagWindow " + w.descriptor() + ">"; });
  m.def("window", &parse_window, py::arg("spec"),
        "Window from a descriptor such as 'rpf:c=0.51', 'rcf', 'opt', 'trapezoid', 'parzen'.");
  m.def("bessel_j2", &bessel_j2, py::arg("x"));

  py::class_<FlatTopReport>(m, "FlatTopReport")
    .def_readonly("flat_ok", &FlatTopReport::flat_ok)
    .def_readonly("bound_ok", &FlatTopReport::bound_ok)
    .def_readonly("b", &FlatTopReport::b)
    .def_readonly("samples", &FlatTopReport::samples)
    .def_readonly("violation_count", &FlatTopReport::violation_count)
    .def_property_readonly("passed", &FlatTopReport::passed);
  m.def(
    "validate_flat_top",
    [](const py::object& w, std::optional<double> b, bool principal_sector, double grid_step) {
      FlatTopCheck check;
      check.b = b;
      check.grid_step = grid_step;
      check.region = principal_sector ? FlatTopRegion::principal_sector : FlatTopRegion::full;
      return validate_flat_top(window_of(w), check);
    },
    py::arg("window"), py::arg("b") = py::none(), py::arg("principal_sector") = false,
    py::arg("grid_step") = 0.01);

  // spectra
  m.def(
    "spectrum",
    [](py::array_t<double, py::array::c_style | py::array::forcecast> x, const py::object& w,
       double M, std::vector<double> omegas, std::size_t a, std::size_t b) {
      SpectrumOptions opts;
      opts.channel_a = a;
      opts.channel_b = b;
      const SpectrumEstimator e(to_series(x), window_of(w), M, opts);
      std::vector<std::complex<double>> out;
      for (double om : omegas) {
        out.push_back(e.at(om).value);
      }
      return out;
    },
    py::arg("x"), py::arg("window"), py::arg("M"), py::arg("omegas"), py::arg("channel_a") = 0,
    py::arg("channel_b") = 0, "Lag-window spectrum estimates at each frequency.");
  m.def(
    "bispectrum",
    [](py::array_t<double, py::array::c_style | py::array::forcecast> x, const py::object& w,
       double M, std::vector<std::array<double, 2>> omegas, ChannelTuple channels) {
      const BispectrumEstimator e(to_series(x), window_of(w), M, channels);
      std::vector<std::complex<double>> out;
      for (const auto& om : omegas) {
        out.push_back(e.value(om[0], om[1]));
      }
      return out;
    },
    py::arg("x"), py::arg("window"), py::arg("M"), py::arg("omegas"),
    py::arg("channels") = ChannelTuple{ 0, 0, 0 }, "Lag-window bispectrum estimates.");
  m.def(
    "bispectrum_partial",
    [](py::array_t<double, py::array::c_style | py::array::forcecast> x, const py::object& w,
       double M, std::array<double, 2> omega, int i, int j) {
      return estimate_bispectrum_partial(to_series(x), window_of(w), M, omega, i, j);
    },
    py::arg("x"), py::arg("window"), py::arg("M"), py::arg("omega"), py::arg("i"), py::arg("j"));

  // bandwidth
  py::class_<BandwidthSelection::Inspected>(m, "InspectedLag")
    .def_readonly("tau", &BandwidthSelection::Inspected::tau)
    .def_readonly("rho", &BandwidthSelection::Inspected::rho)
    .def_readonly("threshold", &BandwidthSelection::Inspected::threshold);
  py::class_<BandwidthSelection>(m, "BandwidthSelection")
    .def_readonly("M_hat", &BandwidthSelection::M_hat)
    .def_readonly("m_hat", &BandwidthSelection::m_hat)
    .def_readonly("rule", &BandwidthSelection::rule)
    .def_readonly("thresholds", &BandwidthSelection::thresholds)
    .def_readonly("trace", &BandwidthSelection::trace)
    .def_readonly("cap_hit", &BandwidthSelection::cap_hit)
    .def_property_readonly("bandwidth", &BandwidthSelection::integer_bandwidth);
  m.def(
    "select_bandwidth_general",
    [](py::array_t<double, py::array::c_style | py::array::forcecast> x, int order, double k,
       int a_N, double b, std::optional<ChannelTuple> channels) {
      GeneralRuleConfig cfg;
      cfg.order = order;
      cfg.k = k;
      cfg.a_N = a_N;
      cfg.b = b;
      cfg.channels = channels.value_or(ChannelTuple{});
      return select_bandwidth_general(to_series(x), cfg);
    },
    py::arg("x"), py::arg("order") = 2, py::arg("k") = 2.0, py::arg("a_N") = 5,
    py::arg("b") = default_flat_top_c, py::arg("channels") = py::none());
  m.def(
    "select_bandwidth_bispectrum",
    [](py::array_t<double, py::array::c_style | py::array::forcecast> x, double k1, double k2,
       int L, double b) {
      BispectrumRuleConfig cfg;
      cfg.k1 = k1;
      cfg.k2 = k2;
      cfg.L = L;
      cfg.b = b;
      return select_bandwidth_bispectrum(to_series(x), cfg);
    },
    py::arg("x"), py::arg("k1") = 2.0, py::arg("k2") = 2.0, py::arg("L") = 5,
    py::arg("b") = default_flat_top_c);
  m.def("lex_point", &lex_point, py::arg("n"));
  m.def(
    "bootstrap_threshold",
    [](py::array_t<double, py::array::c_style | py::array::forcecast> x, LagVector tau0,
       int replicates, long block_length, std::uint64_t seed) {
      BootstrapConfig cfg;
      cfg.tau0 = std::move(tau0);
      cfg.replicates = replicates;
      cfg.block_length = block_length;
      cfg.seed = seed;
      return bootstrap_threshold(to_series(x), cfg).k;
    },
    py::arg("x"), py::arg("tau0") = LagVector{ 3 }, py::arg("replicates") = 500,
    py::arg("block_length") = 0, py::arg("seed") = 20240601,
    "Threshold constant k = 2 sigma from a circular block bootstrap.");
  m.def(
    "plugin_bandwidth",
    [](py::array_t<double, py::array::c_style | py::array::forcecast> x,
       std::array<double, 2> omega, const std::string& pilot, const py::object& w) {
      if (pilot != "flat-top" && pilot != "second-order") {
        throw InvalidInput("pilot must be 'flat-top' or 'second-order'");
      }
      const auto r = plugin_bandwidth(window_of(w), to_series(x), omega,
                                      pilot == "flat-top" ? PilotKind::flat_top
                                                          : PilotKind::second_order);
      return py::dict(py::arg("M_hat") = r.M_hat, py::arg("bandwidth") = r.bandwidth,
                      py::arg("zero_derivative") = r.zero_derivative);
    },
    py::arg("x"), py::arg("omega"), py::arg("pilot") = "flat-top", py::arg("window") = "opt");

  // models
  py::class_<ModelSpec>(m, "ModelSpec")
    .def_property_readonly("name", &ModelSpec::name)
    .def("descriptor", &ModelSpec::descriptor)
    .def("__repr__", [](const ModelSpec& s) { return "<ModelSpec " + s.descriptor() + ">"; });
  m.def("model", &parse_model, py::arg("spec"),
        "Model from a descriptor: iid, arma11, garch11, bilinear, ma:t1=..");
  m.def(
    "generate",
    [](const py::object& model, std::size_t N, std::uint64_t seed, std::uint64_t replication) {
      return to_array(generate(model_of(model), N, seed, replication));
    },
    py::arg("model"), py::arg("N"), py::arg("seed") = 20240601, py::arg("replication") = 0);
  m.def(
    "true_spectrum",
    [](const py::object& model, double omega) { return true_spectrum(model_of(model), omega); },
    py::arg("model"), py::arg("omega"));
  m.def(
    "reference_bispectrum",
    [](const py::object& model, std::array<double, 2> omega) {
      return reference_bispectrum(model_of(model), omega);
    },
    py::arg("model"), py::arg("omega"));

  // eval
  m.def("composite_grid", &composite_grid, py::arg("n"));
  m.def("err_lambda", &err_lambda, py::arg("estimates"), py::arg("truth"),
        py::arg("denominators"));
  m.def("parse_frequency", &parse_frequency, py::arg("text"));
  m.def(
    "run_mse_study",
    [](std::vector<std::string> models, std::vector<std::string> procedures,
       std::vector<std::size_t> lengths, long replications, std::uint64_t seed) {
      StudyConfig cfg;
      cfg.models.clear();
      for (const auto& s : models) {
        cfg.models.push_back(parse_model(s));
      }
      cfg.procedures = std::move(procedures);
      cfg.lengths = std::move(lengths);
      cfg.replications = replications;
      cfg.seed = seed;
      return run_mse_study(cfg).to_csv();
    },
    py::arg("models"), py::arg("procedures"), py::arg("lengths"), py::arg("replications"),
    py::arg("seed") = 20240601, "Monte Carlo MSE study; returns the report as CSV text.");

  (void)invalid;
}
