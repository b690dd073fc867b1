#include "flattop/bandwidth.hpp"
#include "flattop/bessel.hpp"
#include "flattop/cumulants.hpp"
#include "flattop/eval.hpp"
#include "flattop/models.hpp"
#include "flattop/parallel.hpp"
#include "flattop/spectra.hpp"
#include "flattop/windows.hpp"

#include "../oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

using namespace flattop;

namespace {

constexpr double pi = std::numbers::pi;
constexpr std::uint64_t seed = 20240601;

int failures = 0;

void
report(int id, const std::string& name, bool pass, const std::string& detail, double seconds)
{
  std::printf("%s criterion %d (%s): %s [%.1f s]\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str(), seconds);
  std::fflush(stdout);
  failures += pass ? 0 : 1;
}

std::string
format(const char* fmt, auto... args)
{
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

template<class F>
void
criterion(int id, const std::string& name, F body)
{
  const auto start = std::chrono::steady_clock::now();
  bool pass = false;
  std::string detail;
  try {
    pass = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double s =
    std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report(id, name, pass, detail, s);
}

std::vector<double>
random_series(std::size_t n, std::uint64_t s)
{
  std::mt19937_64 g(s);
  std::normal_distribution<double> nd;
  std::vector<double> x(n);
  for (auto& v : x) {
    const double z = nd(g);
    v = z * z + 0.5 * z;
  }
  return x;
}

double
elapsed_since(std::chrono::steady_clock::time_point t)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

} // namespace

int
main()
{
  const unsigned threads = resolve_threads(0);

  criterion(1, "naive oracle equivalence", [](std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    const std::vector<LagWindow> bi = { rpf_window(), rcf_window(), opt_window() };
    const std::vector<LagWindow> uni = { trapezoid_window(), parzen_window() };
    const std::vector<std::array<double, 2>> points = { { 0.0, 0.0 }, { 2.0, 1.0 }, { -1.3, 0.4 } };
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto data = random_series(50, 1000 + s);
      const TimeSeries x(data);
      for (double M : { 2.0, 5.0 }) {
        for (const auto& w : bi) {
          for (const auto& p : points) {
            const auto est = estimate_bispectrum(x, w, M, p).value;
            const auto ref =
              oracle::bispectrum(data, [&](double a, double b) { return w(a, b); }, M, p[0], p[1]);
            worst = std::max(worst, std::abs(est - ref));
          }
        }
        for (const auto& w : uni) {
          for (double om : { 0.0, 1.0, 2.5 }) {
            SpectrumOptions opt;
            opt.truncate_negative = false;
            const auto est = estimate_spectrum(x, w, M, om, opt).value;
            const auto ref = oracle::spectrum(data, [&](double t) { return w(t); }, M, om);
            worst = std::max(worst, std::abs(est - ref));
          }
        }
      }
    }
    const double secs = elapsed_since(start);
    detail = format("max |difference| = %.3e (tol 1e-10), runtime %.1f s (limit 30 s)", worst, secs);
    return worst < 1e-10 && secs < 30.0;
  });

  criterion(2, "symmetry suite", [](std::string& detail) {
    bool moments_exact = true;
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
      const TimeSeries x(random_series(200, 2000 + s));
      for (long a = -12; a <= 12; ++a) {
        for (long b = -12; b <= 12; ++b) {
          const double c = central_moment_estimate(x, { a, b });
          for (const auto& g : symmetry_group()) {
            const auto q = g.apply(a, b);
            moments_exact = moments_exact && central_moment_estimate(x, { q[0], q[1] }) == c;
          }
        }
      }
      for (const auto& w : { rpf_window(), rcf_window(), opt_window() }) {
        const BispectrumEstimator est(x, w, 4.0);
        for (const auto& p : { std::array<double, 2>{ 0.4, 1.1 }, { 2.0, 1.0 }, { -0.7, 2.2 } }) {
          const double u = p[0], v = p[1];
          const auto f = est.value(u, v);
          for (const auto& z : { est.value(v, u), est.value(u, -u - v), est.value(-u - v, u),
                                 est.value(v, -u - v), est.value(-u - v, v),
                                 std::conj(est.value(-u, -v)) }) {
            worst = std::max(worst, std::abs(z - f));
          }
        }
      }
    }
    detail = format("third moments exactly symmetric: %s; max frequency-symmetry error %.3e (tol 1e-10)",
                    moments_exact ? "yes" : "no", worst);
    return moments_exact && worst < 1e-10;
  });

  criterion(3, "lexicographic points", [](std::string& detail) {
    const auto ref = oracle::lex_points(10000);
    long mismatches = 0;
    for (long n = 1; n <= 10000; ++n) {
      mismatches += lex_point(n) == ref[static_cast<std::size_t>(n - 1)] ? 0 : 1;
    }
    const bool printed = lex_point(1) == std::array<long, 2>{ 1, 0 } &&
                         lex_point(2) == std::array<long, 2>{ 2, 1 } &&
                         lex_point(3) == std::array<long, 2>{ 3, 1 } &&
                         lex_point(4) == std::array<long, 2>{ 3, 2 };
    detail = format("%ld mismatches for n <= 10000; P1..P4 = (1,0),(2,1),(3,1),(3,2): %s", mismatches,
                    printed ? "yes" : "no");
    return mismatches == 0 && printed;
  });

  criterion(4, "iid chi-square reproduction", [&](std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    StudyConfig cfg;
    cfg.models = { iid_model() };
    cfg.procedures = { "rpf" };
    cfg.lengths = { 2000 };
    cfg.replications = 100;
    cfg.seed = seed;
    cfg.threads = threads;
    const auto report = run_mse_study(cfg);
    const auto& c = report.cells.front().at(Criterion::abs_origin);
    const double target = 8.0 / (4.0 * pi * pi);
    const double rel = std::abs(c.mean_value - target) / target;
    const double ratio = c.mse / 2.887e-3;
    const double secs = elapsed_since(start);
    detail = format("mean |f(0,0)| = %.6f (target 0.202642, rel. dev. %.3f <= 0.15); MSE = %.4e "
                    "(ratio to 2.887e-03 = %.3f, within [1/3, 3]); runtime %.0f s (limit 600 s)",
                    c.mean_value, rel, c.mse, ratio, secs);
    return rel <= 0.15 && ratio >= 1.0 / 3.0 && ratio <= 3.0 && secs < 600.0;
  });

  criterion(5, "Gaussian ARMA null", [&](std::string& detail) {
    StudyConfig cfg;
    cfg.models = { arma_model() };
    cfg.procedures = { "rpf", "rcf" };
    cfg.lengths = { 2000 };
    cfg.replications = 100;
    cfg.seed = seed;
    cfg.threads = threads;
    const auto report = run_mse_study(cfg);
    bool pass = true;
    for (const auto& cell : report.cells) {
      const double im = cell.at(Criterion::im_21).mse;
      const double re = cell.at(Criterion::re_21).mse;
      pass = pass && im < 1e-5 && re < 1e-4;
      detail += format("%s: MSE Im f(2,1) = %.3e (< 1e-5), MSE Re f(2,1) = %.3e (< 1e-4); ",
                       cell.procedure.c_str(), im, re);
    }
    return pass;
  });

  std::optional<HistogramReport> histograms;
  auto histogram_report = [&]() -> const HistogramReport& {
    if (!histograms) {
      HistogramConfig cfg;
      cfg.models = { iid_model(), arma_model() };
      cfg.lengths = { 200, 2000 };
      cfg.replications = 100;
      cfg.seed = seed;
      cfg.threads = threads;
      histograms = bandwidth_histogram_study(cfg);
    }
    return *histograms;
  };

  criterion(6, "bandwidth consistency", [&](std::string& detail) {
    const auto ma = ma_model({ 1.0, 1.0 });
    std::vector<long> m(100);
    parallel_for(100, threads, [&](std::size_t r) {
      GeneralRuleConfig cfg;
      cfg.k = 2.0;
      m[r] = select_bandwidth_general(generate(ma, 5000, seed, r), cfg).m_hat;
    });
    long hits = 0;
    for (long v : m) {
      hits += v == 2 || v == 3 ? 1 : 0;
    }
    const auto& cell = histogram_report().find(iid_model().descriptor(), 2000, BandwidthProcedure::a);
    const long ones = cell.counts.count(1) ? cell.counts.at(1) : 0;
    detail = format("MA(2), N=5000: m in {2,3} in %ld/100 (>= 80); iid, N=2000: bispectrum rule "
                    "modal bandwidth %ld, bandwidth 1 in %ld/100 (>= 85)",
                    hits, cell.modal_bandwidth, ones);
    return hits >= 80 && cell.modal_bandwidth == 1 && ones >= 85;
  });

  criterion(7, "bias of the centred moment estimator", [&](std::string& detail) {
    const auto ma = ma_model({ 1.0 });
    const std::size_t N = 100;
    const long R = 2000;
    std::vector<double> c(static_cast<std::size_t>(R));
    parallel_for(c.size(), threads, [&](std::size_t r) {
      c[r] = central_moment_estimate(generate(ma, N, seed + 7, r), { 1 });
    });
    double mean = 0.0, var = 0.0;
    for (double v : c) {
      mean += v;
    }
    mean /= static_cast<double>(R);
    for (double v : c) {
      var += (v - mean) * (v - mean);
    }
    var /= static_cast<double>(R - 1);
    const double se = std::sqrt(var / static_cast<double>(R));
    const double target = (1.0 - 1.0 / static_cast<double>(N)) * 1.0;
    const double slack = 5.0 / static_cast<double>(N);
    const double dev = std::abs(mean - target);
    detail = format("mean C(1) = %.5f, (1 - 1/N) C(1) = %.5f, |diff| = %.5f <= 3 SE + 5/N = %.5f",
                    mean, target, dev, 3.0 * se + slack);
    return dev <= 3.0 * se + slack;
  });

  criterion(8, "derivative estimator", [](std::string& detail) {
    auto finite_difference = [](const BispectrumEstimator& est, std::array<double, 2> p, int i,
                                int j, double h) {
      const double e[2][2] = { { h, 0 }, { 0, h } };
      const auto* ei = e[i - 1];
      const auto* ej = e[j - 1];
      return (est.value(p[0] + ei[0] + ej[0], p[1] + ei[1] + ej[1]) -
              est.value(p[0] + ei[0] - ej[0], p[1] + ei[1] - ej[1]) -
              est.value(p[0] - ei[0] + ej[0], p[1] - ei[1] + ej[1]) +
              est.value(p[0] - ei[0] - ej[0], p[1] - ei[1] - ej[1])) /
             (4.0 * h * h);
    };
    const std::vector<std::array<double, 2>> points = { { 0.7, 0.3 }, { 2.0, 1.0 }, { -1.1, 0.6 } };

    // compactly supported windows: direct comparison at h = 1e-3
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 5; ++s) {
      const TimeSeries x(random_series(300, 3000 + s));
      for (const auto& w : { rpf_window(), rcf_window() }) {
        const BispectrumEstimator est(x, w, 3.0);
        for (const auto& p : points) {
          for (int i = 1; i <= 2; ++i) {
            for (int j = 1; j <= 2; ++j) {
              const auto an = est.partial(p[0], p[1], i, j);
              worst = std::max(worst, std::abs(finite_difference(est, p, i, j, 1e-3) - an) /
                                        std::abs(an));
            }
          }
        }
      }
    }

    // lambda_opt: exact sum and second-order convergence of the difference quotient
    const auto data = random_series(60, 3100);
    const TimeSeries x(data);
    const auto opt = opt_window();
    const BispectrumEstimator est(x, opt, 3.0);
    double oracle_gap = 0.0;
    double min_order = 1e9;
    double max_order = 0.0;
    for (const auto& p : points) {
      for (int i = 1; i <= 2; ++i) {
        for (int j = 1; j <= 2; ++j) {
          const auto an = est.partial(p[0], p[1], i, j);
          const auto ref = oracle::bispectrum(
            data, [&](double a, double b) { return opt(a, b); }, 3.0, p[0], p[1], i, j);
          oracle_gap = std::max(oracle_gap, std::abs(an - ref) / std::abs(ref));
          const double e1 = std::abs(finite_difference(est, p, i, j, 1e-3) - an);
          const double e2 = std::abs(finite_difference(est, p, i, j, 5e-4) - an);
          const double order = std::log2(e1 / e2);
          min_order = std::min(min_order, order);
          max_order = std::max(max_order, order);
        }
      }
    }
    const bool opt_ok = oracle_gap < 1e-10 && min_order > 1.8 && max_order < 2.2;
    detail = format("rpf/rcf max relative error %.3e (< 1e-4) at h = 1e-3; opt: relative gap to "
                    "the exact sum %.3e (< 1e-10), observed difference order %.2f..%.2f (expect 2)",
                    worst, oracle_gap, min_order, max_order);
    return worst < 1e-4 && opt_ok;
  });

  criterion(9, "window axioms", [](std::string& detail) {
    FlatTopCheck sector;
    sector.region = FlatTopRegion::principal_sector;
    sector.b = default_flat_top_c;
    const bool rpf = validate_flat_top(rpf_window(), sector).passed();
    const bool rcf = validate_flat_top(rcf_window(), sector).passed();
    FlatTopCheck small;
    small.b = 0.05;
    const bool opt_fails = !validate_flat_top(opt_window(), small).passed();
    double worst = 0.0;
    for (int i = 0; i <= 30000; ++i) {
      const double x = 0.001 * i;
      worst = std::max(worst, std::abs(bessel_j2(x) - oracle::bessel_j2(x)));
    }
    detail = format("rpf %s, rcf %s, opt %s; max |J2 - series| on [0,30] = %.3e (< 1e-12)",
                    rpf ? "passes" : "fails", rcf ? "passes" : "fails",
                    opt_fails ? "fails" : "passes", worst);
    return rpf && rcf && opt_fails && worst < 1e-12;
  });

  criterion(10, "procedure comparison trend", [&](std::string& detail) {
    const auto& rep = histogram_report();
    bool pass = true;
    int zero_floor = 0;
    for (const auto& model : { iid_model(), arma_model() }) {
      const auto name = model.descriptor();
      detail += model.name() + ":";
      for (auto p : all_procedures) {
        const auto& small = rep.find(name, 200, p);
        const auto& large = rep.find(name, 2000, p);
        const char letter = procedure_letter(p);
        if (p == BandwidthProcedure::d || p == BandwidthProcedure::e) {
          const bool ok = large.mean_bandwidth > small.mean_bandwidth;
          pass = pass && ok;
          detail += format(" (%c) mean M %.2f -> %.2f%s;", letter, small.mean_bandwidth,
                           large.mean_bandwidth, ok ? "" : " NOT GROWING");
        } else {
          const bool ok = large.relative_mse < small.relative_mse ||
                          (small.relative_mse == 0.0 && large.relative_mse == 0.0);
          pass = pass && ok;
          detail += format(" (%c) MSE %.3f -> %.3f%s;", letter, small.relative_mse,
                           large.relative_mse, ok ? "" : " NOT DECREASING");
          zero_floor += small.relative_mse == 0.0 && large.relative_mse == 0.0 ? 1 : 0;
        }
      }
      detail += " ";
    }
    detail += format("(%d cells already at zero MSE for both lengths)", zero_floor);
    return pass;
  });

  return failures == 0 ? 0 : 1;
}
