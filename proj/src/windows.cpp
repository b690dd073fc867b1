#include "flattop/windows.hpp"

#include "flattop/bessel.hpp"
#include "flattop/error.hpp"
#include "flattop/params.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace flattop {

namespace {

double
positive_part(double v)
{
  return v > 0.0 ? v : 0.0;
}

void
check_c(double c)
{
  if (!(c > 0.0 && c < 1.0)) {
    throw InvalidInput("flat-top parameter c must lie in (0, 1)");
  }
}

double
quadratic_form(double x, double y)
{
  return x * x - x * y + y * y;
}

// sup-norm extent of the ellipse x^2 - xy + y^2 <= 1
const double rc_extent = 2.0 / std::sqrt(3.0);

// 8 J_2(a) / a^2 <= 8 sqrt(2 / (pi a)) / a^2 for large a; the 1.01 factor
// covers the first-order correction of the Hankel expansion.
double
opt_truncation_alpha(double tolerance)
{
  const double k = 8.0 * std::sqrt(2.0 / std::numbers::pi) * 1.01;
  return std::max(30.0, std::pow(k / tolerance, 1.0 / 2.5));
}

} // namespace

double
lambda_rp(double x, double y)
{
  if ((x >= -1.0 && x <= 0.0 && y >= -1.0 && y <= 0.0) ||
      (x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0)) {
    return positive_part(1.0 - std::max(std::abs(x), std::abs(y)));
  }
  return positive_part(1.0 - std::max(std::abs(x + y), std::abs(x - y)));
}

double
lambda_rc(double x, double y)
{
  return positive_part(1.0 - std::sqrt(quadratic_form(x, y)));
}

double
lambda_rpf(double x, double y, double c)
{
  check_c(c);
  return std::clamp(lambda_rp(x, y) / (1.0 - c) - c / (1.0 - c) * lambda_rp(x / c, y / c), 0.0, 1.0);
}

double
lambda_rcf(double x, double y, double c)
{
  check_c(c);
  return std::clamp(lambda_rc(x, y) / (1.0 - c) - c / (1.0 - c) * lambda_rc(x / c, y / c), 0.0, 1.0);
}

double
lambda_opt(double x, double y)
{
  const double alpha =
    2.0 * std::numbers::pi / std::sqrt(3.0) * std::sqrt(quadratic_form(x, y));
  if (alpha < 1e-6) {
    // 8 J_2(a) / a^2 = 1 - a^2 / 12 + O(a^4)
    return 1.0 - alpha * alpha / 12.0;
  }
  return 8.0 / (alpha * alpha) * bessel_j2(alpha);
}

double
trapezoid(double t, double c)
{
  check_c(c);
  const double a = std::abs(t);
  if (a <= c) {
    return 1.0;
  }
  if (a >= 1.0) {
    return 0.0;
  }
  return (1.0 - a) / (1.0 - c);
}

double
parzen(double t)
{
  const double a = std::abs(t);
  if (a <= 0.5) {
    return 1.0 - 6.0 * a * a + 6.0 * a * a * a;
  }
  if (a <= 1.0) {
    const double u = 1.0 - a;
    return 2.0 * u * u * u;
  }
  return 0.0;
}

// LagWindow ----------------------------------------------------------------

LagWindow
LagWindow::one_dimensional(std::string name, Eval1 f, double flat_top_radius,
                           std::optional<double> support_radius,
                           WindowParams params)
{
  LagWindow w;
  w.order_ = 2;
  w.name_ = std::move(name);
  w.eval1_ = std::move(f);
  w.flat_top_radius_ = flat_top_radius;
  w.support_radius_ = support_radius;
  w.params_ = std::move(params);
  return w;
}

LagWindow
LagWindow::two_dimensional(std::string name, Eval2 f, double flat_top_radius,
                           std::optional<double> support_radius,
                           bool lag_symmetric, WindowParams params)
{
  LagWindow w;
  w.order_ = 3;
  w.name_ = std::move(name);
  w.eval2_ = std::move(f);
  w.flat_top_radius_ = flat_top_radius;
  w.support_radius_ = support_radius;
  w.lag_symmetric_ = lag_symmetric;
  w.params_ = std::move(params);
  return w;
}

double
LagWindow::operator()(double x) const
{
  if (order_ != 2) {
    throw InvalidInput("window " + name_ + " takes two arguments");
  }
  return eval1_(x);
}

double
LagWindow::operator()(double x, double y) const
{
  if (order_ != 3) {
    throw InvalidInput("window " + name_ + " takes one argument");
  }
  return eval2_(x, y);
}

std::string
LagWindow::descriptor() const
{
  std::ostringstream out;
  out << name_;
  char sep = ':';
  for (const auto& [key, value] : params_) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", value);
    out << sep << key << '=' << buf;
    sep = ',';
  }
  return out.str();
}

LagWindow
rp_window()
{
  return LagWindow::two_dimensional("rp", lambda_rp, 0.0, 1.0, true);
}

LagWindow
rc_window()
{
  return LagWindow::two_dimensional("rc", lambda_rc, 0.0, rc_extent, true);
}

LagWindow
rpf_window(double c)
{
  check_c(c);
  return LagWindow::two_dimensional(
    "rpf", [c](double x, double y) { return lambda_rpf(x, y, c); }, c, 1.0, true,
    { { "c", c } });
}

LagWindow
rcf_window(double c)
{
  check_c(c);
  return LagWindow::two_dimensional(
    "rcf", [c](double x, double y) { return lambda_rcf(x, y, c); }, c, rc_extent,
    true, { { "c", c } });
}

LagWindow
opt_window(double tolerance)
{
  if (!(tolerance > 0.0 && tolerance < 1.0)) {
    throw InvalidInput("opt truncation tolerance must lie in (0, 1)");
  }
  const double alpha_max = opt_truncation_alpha(tolerance);
  const double kappa = 2.0 * std::numbers::pi / std::sqrt(3.0);
  const double q_max = (alpha_max / kappa) * (alpha_max / kappa);
  return LagWindow::two_dimensional(
    "opt",
    [q_max](double x, double y) {
      if (quadratic_form(x, y) > q_max) {
        return 0.0;
      }
      return lambda_opt(x, y);
    },
    0.0, alpha_max / std::numbers::pi, true, { { "tol", tolerance } });
}

LagWindow
trapezoid_window(double c)
{
  check_c(c);
  return LagWindow::one_dimensional(
    "trapezoid", [c](double t) { return trapezoid(t, c); }, c, 1.0, { { "c", c } });
}

LagWindow
parzen_window()
{
  return LagWindow::one_dimensional("parzen", parzen, 0.0, 1.0);
}

LagWindow
parzen2d_window()
{
  return LagWindow::two_dimensional(
    "parzen2d",
    [](double x, double y) { return parzen(x) * parzen(y) * parzen(y - x); }, 0.0,
    1.0, true);
}

LagWindow
parse_window(const std::string& spec)
{
  NamedParams parsed = parse_named_params(spec, "window");
  const std::string& name = parsed.name;
  auto take = [&](const std::string& key, double fallback) { return parsed.take(key, fallback); };

  std::optional<LagWindow> window;
  if (name == "rp") {
    window = rp_window();
  } else if (name == "rc") {
    window = rc_window();
  } else if (name == "rpf") {
    window = rpf_window(take("c", default_flat_top_c));
  } else if (name == "rcf") {
    window = rcf_window(take("c", default_flat_top_c));
  } else if (name == "opt") {
    window = opt_window(take("tol", default_opt_tolerance));
  } else if (name == "trapezoid") {
    window = trapezoid_window(take("c", default_flat_top_c));
  } else if (name == "parzen") {
    window = parzen_window();
  } else if (name == "parzen2d") {
    window = parzen2d_window();
  } else {
    throw InvalidInput("unknown window '" + name + "'");
  }
  parsed.expect_consumed("window");
  return *window;
}

// Symmetrization -----------------------------------------------------------

SymmetryMap
SymmetryMap::compose(const SymmetryMap& inner) const
{
  // (this o inner) = A * B
  return { a * inner.a + b * inner.c, a * inner.b + b * inner.d,
           c * inner.a + d * inner.c, c * inner.b + d * inner.d };
}

const std::array<SymmetryMap, 6>&
symmetry_group()
{
  static const std::array<SymmetryMap, 6> group = { {
    { 1, 0, 0, 1 },   // (x, y)
    { 0, 1, 1, 0 },   // (y, x)
    { -1, 0, -1, 1 }, // (-x, y - x)
    { -1, 1, -1, 0 }, // (y - x, -x)
    { 1, -1, 0, -1 }, // (x - y, -y)
    { 0, -1, 1, -1 }, // (-y, x - y)
  } };
  return group;
}

std::array<long, 2>
canonical_lag(long t1, long t2)
{
  for (const auto& g : symmetry_group()) {
    auto p = g.apply(t1, t2);
    if (0 <= p[1] && p[1] <= p[0]) {
      return p;
    }
  }
  // unreachable: the six sectors cover the plane
  throw std::logic_error("no canonical representative");
}

Combiner
arithmetic_mean()
{
  return { "mean",
           [](const std::array<double, 6>& v) {
             double s = 0.0;
             for (double x : v) {
               s += x;
             }
             return s / 6.0;
           },
           false };
}

Combiner
geometric_mean()
{
  return { "geomean",
           [](const std::array<double, 6>& v) {
             double p = 1.0;
             for (double x : v) {
               p *= x;
             }
             return std::copysign(std::pow(std::abs(p), 1.0 / 6.0), p);
           },
           true };
}

LagWindow
symmetrize(const LagWindow& window, const Combiner& g)
{
  if (window.order() != 3) {
    throw InvalidInput("symmetrize needs a two-dimensional window");
  }
  std::optional<double> support;
  if (window.support_radius()) {
    // some image lies in the sup-norm box of radius R, so |x|, |y| <= 2R
    support = g.zero_if_any_zero ? *window.support_radius()
                                 : 2.0 * *window.support_radius();
  }
  auto eval = [window, fn = g.fn](double x, double y) {
    std::array<double, 6> v{};
    const auto& group = symmetry_group();
    for (std::size_t k = 0; k < group.size(); ++k) {
      auto p = group[k].apply(x, y);
      v[k] = window(p[0], p[1]);
    }
    return fn(v);
  };
  return LagWindow::two_dimensional(window.name() + "~" + g.name, eval,
                                    window.flat_top_radius() / 2.0, support, true,
                                    window.params());
}

LagWindow
lift_one_dimensional(const LagWindow& window, const Combiner& g)
{
  if (window.order() != 2) {
    throw InvalidInput("lift_one_dimensional needs a one-dimensional window");
  }
  std::optional<double> support;
  if (g.zero_if_any_zero && window.support_radius()) {
    support = window.support_radius();
  }
  auto eval = [window, fn = g.fn](double x, double y) {
    return fn({ window(x), window(y), window(-x), window(y - x), window(x - y),
                window(-y) });
  };
  return LagWindow::two_dimensional(window.name() + "^2~" + g.name, eval,
                                    window.flat_top_radius() / 2.0, support, true,
                                    window.params());
}

// Flat-top axioms ------------------------------------------------------------

FlatTopReport
validate_flat_top(const LagWindow& window, const FlatTopCheck& check)
{
  FlatTopReport report;
  report.b = check.b.value_or(window.flat_top_radius());
  if (!(report.b > 0.0)) {
    throw InvalidInput("flat-top validation needs b > 0");
  }
  if (!(check.grid_step > 0.0)) {
    throw InvalidInput("grid step must be positive");
  }
  const double extent =
    check.extent.value_or(std::min(window.support_radius().value_or(3.0), 10.0) + 0.5);
  const long n = static_cast<long>(std::ceil(extent / check.grid_step));

  auto record = [&](double x, double y, double value, FlatTopViolation::Kind kind) {
    ++report.violation_count;
    if (report.violations.size() < 32) {
      report.violations.push_back({ x, y, value, kind });
    }
  };
  auto visit = [&](double x, double y, double value, bool in_ball, bool in_region) {
    ++report.samples;
    if (std::abs(value) > 1.0 + check.tolerance) {
      report.bound_ok = false;
      record(x, y, value, FlatTopViolation::Kind::exceeds_one);
    }
    if (in_ball && in_region && std::abs(value - 1.0) > check.tolerance) {
      report.flat_ok = false;
      record(x, y, value, FlatTopViolation::Kind::not_flat);
    }
  };

  for (long i = -n; i <= n; ++i) {
    const double x = static_cast<double>(i) * check.grid_step;
    if (window.order() == 2) {
      visit(x, 0.0, window(x), std::abs(x) <= report.b, true);
      continue;
    }
    for (long j = -n; j <= n; ++j) {
      const double y = static_cast<double>(j) * check.grid_step;
      const bool in_ball = std::hypot(x, y) <= report.b;
      const bool in_region =
        check.region == FlatTopRegion::full || (0.0 <= y && y <= x);
      visit(x, y, window(x, y), in_ball, in_region);
    }
  }
  return report;
}

} // namespace flattop
