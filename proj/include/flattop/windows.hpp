#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace flattop {

// Closed-form kernels ------------------------------------------------------

//! Right pyramid with hexagonal base |x| + |y| + |x - y| = 2.
double lambda_rp(double x, double y);

//! Right cone with elliptical base x^2 - xy + y^2 = 1.
double lambda_rc(double x, double y);

//! Right pyramidal frustum, flat on |x| + |y| + |x - y| <= 2c.
double lambda_rpf(double x, double y, double c);

//! Right conical frustum, flat on x^2 - xy + y^2 <= c^2.
double lambda_rcf(double x, double y, double c);

//! Second-order "optimal" bispectral window 8 J_2(alpha) / alpha^2 with
//! alpha = (2 pi / sqrt 3) sqrt(x^2 - xy + y^2). Not truncated.
double lambda_opt(double x, double y);

//! Trapezoidal flat-top window: 1 on [0, c], linear down to 0 at 1, even.
double trapezoid(double t, double c);

//! Parzen window.
double parzen(double t);

// LagWindow ----------------------------------------------------------------

using WindowParams = std::map<std::string, double>;

//! An evaluable lag window lambda: R^{s-1} -> R for s in {2, 3}.
//!
//! `support_radius` bounds the sup norm of arguments with nonzero value
//! (nullopt for unbounded support). For lambda_opt it is the truncation
//! radius beyond which the window is treated as zero.
class LagWindow
{
public:
  using Eval1 = std::function<double(double)>;
  using Eval2 = std::function<double(double, double)>;

  static LagWindow one_dimensional(std::string name, Eval1 f,
                                   double flat_top_radius,
                                   std::optional<double> support_radius,
                                   WindowParams params = {});

  //! `lag_symmetric` certifies invariance under the six-element lag
  //! symmetry group.
  static LagWindow two_dimensional(std::string name, Eval2 f,
                                   double flat_top_radius,
                                   std::optional<double> support_radius,
                                   bool lag_symmetric, WindowParams params = {});

  //! Order s of the spectrum the window serves (2 for 1-D, 3 for 2-D).
  int order() const { return order_; }
  int dimension() const { return order_ - 1; }

  double operator()(double x) const;
  double operator()(double x, double y) const;

  double flat_top_radius() const { return flat_top_radius_; }
  std::optional<double> support_radius() const { return support_radius_; }
  bool lag_symmetric() const { return lag_symmetric_; }
  const std::string& name() const { return name_; }
  const WindowParams& params() const { return params_; }

  //! "name:key=value,..." (the form accepted by parse_window).
  std::string descriptor() const;

private:
  LagWindow() = default;

  int order_ = 2;
  std::string name_;
  Eval1 eval1_;
  Eval2 eval2_;
  double flat_top_radius_ = 0.0;
  std::optional<double> support_radius_;
  bool lag_symmetric_ = true;
  WindowParams params_;
};

inline constexpr double default_flat_top_c = 0.51;
inline constexpr double default_opt_tolerance = 1e-8;

LagWindow rp_window();
LagWindow rc_window();
LagWindow rpf_window(double c = default_flat_top_c);
LagWindow rcf_window(double c = default_flat_top_c);

//! lambda_opt truncated where its envelope drops below `tolerance`.
LagWindow opt_window(double tolerance = default_opt_tolerance);

LagWindow trapezoid_window(double c = default_flat_top_c);
LagWindow parzen_window();

//! Parzen lifted to the plane: P(x) P(y) P(y - x).
LagWindow parzen2d_window();

//! Build a window from "name[:key=value[,key=value...]]", e.g. "rpf:c=0.51".
//! Known names: rp, rc, rpf, rcf, opt, trapezoid, parzen, parzen2d.
LagWindow parse_window(const std::string& spec);

// Symmetrization -----------------------------------------------------------

//! One element of the lag symmetry group, acting as (x, y) -> A (x, y).
struct SymmetryMap
{
  int a, b, c, d;

  std::array<double, 2> apply(double x, double y) const
  {
    return { a * x + b * y, c * x + d * y };
  }
  std::array<long, 2> apply(long x, long y) const
  {
    return { a * x + b * y, c * x + d * y };
  }
  SymmetryMap compose(const SymmetryMap& inner) const;
  bool operator==(const SymmetryMap&) const = default;
};

//! (x,y), (y,x), (-x,y-x), (y-x,-x), (x-y,-y), (-y,x-y), in that order.
const std::array<SymmetryMap, 6>& symmetry_group();

//! The orbit representative with 0 <= tau_2 <= tau_1.
std::array<long, 2> canonical_lag(long t1, long t2);

//! Symmetric function of six arguments.
struct Combiner
{
  std::string name;
  std::function<double(const std::array<double, 6>&)> fn;
  //! True when the result vanishes as soon as one argument does; lets the
  //! symmetrized window keep a bounded support.
  bool zero_if_any_zero = false;
};

Combiner arithmetic_mean();

//! Sign-preserving geometric mean: sign(prod) |prod|^{1/6}.
Combiner geometric_mean();

//! g(lambda at the six symmetry images of (x, y)).
LagWindow symmetrize(const LagWindow& window, const Combiner& g);

//! Lift a 1-D window: g(l(x), l(y), l(-x), l(y-x), l(x-y), l(-y)).
LagWindow lift_one_dimensional(const LagWindow& window, const Combiner& g);

// Flat-top axioms ------------------------------------------------------------

enum class FlatTopRegion
{
  full,            //!< check flatness on the whole ball ||x|| <= b
  principal_sector //!< only where 0 <= y <= x (2-D windows)
};

struct FlatTopViolation
{
  double x = 0.0;
  double y = 0.0;
  double value = 0.0;
  enum class Kind { not_flat, exceeds_one } kind = Kind::not_flat;
};

struct FlatTopReport
{
  bool flat_ok = true;  //!< lambda == 1 on every sample with ||x|| <= b
  bool bound_ok = true; //!< |lambda| <= 1 on every sample
  bool passed() const { return flat_ok && bound_ok; }
  double b = 0.0;
  std::size_t samples = 0;
  std::size_t violation_count = 0;
  std::vector<FlatTopViolation> violations; //!< first few, with coordinates
};

struct FlatTopCheck
{
  double grid_step = 0.01;
  std::optional<double> b; //!< defaults to the window's flat-top radius
  FlatTopRegion region = FlatTopRegion::full;
  std::optional<double> extent; //!< half-width of the sampled box
  double tolerance = 1e-12;
};

//! Sample-grid check of lambda == 1 near the origin and |lambda| <= 1.
FlatTopReport validate_flat_top(const LagWindow& window, const FlatTopCheck& check);

} // namespace flattop
