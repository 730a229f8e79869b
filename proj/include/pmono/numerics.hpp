#pragma once

// Shared numerical primitives: sampled curves, Dormand-Prince integration
// with dense output, Gauss-Kronrod quadrature with algebraic tails, and
// power-law tail fits.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "pmono/errors.hpp"

namespace pmono::numerics {

struct Tolerances {
  double ode_rel = 1e-10;
  double quad_rel = 1e-10;
  double accept_rel = 1e-6;
  double slope_slack = 1e-8;

  /// Throws DomainError unless all entries are positive and
  /// accept_rel >= ode_rel.
  void validate() const;
};

/// Integrand ~ c * x^(-exponent) beyond `cutoff`.
struct TailSpec {
  double exponent = 2.0;
  double cutoff = 1.0;
};

/// Samples of a real function on a strictly increasing abscissa.
///
/// interpolation_order 1 is piecewise linear; 3 is a monotone
/// (Fritsch-Carlson) cubic Hermite interpolant.  Both reproduce node values
/// exactly.
class SampledCurve {
 public:
  SampledCurve() = default;
  SampledCurve(std::vector<double> abscissae, std::vector<double> values,
               int interpolation_order = 3);

  [[nodiscard]] std::span<const double> abscissae() const { return x_; }
  [[nodiscard]] std::span<const double> values() const { return y_; }
  [[nodiscard]] int interpolation_order() const { return order_; }
  [[nodiscard]] std::size_t size() const { return x_.size(); }
  [[nodiscard]] bool empty() const { return x_.empty(); }
  [[nodiscard]] double front_x() const { return x_.front(); }
  [[nodiscard]] double back_x() const { return x_.back(); }

  [[nodiscard]] double operator()(double x) const;

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> slopes_;  // cubic only
  int order_ = 3;
};

/// Throws DomainError when x is outside the sampled range.
double interpolate(const SampledCurve& curve, double x);

/// Index i with abscissae[i] <= x <= abscissae[i+1] (clamped to valid cells).
std::size_t locate_cell(std::span<const double> abscissae, double x);

std::vector<double> log_grid(double lo, double hi, std::size_t n);
std::vector<double> uniform_grid(double lo, double hi, std::size_t n);

// ---------------------------------------------------------------------------
// ODE integration

using Vector = std::vector<double>;

/// dy/dx = F(x, y); writes into dy.
using OdeRhs =
    std::function<void(double x, std::span<const double> y, std::span<double> dy)>;

/// Row-major n x n matrix A(x) for the linear system y' = A(x) y.
using MatrixFn = std::function<void(double x, std::span<double> a)>;

enum class Direction { forward, backward };

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

struct OdeOptions {
  double rel_tol = 1e-10;
  /// Components smaller than floor_fraction * max|y| are measured against
  /// that floor instead of their own magnitude.
  double floor_fraction = 1e-3;
  double initial_step = 0.0;  // 0 picks a step from the span
  std::size_t max_steps = 2'000'000;
};

/// Continuous solution returned by the Dormand-Prince 5(4) integrator.
/// Each step stores the fifth-order Hermite-type continuous extension.
class DenseSolution {
 public:
  [[nodiscard]] std::size_t dimension() const { return dim_; }
  [[nodiscard]] double x_start() const { return x_start_; }
  [[nodiscard]] double x_end() const { return x_end_; }
  [[nodiscard]] std::size_t steps() const { return step_x_.size(); }

  [[nodiscard]] Vector operator()(double x) const;
  [[nodiscard]] double component(std::size_t i, double x) const;
  [[nodiscard]] Vector final_state() const { return (*this)(x_end_); }

  /// One SampledCurve per component on an increasing grid.
  [[nodiscard]] std::vector<SampledCurve> sample(std::span<const double> grid,
                                                 int order = 3) const;

 private:
  friend DenseSolution integrate_ode(const OdeRhs&, double, double, Vector,
                                     const OdeOptions&);
  std::size_t find_step(double x) const;

  std::size_t dim_ = 0;
  double x_start_ = 0.0;
  double x_end_ = 0.0;
  bool backward_ = false;
  std::vector<double> step_x_;  // start of each step
  std::vector<double> step_h_;  // signed step length
  std::vector<double> cont_;    // 5 * dim coefficients per step
};

/// Adaptive Dormand-Prince 5(4) from x0 to x1 (x1 < x0 integrates backward).
/// Throws NumericalError on step-size underflow, reporting the location.
DenseSolution integrate_ode(const OdeRhs& rhs, double x0, double x1, Vector y0,
                            const OdeOptions& options = {});

/// y' = A(x) y over `span`, starting at span.lo (forward) or span.hi
/// (backward); local error controlled by tol.ode_rel.
DenseSolution integrate_linear_system(const MatrixFn& matrix, Vector y0,
                                      Interval span, Direction direction,
                                      const Tolerances& tol);

// ---------------------------------------------------------------------------
// Quadrature

/// Adaptive Gauss-Kronrod 7/15 on [a, b].
double quad_adaptive(const std::function<double(double)>& f, double a, double b,
                     double rel_tol, double abs_tol = 0.0);

/// Fixed 16-point Gauss-Legendre on [a, b]; for short smooth pieces.
double quad_gauss_legendre(const std::function<double(double)>& f, double a,
                           double b);

/// Integral of f over [a, inf): adaptive on [a, cutoff], analytic two-term
/// algebraic tail beyond.  Throws DomainError for exponent <= 1 and
/// NumericalError when samples beyond the cutoff do not follow the exponent.
double quad_tail(const std::function<double(double)>& f, double a,
                 const TailSpec& tail, const Tolerances& tol);

// ---------------------------------------------------------------------------
// Tail fitting

struct TailFit {
  double c0 = 0.0;
  double c1 = 0.0;
  double residual = 0.0;  // RMS of the fit misfit relative to |c0|
};

/// Fits v(x) ~ c0 * x^alpha * (1 + c1/x + c2/x^2) over the largest decade of
/// samples at or below `x_hi` (default: whole curve) and returns (c0, c1).
/// Throws NumericalError when the relative residual exceeds `max_residual`.
TailFit fit_power_tail(const SampledCurve& curve, double alpha,
                       double max_residual = 1e-7, double x_hi = 0.0);

/// Same fit on raw samples.
TailFit fit_power_tail(std::span<const double> x, std::span<const double> v,
                       double alpha, double max_residual = 1e-7,
                       double x_hi = 0.0);

}  // namespace pmono::numerics
