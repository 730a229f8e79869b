#include <algorithm>
#include <cmath>
#include <sstream>

#include "pmono/numerics.hpp"

namespace pmono::numerics {

namespace {

// Dormand-Prince 5(4) tableau with Hairer's continuous extension (dopri5).
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                 a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0,
                 d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0,
                 d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

}  // namespace

DenseSolution integrate_ode(const OdeRhs& rhs, double x0, double x1, Vector y0,
                            const OdeOptions& options) {
  const std::size_t n = y0.size();
  if (n == 0) throw DomainError("integrate_ode: empty state");
  if (x1 == x0) throw DomainError("integrate_ode: empty span");

  DenseSolution sol;
  sol.dim_ = n;
  sol.x_start_ = x0;
  sol.x_end_ = x1;
  sol.backward_ = x1 < x0;
  const double dir = sol.backward_ ? -1.0 : 1.0;
  const double span = std::abs(x1 - x0);

  Vector y = std::move(y0), ynew(n), ytmp(n), err(n);
  Vector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);

  double x = x0;
  rhs(x, y, k1);

  double h = options.initial_step > 0.0 ? options.initial_step : span * 1e-4;
  h = std::min(h, span);
  const double rtol = options.rel_tol;
  double fac_old = 1e-4;
  bool last_rejected = false;

  for (std::size_t step = 0;; ++step) {
    if (step >= options.max_steps) {
      std::ostringstream msg;
      msg << "integrate_ode: step budget exhausted at x=" << x;
      throw NumericalError(msg.str());
    }
    const double remaining = std::abs(x1 - x);
    bool final_step = false;
    if (h >= remaining * (1.0 - 1e-12)) {
      h = remaining;
      final_step = true;
    }
    if (h < 1e-14 * std::max(1.0, std::abs(x))) {
      std::ostringstream msg;
      msg << "integrate_ode: step-size underflow near x=" << x
          << " (stiff or singular point)";
      throw NumericalError(msg.str());
    }
    const double hs = dir * h;

    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + hs * a21 * k1[i];
    rhs(x + c2 * hs, ytmp, k2);
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
    rhs(x + c3 * hs, ytmp, k3);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(x + c4 * hs, ytmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(x + c5 * hs, ytmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                             a65 * k5[i]);
    const double xph = final_step ? x1 : x + hs;
    rhs(xph, ytmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      ynew[i] = y[i] + hs * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] +
                             a76 * k6[i]);
    rhs(xph, ynew, k7);

    double ymax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      ymax = std::max({ymax, std::abs(y[i]), std::abs(ynew[i])});
    }
    const double floor = options.floor_fraction * ymax + 1e-300;
    double e2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ei = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                              e6 * k6[i] + e7 * k7[i]);
      const double sc = rtol * std::max({std::abs(y[i]), std::abs(ynew[i]), floor});
      e2 += (ei / sc) * (ei / sc);
    }
    const double enorm = std::sqrt(e2 / static_cast<double>(n));
    if (!std::isfinite(enorm)) {
      h *= 0.1;
      last_rejected = true;
      continue;
    }

    // PI step-size control (Hairer's dopri5 defaults).
    const double fac11 = std::pow(enorm, 0.2 - 0.04 * 0.75);
    double fac = fac11 / std::pow(fac_old, 0.04);
    fac = std::clamp(fac / 0.9, 1.0 / 10.0, 1.0 / 0.2);
    double hnew = h / fac;

    if (enorm <= 1.0) {
      fac_old = std::max(enorm, 1e-4);
      sol.step_x_.push_back(x);
      sol.step_h_.push_back(hs);
      for (std::size_t i = 0; i < n; ++i) {
        const double ydiff = ynew[i] - y[i];
        const double bspl = hs * k1[i] - ydiff;
        sol.cont_.push_back(y[i]);
        sol.cont_.push_back(ydiff);
        sol.cont_.push_back(bspl);
        sol.cont_.push_back(ydiff - hs * k7[i] - bspl);
        sol.cont_.push_back(hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                  d6 * k6[i] + d7 * k7[i]));
      }
      k1 = k7;
      y = ynew;
      x = xph;
      if (final_step) break;
      if (last_rejected) hnew = std::min(hnew, h);
      last_rejected = false;
    } else {
      hnew = h / std::min(1.0 / 0.2, fac11 / 0.9);
      last_rejected = true;
    }
    h = hnew;
  }
  return sol;
}

std::size_t DenseSolution::find_step(double x) const {
  // Steps are ordered along the integration direction.
  const std::size_t m = step_x_.size();
  std::size_t lo = 0, hi = m;
  if (!backward_) {
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if (step_x_[mid] <= x) lo = mid; else hi = mid;
    }
  } else {
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if (step_x_[mid] >= x) lo = mid; else hi = mid;
    }
  }
  return lo;
}

double DenseSolution::component(std::size_t i, double x) const {
  const double lo = std::min(x_start_, x_end_);
  const double hi = std::max(x_start_, x_end_);
  const double tol = 1e-12 * std::max(1.0, std::abs(hi - lo));
  if (x < lo - tol || x > hi + tol || i >= dim_) {
    std::ostringstream msg;
    msg << "DenseSolution: x=" << x << " outside [" << lo << ", " << hi << "]";
    throw DomainError(msg.str());
  }
  const std::size_t k = find_step(x);
  const double s = std::clamp((x - step_x_[k]) / step_h_[k], 0.0, 1.0);
  const double s1 = 1.0 - s;
  const double* r = &cont_[(k * dim_ + i) * 5];
  return r[0] + s * (r[1] + s1 * (r[2] + s * (r[3] + s1 * r[4])));
}

Vector DenseSolution::operator()(double x) const {
  Vector y(dim_);
  for (std::size_t i = 0; i < dim_; ++i) y[i] = component(i, x);
  return y;
}

std::vector<SampledCurve> DenseSolution::sample(std::span<const double> grid,
                                                int order) const {
  std::vector<SampledCurve> out;
  out.reserve(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    std::vector<double> v(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) v[j] = component(i, grid[j]);
    out.emplace_back(std::vector<double>(grid.begin(), grid.end()), std::move(v), order);
  }
  return out;
}

DenseSolution integrate_linear_system(const MatrixFn& matrix, Vector y0, Interval span,
                                      Direction direction, const Tolerances& tol) {
  if (!(span.hi > span.lo)) throw DomainError("integrate_linear_system: empty span");
  const std::size_t n = y0.size();
  OdeRhs rhs = [&matrix, n, a = std::vector<double>(n * n)](
                   double x, std::span<const double> y, std::span<double> dy) mutable {
    matrix(x, a);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += a[i * n + j] * y[j];
      dy[i] = s;
    }
  };
  OdeOptions opt;
  opt.rel_tol = tol.ode_rel;
  if (direction == Direction::forward) {
    return integrate_ode(rhs, span.lo, span.hi, std::move(y0), opt);
  }
  return integrate_ode(rhs, span.hi, span.lo, std::move(y0), opt);
}

}  // namespace pmono::numerics
