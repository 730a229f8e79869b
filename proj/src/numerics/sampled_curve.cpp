#include <algorithm>
#include <cmath>
#include <sstream>

#include "pmono/numerics.hpp"

namespace pmono::numerics {

void Tolerances::validate() const {
  if (!(ode_rel > 0.0 && quad_rel > 0.0 && accept_rel > 0.0 && slope_slack > 0.0)) {
    throw DomainError("tolerances must be strictly positive");
  }
  if (accept_rel < ode_rel) {
    throw DomainError("accept_rel must be >= ode_rel");
  }
}

namespace {

// Fritsch-Carlson limited slopes.
std::vector<double> monotone_slopes(const std::vector<double>& x,
                                    const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  std::vector<double> delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    delta[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
  }
  if (n == 2) {
    d[0] = d[1] = delta[0];
    return d;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      d[i] = 0.0;
    } else {
      const double h0 = x[i] - x[i - 1];
      const double h1 = x[i + 1] - x[i];
      const double w1 = 2.0 * h1 + h0;
      const double w2 = h1 + 2.0 * h0;
      d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  auto end_slope = [](double h0, double h1, double m0, double m1) {
    double s = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if (s * m0 <= 0.0) {
      s = 0.0;
    } else if (m0 * m1 <= 0.0 && std::abs(s) > 3.0 * std::abs(m0)) {
      s = 3.0 * m0;
    }
    return s;
  };
  d[0] = end_slope(x[1] - x[0], x[2] - x[1], delta[0], delta[1]);
  d[n - 1] = end_slope(x[n - 1] - x[n - 2], x[n - 2] - x[n - 3], delta[n - 2],
                       delta[n - 3]);
  return d;
}

}  // namespace

SampledCurve::SampledCurve(std::vector<double> abscissae, std::vector<double> values,
                           int interpolation_order)
    : x_(std::move(abscissae)), y_(std::move(values)), order_(interpolation_order) {
  if (x_.size() != y_.size()) {
    throw DomainError("SampledCurve: abscissae and values differ in length");
  }
  if (x_.size() < 2) {
    throw DomainError("SampledCurve: need at least two samples");
  }
  for (std::size_t i = 1; i < x_.size(); ++i) {
    if (!(x_[i] > x_[i - 1])) {
      std::ostringstream msg;
      msg << "SampledCurve: abscissae not strictly increasing at index " << i;
      throw DomainError(msg.str());
    }
  }
  if (order_ != 1 && order_ != 3) {
    throw DomainError("SampledCurve: interpolation order must be 1 or 3");
  }
  if (order_ == 3) slopes_ = monotone_slopes(x_, y_);
}

std::size_t locate_cell(std::span<const double> abscissae, double x) {
  const auto it = std::upper_bound(abscissae.begin(), abscissae.end(), x);
  std::size_t i = static_cast<std::size_t>(it - abscissae.begin());
  if (i == 0) return 0;
  i -= 1;
  return std::min(i, abscissae.size() - 2);
}

double SampledCurve::operator()(double x) const {
  if (x < x_.front() || x > x_.back() || std::isnan(x)) {
    std::ostringstream msg;
    msg << "interpolate: x=" << x << " outside [" << x_.front() << ", " << x_.back()
        << "]";
    throw DomainError(msg.str());
  }
  const std::size_t i = locate_cell(x_, x);
  const double h = x_[i + 1] - x_[i];
  const double s = (x - x_[i]) / h;
  if (s == 0.0) return y_[i];
  if (s == 1.0) return y_[i + 1];
  if (order_ == 1) return y_[i] + s * (y_[i + 1] - y_[i]);
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  return h00 * y_[i] + h10 * h * slopes_[i] + h01 * y_[i + 1] + h11 * h * slopes_[i + 1];
}

double interpolate(const SampledCurve& curve, double x) { return curve(x); }

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0 && hi > lo) || n < 2) throw DomainError("log_grid: bad range");
  std::vector<double> g(n);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
  if (!(hi > lo) || n < 2) throw DomainError("uniform_grid: bad range");
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  g.back() = hi;
  return g;
}

}  // namespace pmono::numerics
