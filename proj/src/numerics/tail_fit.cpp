#include <cmath>
#include <sstream>

#include "pmono/numerics.hpp"

namespace pmono::numerics {

TailFit fit_power_tail(std::span<const double> x, std::span<const double> v, double alpha,
                       double max_residual, double x_hi) {
  if (x.size() != v.size() || x.empty()) {
    throw DomainError("fit_power_tail: mismatched samples");
  }
  const double top = x_hi > 0.0 ? x_hi : x.back();
  const double bottom = top / 10.0;

  // Least squares for v x^-alpha = A + B z + C z^2 with z = top / x in [1, 10].
  double m[3][3] = {};
  double rhs[3] = {};
  std::size_t count = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < bottom || x[i] > top) continue;
    const double z = top / x[i];
    const double y = v[i] * std::pow(x[i], -alpha);
    const double basis[3] = {1.0, z, z * z};
    for (int r = 0; r < 3; ++r) {
      rhs[r] += basis[r] * y;
      for (int c = 0; c < 3; ++c) m[r][c] += basis[r] * basis[c];
    }
    ++count;
  }
  if (count < 4) throw DomainError("fit_power_tail: fewer than 4 samples in the last decade");

  // Gaussian elimination with partial pivoting on the 3x3 normal equations.
  double coef[3];
  {
    double a[3][4];
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) a[r][c] = m[r][c];
      a[r][3] = rhs[r];
    }
    for (int col = 0; col < 3; ++col) {
      int piv = col;
      for (int r = col + 1; r < 3; ++r)
        if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
      for (int c = 0; c < 4; ++c) std::swap(a[col][c], a[piv][c]);
      for (int r = col + 1; r < 3; ++r) {
        const double f = a[r][col] / a[col][col];
        for (int c = col; c < 4; ++c) a[r][c] -= f * a[col][c];
      }
    }
    for (int r = 2; r >= 0; --r) {
      double s = a[r][3];
      for (int c = r + 1; c < 3; ++c) s -= a[r][c] * coef[c];
      coef[r] = s / a[r][r];
    }
  }

  TailFit fit;
  fit.c0 = coef[0];
  fit.c1 = coef[0] != 0.0 ? coef[1] * top / coef[0] : 0.0;

  double ss = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < bottom || x[i] > top) continue;
    const double z = top / x[i];
    const double y = v[i] * std::pow(x[i], -alpha);
    const double r = y - (coef[0] + coef[1] * z + coef[2] * z * z);
    ss += r * r;
    scale = std::max(scale, std::abs(y));
  }
  fit.residual = scale > 0.0 ? std::sqrt(ss / static_cast<double>(count)) / scale : 0.0;
  if (fit.residual > max_residual) {
    std::ostringstream msg;
    msg << "fit_power_tail: relative residual " << fit.residual << " exceeds "
        << max_residual << " (alpha=" << alpha << " does not describe the tail)";
    throw NumericalError(msg.str());
  }
  return fit;
}

TailFit fit_power_tail(const SampledCurve& curve, double alpha, double max_residual,
                       double x_hi) {
  return fit_power_tail(curve.abscissae(), curve.values(), alpha, max_residual, x_hi);
}

}  // namespace pmono::numerics
