#include "pmono/frobenius.hpp"

#include <cmath>
#include <sstream>

#include "pmono/errors.hpp"

namespace pmono::frobenius {

double InfinitySingularODE::p(std::size_t k) const {
  if (k == 0 || k > p_coeffs.size()) return 0.0;
  return p_coeffs[k - 1];
}

double InfinitySingularODE::q(std::size_t k) const {
  if (k < 2 || k - 2 >= q_coeffs.size()) return 0.0;
  return q_coeffs[k - 2];
}

void InfinitySingularODE::validate() const {
  for (double v : p_coeffs)
    if (!std::isfinite(v)) throw DomainError("InfinitySingularODE: non-finite p_k");
  for (double v : q_coeffs)
    if (!std::isfinite(v)) throw DomainError("InfinitySingularODE: non-finite q_k");
}

IndicialRoots indicial_roots(const InfinitySingularODE& ode) {
  ode.validate();
  // alpha^2 + (p1 - 1) alpha + q2 = 0
  const double b = ode.p(1) - 1.0;
  const double c = ode.q(2);
  const double disc = b * b - 4.0 * c;
  if (disc < 0.0) {
    std::ostringstream msg;
    msg << "indicial_roots: complex roots (discriminant " << disc << ")";
    throw NumericalError(msg.str());
  }
  const double sq = std::sqrt(disc);
  // Stable form of the quadratic formula.
  const double qq = -0.5 * (b + std::copysign(sq, b == 0.0 ? 1.0 : b));
  double r1 = qq;
  double r2 = qq != 0.0 ? c / qq : 0.0;
  if (qq == 0.0) r2 = -b - r1;
  IndicialRoots roots;
  roots.alpha1 = std::max(r1, r2);
  roots.alpha2 = std::min(r1, r2);
  const double gap = roots.alpha1 - roots.alpha2;
  roots.integer_gap = gap > 0.5 && std::abs(gap - std::round(gap)) < 1e-9;
  return roots;
}

namespace {

double indicial_polynomial(const InfinitySingularODE& ode, double beta) {
  return beta * (beta - 1.0) + ode.p(1) * beta + ode.q(2);
}

}  // namespace

FrobeniusSolution series_coefficients(const InfinitySingularODE& ode, double root,
                                      std::size_t N) {
  ode.validate();
  if (N > ode.truncation_order()) {
    std::ostringstream msg;
    msg << "series_coefficients: N=" << N << " exceeds truncation order "
        << ode.truncation_order();
    throw DomainError(msg.str());
  }
  if (std::abs(indicial_polynomial(ode, root)) > 1e-8 * (1.0 + root * root)) {
    throw DomainError("series_coefficients: root does not solve the indicial equation");
  }
  FrobeniusSolution sol;
  sol.root = root;
  std::vector<double> a{1.0};  // a_0
  for (std::size_t n = 1; n <= N; ++n) {
    // a_n I(root - n) = - sum_{j=2}^{n+1} p_j a_{n+1-j} (root - n - 1 + j)
    //                   - sum_{j=3}^{n+2} q_j a_{n+2-j}
    double rhs = 0.0;
    double scale = 0.0;
    const double nn = static_cast<double>(n);
    for (std::size_t j = 2; j <= n + 1; ++j) {
      const double term =
          ode.p(j) * a[n + 1 - j] * (root - nn - 1.0 + static_cast<double>(j));
      rhs -= term;
      scale += std::abs(term);
    }
    for (std::size_t j = 3; j <= n + 2; ++j) {
      const double term = ode.q(j) * a[n + 2 - j];
      rhs -= term;
      scale += std::abs(term);
    }
    const double pivot = indicial_polynomial(ode, root - nn);
    const double pivot_scale = 1.0 + std::abs(root - nn) * (std::abs(root - nn) + 1.0 +
                                                           std::abs(ode.p(1)));
    if (std::abs(pivot) < 1e-10 * pivot_scale) {
      sol.resonance_flag = true;
      sol.resonant_index = n;
      if (std::abs(rhs) <= 1e-12 * (1.0 + scale)) {
        a.push_back(0.0);  // compatible: coefficient is free, no log term
        continue;
      }
      sol.stopped = true;
      break;
    }
    a.push_back(rhs / pivot);
  }
  sol.coefficients.assign(a.begin() + 1, a.end());
  return sol;
}

void require_complete(const FrobeniusSolution& sol, std::size_t N) {
  if (sol.stopped || sol.coefficients.size() < N) {
    std::ostringstream msg;
    msg << "Frobenius recurrence resonates at index " << sol.resonant_index
        << " for root " << sol.root << "; a logarithmic term would be required";
    throw NumericalError(msg.str());
  }
}

double FrobeniusSolution::value(double r) const {
  double s = 1.0;
  double rk = 1.0;
  for (double a : coefficients) {
    rk /= r;
    s += a * rk;
  }
  return std::pow(r, root) * s;
}

double FrobeniusSolution::derivative(double r) const {
  // sum_k a_k (root - k) r^(root - k - 1), a_0 = 1
  double s = root;
  double rk = 1.0;
  for (std::size_t k = 1; k <= coefficients.size(); ++k) {
    rk /= r;
    s += coefficients[k - 1] * (root - static_cast<double>(k)) * rk;
  }
  return std::pow(r, root - 1.0) * s;
}

double FrobeniusSolution::second_derivative(double r) const {
  double s = root * (root - 1.0);
  double rk = 1.0;
  for (std::size_t k = 1; k <= coefficients.size(); ++k) {
    rk /= r;
    const double e = root - static_cast<double>(k);
    s += coefficients[k - 1] * e * (e - 1.0) * rk;
  }
  return std::pow(r, root - 2.0) * s;
}

double series_residual(const InfinitySingularODE& ode, const FrobeniusSolution& sol,
                       double r) {
  double P = 0.0, Q = 0.0;
  for (std::size_t k = 1; k <= ode.p_coeffs.size(); ++k) P += ode.p(k) * std::pow(r, -double(k));
  for (std::size_t k = 2; k < ode.q_coeffs.size() + 2; ++k) Q += ode.q(k) * std::pow(r, -double(k));
  return sol.second_derivative(r) + P * sol.derivative(r) + Q * sol.value(r);
}

InfinitySingularODE potential_equation(double p, std::size_t order) {
  // 1/(r + r^2) = sum_{j>=0} (-1)^j r^(-2-j)
  InfinitySingularODE ode;
  ode.p_coeffs.push_back(2.0 / (p - 1.0));
  const double c = 2.0 * (p - 3.0) / (p - 1.0);
  for (std::size_t k = 2; k <= order + 1; ++k) {
    ode.p_coeffs.push_back(c * ((k % 2 == 0) ? 1.0 : -1.0));
  }
  ode.declared_order = order;
  return ode;
}

InfinitySingularODE coefficient_equation(double p) {
  const double m = 3.0 - p;
  // a'/a + c = p1' / r + p2' / r^2 with a, c expanded to second order.
  const double s1 = -1.0 + 2.0 * (p - 2.0) / (p - 1.0);
  const double s2 = m - (2.0 * (p - 2.0) * m / (p - 1.0) + (5.0 - p));
  // a b = (m/(p-1)) r^-2 - (2 m^2/(p-1)) r^-3
  InfinitySingularODE ode;
  ode.p_coeffs = {-s1, -s2};
  ode.q_coeffs = {-m / (p - 1.0), 2.0 * m * m / (p - 1.0)};
  ode.declared_order = 1;
  return ode;
}

}  // namespace pmono::frobenius
