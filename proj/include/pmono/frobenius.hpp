#pragma once

// Frobenius series at the regular singular point r = infinity for
//   u'' + P(r) u' + Q(r) u = 0,  P = sum_k p_k r^-k (k >= 1),
//                               Q = sum_k q_k r^-k (k >= 2).
// A solution has the form r^alpha (1 + a_1/r + a_2/r^2 + ...).

#include <cstddef>
#include <vector>

namespace pmono::frobenius {

struct InfinitySingularODE {
  std::vector<double> p_coeffs;  // p_1, p_2, ...
  std::vector<double> q_coeffs;  // q_2, q_3, ...
  /// Highest series index N supported by the declared coefficients; entries
  /// beyond the vectors count as exact zeros up to this order.
  std::size_t declared_order = 0;

  [[nodiscard]] double p(std::size_t k) const;  // p_k, zero beyond truncation
  [[nodiscard]] double q(std::size_t k) const;  // q_k, zero beyond truncation
  [[nodiscard]] std::size_t truncation_order() const { return declared_order; }
  void validate() const;
};

struct IndicialRoots {
  double alpha1 = 0.0;  // larger
  double alpha2 = 0.0;
  bool integer_gap = false;
};

struct FrobeniusSolution {
  double root = 0.0;
  std::vector<double> coefficients;  // a_1 .. a_N (shorter if stopped at resonance)
  bool resonance_flag = false;
  std::size_t resonant_index = 0;  // 0 when no resonance
  bool stopped = false;            // recurrence inconsistent at resonant_index

  /// r^root (1 + sum a_k r^-k) and its first two derivatives.
  [[nodiscard]] double value(double r) const;
  [[nodiscard]] double derivative(double r) const;
  [[nodiscard]] double second_derivative(double r) const;
};

/// Roots of alpha(alpha - 1) + p_1 alpha + q_2 = 0, larger first.
/// Throws NumericalError on complex roots.
IndicialRoots indicial_roots(const InfinitySingularODE& ode);

/// Coefficients a_1..a_N from the recurrence.  When the recurrence pivot
/// vanishes at index n the resonance is flagged; if the right-hand side also
/// vanishes the free coefficient is set to zero and the series continues,
/// otherwise computation stops at n (stopped = true).
FrobeniusSolution series_coefficients(const InfinitySingularODE& ode, double root,
                                      std::size_t N);

/// Throws NumericalError when `sol` stopped before reaching N coefficients.
void require_complete(const FrobeniusSolution& sol, std::size_t N);

/// ODE residual of the truncated series at r.
double series_residual(const InfinitySingularODE& ode, const FrobeniusSolution& sol,
                       double r);

// Series data for the two radial equations on mass-2 Schwarzschild.

/// (p-1) u'' + (2/r + 2(p-3)/(r + r^2)) u' = 0, normalized by (p-1).
InfinitySingularODE potential_equation(double p, std::size_t order = 6);

/// g'' - (a'/a + c) g' - a b g = 0 with the two-term expansions of a, b, c.
InfinitySingularODE coefficient_equation(double p);

}  // namespace pmono::frobenius
