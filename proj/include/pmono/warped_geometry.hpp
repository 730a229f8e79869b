#pragma once

// Rotationally symmetric metrics ds^2 + phi(s)^2 g_0 on [0, inf) x S^2:
// curvature, radial p-harmonic potential, capacity, masses, and the
// level-set flow quantities entering the W inequality.
//
// Every family here is exactly Schwarzschild outside a compact set, so the
// profile beyond s_max is evaluated from the closed-form exterior
//   s(phi) = sqrt(phi (phi - 2M)) + 2M log(sqrt(phi) + sqrt(phi - 2M)) + const.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "pmono/numerics.hpp"

namespace pmono::warp {

struct WarpPoint {
  double phi = 0.0;
  double dphi = 0.0;
  double ddphi = 0.0;
  double hawking = 0.0;  // (phi/2)(1 - phi'^2)
};

/// C^2 hump (1 - x^2)^3 on [s1, s2], x the affine map to [-1, 1].
struct Bump {
  double s1 = 1.0;
  double s2 = 4.0;
  [[nodiscard]] double operator()(double s) const;
  void validate() const;
};

class WarpProfile {
 public:
  using Evaluator = std::function<WarpPoint(double)>;

  /// A profile from an explicit evaluator on [0, inf).
  WarpProfile(std::string family, Evaluator eval, bool minimal_boundary,
              double af_exponent, std::vector<double> breakpoints = {});

  [[nodiscard]] WarpPoint at(double s) const { return eval_(s); }
  [[nodiscard]] double phi(double s) const { return eval_(s).phi; }
  [[nodiscard]] double dphi(double s) const { return eval_(s).dphi; }
  [[nodiscard]] double ddphi(double s) const { return eval_(s).ddphi; }
  [[nodiscard]] double hawking(double s) const { return eval_(s).hawking; }

  [[nodiscard]] const std::string& family() const { return family_; }
  [[nodiscard]] bool minimal_boundary() const { return minimal_; }
  [[nodiscard]] double af_exponent() const { return af_exponent_; }
  /// Points where the profile is only finitely smooth (quadrature cell edges).
  [[nodiscard]] const std::vector<double>& breakpoints() const { return breaks_; }
  /// Mass of the exact Schwarzschild exterior, if the family has one.
  [[nodiscard]] bool has_exterior() const { return has_exterior_; }
  [[nodiscard]] double exterior_mass() const { return exterior_mass_; }
  [[nodiscard]] double exterior_start() const { return exterior_start_; }

  /// Scalar curvature 2(1 - phi'^2)/phi^2 - 4 phi''/phi.
  [[nodiscard]] double scalar_curvature(double s) const;

  /// (lambda phi)(s / lambda): the metric scaled by lambda^2.
  [[nodiscard]] WarpProfile scaled(double lambda) const;

 private:
  friend WarpProfile with_exterior(WarpProfile, double, double);
  std::string family_;
  Evaluator eval_;
  bool minimal_ = false;
  double af_exponent_ = 1.0;
  std::vector<double> breaks_;
  bool has_exterior_ = false;
  double exterior_mass_ = 0.0;
  double exterior_start_ = 0.0;
};

/// Schwarzschild of mass m: phi(0) = 2m, phi'(0) = 0, phi'' = (1 - phi'^2)/(2 phi)
/// integrated on [0, s_max], closed-form exterior beyond.
WarpProfile family_schwarzschild(double m, double s_max = 0.0);

/// phi'' = (1 - phi'^2)/(2 phi) - eps bump/(2 phi), phi(0) = 2 m0, phi'(0) = 0,
/// so R = 2 eps bump / phi^2.  eps < 0 is accepted (R < 0 inside the bump) so
/// that hypothesis checks can reject it downstream.  Throws DomainError when
/// phi' leaves (0, 1) or the bump is not inside (0, s_max).
WarpProfile family_bumped(double m0, double eps, const Bump& bump = {}, double s_max = 0.0);

/// Flat exterior of the sphere of radius a: phi = a + s (boundary not minimal).
WarpProfile family_euclidean(double radius = 1.0);

/// Samples of R on a grid.
numerics::SampledCurve scalar_curvature(const WarpProfile& warp, std::span<const double> s_grid);

/// Radial p-harmonic potential with u(0) = 1, u -> 0:
///   u' = -C phi^(-2/(p-1)),  u(s) = C int_s^inf phi^(-2/(p-1)).
class RadialPotential {
 public:
  RadialPotential(std::shared_ptr<const WarpProfile> warp, double p,
                  const numerics::Tolerances& tol = {});

  [[nodiscard]] double p() const { return p_; }
  [[nodiscard]] double flux_constant() const { return C_; }
  [[nodiscard]] double u(double s) const;
  [[nodiscard]] double du(double s) const;
  /// -u'/u without forming u' and u separately at large s.
  [[nodiscard]] double v(double s) const;
  [[nodiscard]] const WarpProfile& warp() const { return *warp_; }

  /// Nodes of the cumulative quadrature.
  [[nodiscard]] const std::vector<double>& nodes() const { return nodes_; }

 private:
  double tail_integral(double s) const;  // int_s^inf phi^-k

  std::shared_ptr<const WarpProfile> warp_;
  double p_;
  double k_;
  numerics::Tolerances tol_;
  std::vector<double> nodes_;
  std::vector<double> cumulative_;  // int_{node}^inf phi^-k
  double C_ = 0.0;
};

RadialPotential radial_p_harmonic(const WarpProfile& warp, double p,
                                  const numerics::Tolerances& tol = {});

/// C_p = 4 pi C^(p-1).
double capacity_Cp(const WarpProfile& warp, double p, const numerics::Tolerances& tol = {});

struct Masses {
  numerics::SampledCurve hawking;  // over s
  double adm = 0.0;
};

/// Hawking mass on a grid and its limit (tail fit in phi).
Masses masses(const WarpProfile& warp, double s_far = 1e6);

struct FlowOptions {
  double dt = 0.01;     // uniform t spacing
  double s_far = 1e6;   // the grid ends at t(s_far)
  numerics::Tolerances tol{};
};

/// Level-set flow data on a uniform t-grid.  All t-derivatives are analytic
/// in terms of phi, phi', phi'' and v = -u'/u.
struct FlowProfile {
  double p = 0.0;
  double Cp = 0.0;
  double adm = 0.0;
  double flux_constant = 0.0;
  std::vector<double> t, s, phi, dphi, u, du, W, dWdt, d2Wdt2, H, R, hawking;

  [[nodiscard]] std::size_t size() const { return t.size(); }
  [[nodiscard]] numerics::SampledCurve curve(const std::vector<double>& column) const;
};

/// Throws HypothesisError unless the boundary is minimal.
FlowProfile level_flow(const WarpProfile& warp, double p, const FlowOptions& options = {});

struct WResidual {
  numerics::SampledCurve residual;  // over t
  double identity_gap = 0.0;        // max |residual - 2 pi (3-p)^2 R phi^2|
  double min_residual = 0.0;
  /// max |W'' analytic - W'' five-point| over interior nodes, relative to
  /// 4 pi (3-p)^2.
  double fd_gap = 0.0;
};

/// (p-1)(3-p) W'' - W + 4 pi (3-p)^2 - 2(2-p) W' - ((p-1)(5-p)/4) W'^2 / W.
WResidual w_inequality_residual(const FlowProfile& flow);

/// u phi^((3-p)/(p-1)) -> ((p-1)/(3-p)) (C_p/4pi)^(1/(p-1)): fitted limit and
/// the closed-form value.
struct PotentialAsymptote {
  double fitted = 0.0;
  double predicted = 0.0;
};
PotentialAsymptote potential_asymptote(const WarpProfile& warp, double p,
                                       const numerics::Tolerances& tol = {});

}  // namespace pmono::warp
