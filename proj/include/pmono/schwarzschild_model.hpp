#pragma once

// Mass-2 Schwarzschild in isotropic coordinates, metric (1 + 1/r)^4 delta on
// r >= 1, and its radial p-harmonic potential u_s with u_s(1) = 1.
//
// The potential is assembled from the first integral
//   u_s'(r) = -C_s r^(-2/(p-1)) (1 + 1/r)^(-2(3-p)/(p-1))
// by cumulative quadrature; the level-set variable is t = (1-p) log u_s.

#include <cstddef>
#include <vector>

#include "pmono/numerics.hpp"

namespace pmono::model {

struct ModelOptions {
  double R_max = 1e6;
  std::size_t n_points = 4096;
  numerics::Tolerances tol{};
};

/// Model quantities at one radius; L = u_s'/u_s.
struct Local {
  double r = 0.0, u = 0.0, L = 0.0, dt_dr = 0.0, dr_dt = 0.0;
  double Ws = 0.0, dWs_dr = 0.0, dWs_dt = 0.0;
};

/// Immutable after construction; safe to share across threads.
class ModelGeometry {
 public:
  ModelGeometry(double p, const ModelOptions& options = {});

  [[nodiscard]] double p() const { return p_; }
  [[nodiscard]] double flux_constant() const { return flux_; }
  [[nodiscard]] double R_max() const { return R_max_; }
  [[nodiscard]] double kappa() const { return (3.0 - p_) / (p_ - 1.0); }
  [[nodiscard]] const numerics::Tolerances& tolerances() const { return tol_; }

  // Pointwise evaluation, valid on [1, evaluation_limit()].
  [[nodiscard]] double evaluation_limit() const { return r_nodes_.back(); }
  [[nodiscard]] double u(double r) const;
  [[nodiscard]] double du(double r) const;
  [[nodiscard]] double ddu(double r) const;
  [[nodiscard]] double t(double r) const;
  [[nodiscard]] double dt_dr(double r) const;
  [[nodiscard]] double dr_dt(double r) const;
  [[nodiscard]] double Ws(double r) const;
  [[nodiscard]] double dWs_dr(double r) const;
  [[nodiscard]] double dWs_dt(double r) const;
  /// Inverse of t(r) on [0, t(evaluation_limit())]; Newton in log r.
  [[nodiscard]] double r_at_t(double t) const;

  /// Everything the coefficient system needs at one radius, sharing a
  /// single quadrature of the scaled tail.
  [[nodiscard]] Local local(double r) const;
  /// lim u_s r^kappa in closed form, C_s / kappa.
  [[nodiscard]] double c_closed_form() const { return flux_ / kappa(); }

  // Sampled curves on the log grid of [1, R_max].
  numerics::SampledCurve u_curve, du_curve;
  numerics::SampledCurve t_of_r, r_of_t;
  numerics::SampledCurve Ws_curve, dWs_curve;  // over t
  double Kp = 0.0;
  double c_fit = 0.0;    // lim u_s r^((3-p)/(p-1))
  double c_tilde = 0.0;  // lim (r + 3 - p) e^(-t/(3-p))

 private:
  double p_;
  double flux_;
  double R_max_;
  numerics::Tolerances tol_;
  std::vector<double> r_nodes_;
  std::vector<double> u_nodes_;
  std::vector<double> t_nodes_;
};

/// Integrand sigma^(-2/(p-1)) (1 + 1/sigma)^(-2(3-p)/(p-1)) of the first integral.
double flux_integrand(double p, double sigma);

/// C_s = 1 / int_1^inf flux_integrand.  Throws DomainError unless 1 < p < 2.
double flux_constant(double p, const numerics::Tolerances& tol = {});

ModelGeometry model_profile(double p, double R_max = 1e6,
                            const numerics::Tolerances& tol = {});

struct CapacityCheck {
  double Kp = 0.0;
  double surface_integral = 0.0;  // direct int_Sigma |grad u|^(p-1) da
  double max_flux_deviation = 0.0;
};

/// K_p = 4 pi C_s^(p-1), cross-checked against the horizon surface integral
/// and flux constancy along the grid.  Throws NumericalError on disagreement
/// beyond accept_rel.
CapacityCheck capacity_Kp(const ModelGeometry& model);

struct BoundaryData {
  double W0 = 0.0;
  double dW0 = 0.0;
};

/// W_s(0) and dW_s/dt(0); enforces dW_s/dt(0) = 2 W_s(0)/(p-1).
BoundaryData ws_boundary_data(const ModelGeometry& model);

struct ModelConstants {
  double c_fit = 0.0;
  double c_tilde = 0.0;
  /// c_tilde / c_fit^((p-1)/(3-p)); 1 when the exponential map is exact.
  double tilde_ratio = 0.0;
  /// c_fit / [((p-1)/(3-p)) (K_p/4pi)^(1/(p-1))]
  double closed_form_ratio = 0.0;
  /// c_fit / (K_p/4pi)^(1/(p-1)), the capacity-root normalization.
  double capacity_root_ratio = 0.0;
  double b1_fit = 0.0;
};

ModelConstants c_constants(const ModelGeometry& model);

}  // namespace pmono::model
