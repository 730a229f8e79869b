#pragma once

// Coefficient functions f, g, h of the monotone quantity
//   Q = 4 pi (3-p)^2 f + g W + (p-1)(3-p) h dW/dt
// obtained from the linear system that makes Q constant on mass-2
// Schwarzschild.  In the radial coordinate the system reads
//   dg/dr = a h,   dh/dr = b g + c h,   df/dr = h dt/dr,
// and is integrated in x = log r.

#include <cstddef>
#include <memory>

#include "pmono/numerics.hpp"
#include "pmono/schwarzschild_model.hpp"

namespace pmono::coeffs {

enum class Flavor { decaying, growing };

const char* to_string(Flavor flavor);

struct ABC {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

/// a, b, c at one radius, evaluated from the exact model quantities.
ABC abc_at(const model::Local& local, double p);
ABC abc_at(const model::ModelGeometry& model, double r);

struct ABCCoefficients {
  numerics::SampledCurve a_curve, b_curve, c_curve;  // over r on [1, R_max]
};

ABCCoefficients abc_curves(const model::ModelGeometry& model);

struct Triple {
  double f = 0.0;
  double g = 0.0;
  double h = 0.0;
};

struct CoefficientOptions {
  double epsilon = 0.01;  // growing branch: h(1)
  double ode_rel = 1e-13;
};

/// A solved triple.  Pointwise values come from the dense ODE solution on
/// [1, R_max] and from fitted asymptotic forms beyond it.
class CoefficientSolution {
 public:
  [[nodiscard]] Flavor flavor() const { return flavor_; }
  [[nodiscard]] double p() const { return p_; }
  [[nodiscard]] double R_max() const { return R_max_; }
  /// Growing branch only: leading amplitude of the raw solution and the
  /// additive constant of f.
  [[nodiscard]] double c1() const { return c1_; }
  [[nodiscard]] double q() const { return q_; }
  [[nodiscard]] double epsilon_used() const { return epsilon_; }

  [[nodiscard]] Triple at_r(double r) const;
  /// d/dt of (f, g, h) from the ODE itself.
  [[nodiscard]] Triple rate_t(double r) const;

  numerics::SampledCurve f_curve, g_curve, h_curve;  // over r on the model grid
  numerics::SampledCurve t_grid;                     // t over r

 private:
  friend CoefficientSolution solve_decaying(const model::ModelGeometry&,
                                            const CoefficientOptions&);
  friend CoefficientSolution solve_growing(const model::ModelGeometry&,
                                           const CoefficientOptions&);
  void finish(const model::ModelGeometry& model);

  struct Asymptote {
    double alpha = 0.0;
    numerics::TailFit fit;
    [[nodiscard]] double operator()(double r) const;
  };

  std::shared_ptr<const model::ModelGeometry> model_;
  Flavor flavor_ = Flavor::decaying;
  double p_ = 0.0;
  double R_max_ = 0.0;
  double scale_ = 1.0;  // multiplies the raw dense solution
  double c1_ = 0.0;
  double q_ = 0.0;
  double epsilon_ = 0.0;
  numerics::DenseSolution dense_;  // (g, h, f) in x = log r, raw
  Asymptote tail_f_, tail_g_, tail_h_;
};

/// Backward integration from a two-term Frobenius seed at R_max; f is
/// -int_t^inf h with the tail beyond R_max evaluated analytically.
/// Throws NumericalError unless h > 0 and dg/dt + h > 0 on the whole grid.
CoefficientSolution solve_decaying(const model::ModelGeometry& model,
                                   const CoefficientOptions& options = {});

/// Forward integration from (g, h)(1) = (-1, epsilon), normalized by the
/// leading amplitude c1 so that h ~ r/(3-p) + 1; f = int_0^t h + q with q
/// fixed by the constant term 3-p of f - c_tilde e^(t/(3-p)).
CoefficientSolution solve_growing(const model::ModelGeometry& model,
                                  const CoefficientOptions& options = {});

/// Q = 4 pi (3-p)^2 f + g W + (p-1)(3-p) h dW/dt.
double monotone_quantity(double p, const Triple& c, double W, double dW_dt);

struct SystemResidual {
  /// Both equations of the t-form system, t-derivatives by fourth-order
  /// differences of the dense output, each relative to its largest term.
  double first = 0.0;
  double second = 0.0;
  /// Perfect-square form relative to |g|, using the t-rates of the system.
  double square = 0.0;
  /// Perfect-square form with differenced rates, relative to its largest
  /// term.  dg/dt + h ~ h/r^2 cancels, so this degrades like r^2 * noise;
  /// diagnostic only.
  double square_differenced = 0.0;
  [[nodiscard]] double max() const;
};

/// Residuals of the t-form system on the model grid.
SystemResidual system_residual(const CoefficientSolution& sol,
                               const model::ModelGeometry& model);

struct Constancy {
  double Q0 = 0.0;
  double max_deviation = 0.0;
};

/// Q_s on the model: value at t = 0 and max |Q_s(t) - Q_s(0)| over the grid.
Constancy model_constancy(const CoefficientSolution& sol,
                          const model::ModelGeometry& model);

}  // namespace pmono::coeffs
