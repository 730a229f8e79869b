#pragma once

// The monotone quantities Q(t) = 4 pi (3-p)^2 f + g W + (p-1)(3-p) h W'
// evaluated along level-set flows of warped metrics, with the coefficient
// triples taken from the Schwarzschild model at the same t, and the checks
// built on them: monotonicity, limits, the horizon bound on W(0), the mass
// functional F_p and the p-Penrose margin.

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pmono/coefficient_flows.hpp"
#include "pmono/schwarzschild_model.hpp"
#include "pmono/warped_geometry.hpp"

namespace pmono::verify {

struct QCurve {
  coeffs::Flavor flavor = coeffs::Flavor::decaying;
  std::vector<double> t;
  std::vector<double> r_model;  // model radius with the same t
  std::vector<double> values;
  /// Size used for equality detection: max(|Q(0)|, W(0)).
  double scale = 0.0;
};

/// Model radius at level t; beyond the model range r = c_tilde e^(t/(3-p)) - (3-p).
double model_radius(const model::ModelGeometry& model, double t);

/// Q on the flow's t-grid.  Throws DomainError when p differs.
QCurve evaluate_Q(const warp::FlowProfile& flow, const coeffs::CoefficientSolution& coeffs,
                  const model::ModelGeometry& model);

struct Violation {
  double t = 0.0;
  double slope = 0.0;
};

struct VerificationReport {
  double min_forward_slope = 0.0;
  double max_violation = 0.0;  // largest amount by which a slope undercuts -slope_slack
  double limit_estimate = 0.0;
  double penrose_margin = 0.0;
  bool equality_flag = false;
  std::vector<Violation> violations;
  std::map<std::string, double> diagnostics;
};

struct MonotonicityOptions {
  numerics::Tolerances tol{};
  /// Forward slopes are certified where the model radius is at most this.
  /// Beyond it the growing terms reach r W and their rounding noise, divided
  /// by the grid spacing, is no longer below slope_slack.
  double r_window = 1e3;
};

/// Forward-difference slopes of Q; equality when max |Q - Q(0)| <= accept_rel scale
/// over the whole curve.
VerificationReport monotonicity_report(const QCurve& q, const MonotonicityOptions& options = {});

/// Decaying flavor: the last value (the tail decays like r^-kappa).  Growing
/// flavor: tail fit in the model radius.  Throws NumericalError when the tail
/// does not converge.
double q_limits(const QCurve& q, const warp::FlowProfile& flow);

/// The growing-limit bound with and without the factor ((p-1)/(3-p))^(-(p-1)/(3-p)).
struct GrowingBound {
  double measured = 0.0;
  double bound_with_factor = 0.0;
  double bound_without_factor = 0.0;
};
GrowingBound growing_bound(double limit, const warp::FlowProfile& flow, double Kp);

/// W_s(0) - W(0), with W_s(0) from the decaying triple at the horizon.
double horizon_W_bound(const warp::FlowProfile& flow, const coeffs::CoefficientSolution& decaying);

struct MassFunctional {
  numerics::SampledCurve curve;  // over t
  double limit = 0.0;
  double bound = 0.0;            // 8 pi adm
};

/// F_p(t) with c_p from the flow's own capacity; limit by a tail fit in phi.
MassFunctional mass_functional_Fp(const warp::FlowProfile& flow);

/// adm - 2 (C_p/K_p)^(1/(3-p)).  Throws HypothesisError when R < 0 somewhere
/// on the flow.
VerificationReport penrose_margin(const warp::FlowProfile& flow, const model::ModelGeometry& model,
                                  const numerics::Tolerances& tol = {});

/// Model and both coefficient flavors for one p, shared across metrics.
struct ModelBundle {
  std::shared_ptr<const model::ModelGeometry> model;
  std::shared_ptr<const coeffs::CoefficientSolution> decaying;
  std::shared_ptr<const coeffs::CoefficientSolution> growing;
};
ModelBundle build_bundle(double p, const model::ModelOptions& options = {});

/// Everything measured on one metric at one p.
struct MetricVerification {
  double p = 0.0;
  double Cp = 0.0;
  double Kp = 0.0;
  double adm = 0.0;
  double R_min = 0.0;  // min R phi^2 over the flow
  VerificationReport penrose;
  VerificationReport decaying;
  VerificationReport growing;
  double horizon_gap = 0.0;
  double Q_dec0 = 0.0;
  double Q_grow0 = 0.0;
  MassFunctional Fp;
  warp::WResidual residual;
  GrowingBound bound;
  warp::FlowProfile flow;
  QCurve q_decaying, q_growing;
};

/// Runs the flow, both Q curves, the limits, the horizon bound, F_p, the W
/// residual and the Penrose margin.  Hypothesis failures propagate.
MetricVerification verify_metric(const warp::WarpProfile& warp, const ModelBundle& bundle,
                                 const warp::FlowOptions& flow_options = {},
                                 const MonotonicityOptions& options = {});

}  // namespace pmono::verify
