#include "pmono/monotonicity_verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "pmono/errors.hpp"

namespace pmono::verify {

using coeffs::Flavor;

namespace {

constexpr double kPi = std::numbers::pi;

// Scalar curvature is accepted as non-negative when R phi^2 >= -this.
constexpr double kCurvatureFloor = 1e-10;

}  // namespace

double model_radius(const model::ModelGeometry& model, double t) {
  const double r_last = model.evaluation_limit();
  const double t_last = model.t(r_last);
  if (t <= t_last) return model.r_at_t(t);
  // (r + 3 - p) e^(-t/(3-p)) is constant up to O(1/r); anchor it at the last node.
  const double a = 3.0 - model.p();
  return (r_last + a) * std::exp((t - t_last) / a) - a;
}

QCurve evaluate_Q(const warp::FlowProfile& flow, const coeffs::CoefficientSolution& coeffs,
                  const model::ModelGeometry& model) {
  if (flow.p != coeffs.p() || flow.p != model.p()) {
    std::ostringstream msg;
    msg << "evaluate_Q: p mismatch (flow " << flow.p << ", coefficients " << coeffs.p()
        << ", model " << model.p() << ")";
    throw DomainError(msg.str());
  }
  QCurve q;
  q.flavor = coeffs.flavor();
  q.t = flow.t;
  q.r_model.resize(flow.size());
  q.values.resize(flow.size());
  for (std::size_t i = 0; i < flow.size(); ++i) {
    q.r_model[i] = i == 0 ? 1.0 : model_radius(model, flow.t[i]);
    q.values[i] =
        coeffs::monotone_quantity(flow.p, coeffs.at_r(q.r_model[i]), flow.W[i], flow.dWdt[i]);
  }
  q.scale = std::max(std::abs(q.values.front()), flow.W.front());
  return q;
}

VerificationReport monotonicity_report(const QCurve& q, const MonotonicityOptions& options) {
  const double slack = options.tol.slope_slack;
  VerificationReport rep;
  rep.min_forward_slope = std::numeric_limits<double>::infinity();
  double t_certified = 0.0;
  for (std::size_t i = 0; i + 1 < q.values.size(); ++i) {
    if (!q.r_model.empty() && q.r_model[i + 1] > options.r_window) break;
    const double slope = (q.values[i + 1] - q.values[i]) / (q.t[i + 1] - q.t[i]);
    rep.min_forward_slope = std::min(rep.min_forward_slope, slope);
    if (slope < -slack) {
      rep.violations.push_back({q.t[i], slope});
      rep.max_violation = std::max(rep.max_violation, -slack - slope);
    }
    t_certified = q.t[i + 1];
  }
  double deviation = 0.0;
  for (double v : q.values) deviation = std::max(deviation, std::abs(v - q.values.front()));
  rep.equality_flag = deviation <= options.tol.accept_rel * q.scale;
  rep.diagnostics["max_deviation"] = deviation;
  rep.diagnostics["scale"] = q.scale;
  rep.diagnostics["certified_t_max"] = t_certified;
  return rep;
}

double q_limits(const QCurve& q, const warp::FlowProfile& flow) {
  if (q.values.size() != flow.size()) throw DomainError("q_limits: curve and flow differ in size");
  if (q.flavor == Flavor::decaying) return q.values.back();
  return numerics::fit_power_tail(q.r_model, q.values, 0.0, 1e-5).c0;
}

GrowingBound growing_bound(double limit, const warp::FlowProfile& flow, double Kp) {
  const double p = flow.p;
  const double a = 3.0 - p;
  const double radius = std::pow(Kp / flow.Cp, 1.0 / a) * flow.adm;
  const double offset = 4.0 * kPi * (a * a + 4.0);
  GrowingBound b;
  b.measured = limit;
  b.bound_without_factor = 8.0 * kPi * a * a * radius - offset;
  b.bound_with_factor =
      8.0 * kPi * a * a * std::pow((p - 1.0) / a, -(p - 1.0) / a) * radius - offset;
  return b;
}

double horizon_W_bound(const warp::FlowProfile& flow, const coeffs::CoefficientSolution& decaying) {
  if (decaying.flavor() != Flavor::decaying) {
    throw DomainError("horizon_W_bound: needs the decaying coefficients");
  }
  const double a = 3.0 - flow.p;
  const coeffs::Triple c = decaying.at_r(1.0);
  const double Ws0 = -4.0 * kPi * a * a * c.f / (c.g + 2.0 * a * c.h);
  return Ws0 - flow.W.front();
}

MassFunctional mass_functional_Fp(const warp::FlowProfile& flow) {
  const double p = flow.p;
  const double a = 3.0 - p;
  const double e = (p - 1.0) / a;
  const double cp = std::pow(flow.Cp / (4.0 * kPi), 1.0 / (p - 1.0));
  const double prefactor = std::pow(e * cp, e) / a;
  std::vector<double> F(flow.size());
  for (std::size_t i = 0; i < flow.size(); ++i) {
    const double phi = flow.phi[i];
    const double grad = std::sqrt(flow.W[i] / (4.0 * kPi)) / phi;  // |grad w|
    const double mean_curv = 4.0 * kPi * phi * phi * flow.H[i] * grad;
    const double bracket = 4.0 * kPi * a - mean_curv + flow.W[i] / a;
    F[i] = prefactor * std::pow(flow.u[i], -e) * bracket;
  }
  MassFunctional out;
  out.curve = numerics::SampledCurve(flow.t, F);
  // F_p is a power series in 1/phi on the exterior; stop the fit window before
  // the bracket's cancellation (relative size 1/phi) costs digits.
  const double x_hi = flow.phi.back() > 1e5 ? 1e5 : 0.0;
  out.limit = numerics::fit_power_tail(flow.phi, F, 0.0, 1e-7, x_hi).c0;
  out.bound = 8.0 * kPi * flow.adm;
  return out;
}

VerificationReport penrose_margin(const warp::FlowProfile& flow, const model::ModelGeometry& model,
                                  const numerics::Tolerances& tol) {
  if (flow.p != model.p()) throw DomainError("penrose_margin: p mismatch");
  double R_min = std::numeric_limits<double>::infinity();
  double t_min = 0.0;
  for (std::size_t i = 0; i < flow.size(); ++i) {
    const double v = flow.R[i] * flow.phi[i] * flow.phi[i];
    if (v < R_min) {
      R_min = v;
      t_min = flow.t[i];
    }
  }
  if (R_min < -kCurvatureFloor) {
    std::ostringstream msg;
    msg << "penrose_margin: scalar curvature negative (R phi^2 = " << R_min << " at t=" << t_min
        << ")";
    throw HypothesisError(msg.str());
  }
  VerificationReport rep;
  rep.penrose_margin = flow.adm - 2.0 * std::pow(flow.Cp / model.Kp, 1.0 / (3.0 - flow.p));
  rep.equality_flag = std::abs(rep.penrose_margin) <= tol.accept_rel * flow.adm;
  rep.diagnostics["Cp"] = flow.Cp;
  rep.diagnostics["Kp"] = model.Kp;
  rep.diagnostics["adm"] = flow.adm;
  rep.diagnostics["R_phi2_min"] = R_min;
  return rep;
}

ModelBundle build_bundle(double p, const model::ModelOptions& options) {
  ModelBundle b;
  b.model = std::make_shared<const model::ModelGeometry>(p, options);
  b.decaying = std::make_shared<const coeffs::CoefficientSolution>(coeffs::solve_decaying(*b.model));
  b.growing = std::make_shared<const coeffs::CoefficientSolution>(coeffs::solve_growing(*b.model));
  return b;
}

MetricVerification verify_metric(const warp::WarpProfile& warp, const ModelBundle& bundle,
                                 const warp::FlowOptions& flow_options,
                                 const MonotonicityOptions& options) {
  const auto& model = *bundle.model;
  const auto flow = warp::level_flow(warp, model.p(), flow_options);
  MetricVerification out;
  out.p = model.p();
  out.Cp = flow.Cp;
  out.Kp = model.Kp;
  out.adm = flow.adm;
  out.penrose = penrose_margin(flow, model, options.tol);
  out.R_min = out.penrose.diagnostics.at("R_phi2_min");

  const QCurve q_dec = evaluate_Q(flow, *bundle.decaying, model);
  const QCurve q_grow = evaluate_Q(flow, *bundle.growing, model);
  out.decaying = monotonicity_report(q_dec, options);
  out.growing = monotonicity_report(q_grow, options);
  out.decaying.limit_estimate = q_limits(q_dec, flow);
  out.growing.limit_estimate = q_limits(q_grow, flow);
  out.Q_dec0 = q_dec.values.front();
  out.Q_grow0 = q_grow.values.front();
  out.horizon_gap = horizon_W_bound(flow, *bundle.decaying);
  out.Fp = mass_functional_Fp(flow);
  out.residual = warp::w_inequality_residual(flow);
  out.bound = growing_bound(out.growing.limit_estimate, flow, model.Kp);
  out.q_decaying = q_dec;
  out.q_growing = q_grow;
  out.flow = flow;
  return out;
}

}  // namespace pmono::verify
