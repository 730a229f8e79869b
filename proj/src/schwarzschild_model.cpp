#include "pmono/schwarzschild_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace pmono::model {

using numerics::SampledCurve;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kExtension = 1e3;  // nodes continue to R_max * kExtension

void check_p(double p) {
  if (!(p > 1.0 && p < 2.0)) {
    std::ostringstream msg;
    msg << "p=" << p << " outside (1, 2)";
    throw DomainError(msg.str());
  }
}

double decay_exponent(double p) { return 2.0 / (p - 1.0); }
double weight_exponent(double p) { return 2.0 * (3.0 - p) / (p - 1.0); }

// Scaled tail J(r) = r^(k-1) int_r^inf sigma^-k (1 + 1/sigma)^-m dsigma, which
// tends to 1/(k-1); working with J avoids underflow for p near 1.
double scaled_piece(double p, double r, double b) {
  const double k = decay_exponent(p);
  const double m = weight_exponent(p);
  return numerics::quad_gauss_legendre(
      [&](double s) { return std::pow(s / r, -k) / r * std::pow(1.0 + 1.0 / s, -m); }, r, b);
}

}  // namespace

double flux_integrand(double p, double sigma) {
  return std::pow(sigma, -decay_exponent(p)) * std::pow(1.0 + 1.0 / sigma, -weight_exponent(p));
}

double flux_constant(double p, const numerics::Tolerances& tol) {
  check_p(p);
  const double k = decay_exponent(p);
  const numerics::TailSpec tail{k, 1e4};
  const double I = numerics::quad_tail([p](double s) { return flux_integrand(p, s); }, 1.0,
                                       tail, tol);
  if (!(I > 0.0) || !std::isfinite(I)) throw NumericalError("flux_constant: bad integral");
  return 1.0 / I;
}

ModelGeometry::ModelGeometry(double p, const ModelOptions& options)
    : p_(p), flux_(0.0), R_max_(options.R_max), tol_(options.tol) {
  check_p(p);
  tol_.validate();
  if (!(R_max_ >= 1e4)) throw DomainError("model_profile: R_max must be >= 1e4");
  if (options.n_points < 64) throw DomainError("model_profile: need at least 64 points");

  const std::size_t n = options.n_points;
  const double step = std::log(R_max_) / static_cast<double>(n - 1);
  const auto n_ext = static_cast<std::size_t>(std::ceil(std::log(kExtension) / step));
  r_nodes_.resize(n + n_ext);
  for (std::size_t i = 0; i < r_nodes_.size(); ++i) {
    r_nodes_[i] = std::exp(step * static_cast<double>(i));
  }
  r_nodes_.front() = 1.0;
  r_nodes_[n - 1] = R_max_;

  const double k = decay_exponent(p);
  const double m = weight_exponent(p);
  // J at the last node: analytic two-term tail, J ~ (1/(k-1)) (1 - m (k-1)/(k r) ...).
  std::vector<double> J(r_nodes_.size());
  {
    const double rl = r_nodes_.back();
    const numerics::TailSpec tail{k, rl};
    J.back() = numerics::quad_tail(
        [&](double s) { return std::pow(s / rl, -k) / rl * std::pow(1.0 + 1.0 / s, -m); }, rl,
        tail, tol_);
  }
  for (std::size_t i = r_nodes_.size() - 1; i-- > 0;) {
    const double ratio = r_nodes_[i] / r_nodes_[i + 1];
    J[i] = J[i + 1] * std::pow(ratio, k - 1.0) + scaled_piece(p, r_nodes_[i], r_nodes_[i + 1]);
  }
  flux_ = 1.0 / J.front();
  u_nodes_ = std::move(J);  // stores J; u = C J r^(1-k)
  t_nodes_.resize(r_nodes_.size());
  for (std::size_t i = 0; i < r_nodes_.size(); ++i) t_nodes_[i] = t(r_nodes_[i]);
  t_nodes_.front() = 0.0;

  std::vector<double> rs(r_nodes_.begin(), r_nodes_.begin() + static_cast<long>(n));
  std::vector<double> us(n), dus(n), ts(n), ws(n), dws(n);
  for (std::size_t i = 0; i < n; ++i) {
    us[i] = u(rs[i]);
    dus[i] = du(rs[i]);
    ts[i] = t_nodes_[i];
    ws[i] = Ws(rs[i]);
    dws[i] = dWs_dt(rs[i]);
  }
  u_curve = SampledCurve(rs, us);
  du_curve = SampledCurve(rs, dus);
  t_of_r = SampledCurve(rs, ts);
  r_of_t = SampledCurve(ts, rs);
  Ws_curve = SampledCurve(ts, ws);
  dWs_curve = SampledCurve(ts, dws);

  Kp = 4.0 * kPi * std::pow(flux_, p - 1.0);

  // c_fit: u r^kappa over the last decade; c_tilde: (r + 3 - p) e^(-t/(3-p)).
  const auto fit_u = numerics::fit_power_tail(u_curve, -kappa());
  c_fit = fit_u.c0;
  std::vector<double> tilde(n);
  for (std::size_t i = 0; i < n; ++i) {
    tilde[i] = (rs[i] + 3.0 - p) * std::exp(-ts[i] / (3.0 - p));
  }
  c_tilde = numerics::fit_power_tail(rs, tilde, 0.0).c0;
}

namespace {

double scaled_J(double p, std::span<const double> r_nodes, std::span<const double> J_nodes,
                double r) {
  if (r < 1.0 || r > r_nodes.back()) {
    std::ostringstream msg;
    msg << "model evaluation at r=" << r << " outside [1, " << r_nodes.back() << "]";
    throw DomainError(msg.str());
  }
  const std::size_t i = numerics::locate_cell(r_nodes, r);
  if (r == r_nodes[i]) return J_nodes[i];
  const double b = r_nodes[i + 1];
  const double k = decay_exponent(p);
  return J_nodes[i + 1] * std::pow(r / b, k - 1.0) + scaled_piece(p, r, b);
}

}  // namespace

double ModelGeometry::u(double r) const {
  const double J = scaled_J(p_, r_nodes_, u_nodes_, r);
  return flux_ * J * std::pow(r, 1.0 - decay_exponent(p_));
}

double ModelGeometry::t(double r) const {
  const double J = scaled_J(p_, r_nodes_, u_nodes_, r);
  const double log_u = std::log(flux_ * J) + (1.0 - decay_exponent(p_)) * std::log(r);
  return (1.0 - p_) * log_u;
}

namespace {

// u'/u
double log_derivative(double p, double r, double J) {
  return -std::pow(1.0 + 1.0 / r, -weight_exponent(p)) / (r * J);
}

double friction(double p, double r) {
  // u''/u' from (p-1) u'' + (2/r + 2(p-3)/(r + r^2)) u' = 0
  return -(2.0 / r + 2.0 * (p - 3.0) / (r + r * r)) / (p - 1.0);
}

}  // namespace

double ModelGeometry::du(double r) const {
  return -flux_ * flux_integrand(p_, r);
}

double ModelGeometry::ddu(double r) const { return friction(p_, r) * du(r); }

Local ModelGeometry::local(double r) const {
  const double J = scaled_J(p_, r_nodes_, u_nodes_, r);
  const double L = log_derivative(p_, r, J);
  const double dL = L * friction(p_, r) - L * L;
  const double pm1 = p_ - 1.0;
  Local out;
  out.r = r;
  out.u = flux_ * J * std::pow(r, 1.0 - decay_exponent(p_));
  out.L = L;
  out.dt_dr = (1.0 - p_) * L;
  out.dr_dt = 1.0 / out.dt_dr;
  out.Ws = 4.0 * kPi * pm1 * pm1 * r * r * L * L;
  out.dWs_dr = 8.0 * kPi * pm1 * pm1 * (r * L * L + r * r * L * dL);
  out.dWs_dt = out.dWs_dr * out.dr_dt;
  return out;
}

double ModelGeometry::dt_dr(double r) const {
  const double L = log_derivative(p_, r, scaled_J(p_, r_nodes_, u_nodes_, r));
  return (1.0 - p_) * L;
}

double ModelGeometry::dr_dt(double r) const { return 1.0 / dt_dr(r); }

double ModelGeometry::Ws(double r) const {
  const double L = log_derivative(p_, r, scaled_J(p_, r_nodes_, u_nodes_, r));
  return 4.0 * kPi * (p_ - 1.0) * (p_ - 1.0) * r * r * L * L;
}

double ModelGeometry::dWs_dr(double r) const {
  const double L = log_derivative(p_, r, scaled_J(p_, r_nodes_, u_nodes_, r));
  const double dL = L * friction(p_, r) - L * L;  // u''/u - (u'/u)^2
  return 8.0 * kPi * (p_ - 1.0) * (p_ - 1.0) * (r * L * L + r * r * L * dL);
}

double ModelGeometry::dWs_dt(double r) const { return dWs_dr(r) * dr_dt(r); }

double ModelGeometry::r_at_t(double tv) const {
  if (tv < 0.0) throw DomainError("r_at_t: t must be non-negative");
  if (tv == 0.0) return 1.0;
  if (tv > t_nodes_.back()) {
    std::ostringstream msg;
    msg << "r_at_t: t=" << tv << " beyond model evaluation range " << t_nodes_.back();
    throw DomainError(msg.str());
  }
  const std::size_t i = numerics::locate_cell(t_nodes_, tv);
  // Newton in x = log r, started from linear interpolation in x.
  const double x0 = std::log(r_nodes_[i]);
  const double x1 = std::log(r_nodes_[i + 1]);
  double x = x0 + (x1 - x0) * (tv - t_nodes_[i]) / (t_nodes_[i + 1] - t_nodes_[i]);
  for (int it = 0; it < 50; ++it) {
    x = std::clamp(x, x0, x1);
    const double r = std::exp(x);
    const double f = t(r) - tv;
    const double dx = f / (r * dt_dr(r));
    x -= dx;
    if (std::abs(dx) < 1e-15) break;
  }
  return std::exp(std::clamp(x, x0, x1));
}

ModelGeometry model_profile(double p, double R_max, const numerics::Tolerances& tol) {
  ModelOptions opt;
  opt.R_max = R_max;
  opt.tol = tol;
  return ModelGeometry(p, opt);
}

CapacityCheck capacity_Kp(const ModelGeometry& model) {
  const double p = model.p();
  CapacityCheck out;
  out.Kp = model.Kp;
  // Horizon r = 1: conformal factor rho = 2, |grad u|_g = |u'| / rho^2,
  // area 4 pi rho^4.
  const double rho = 2.0;
  const double grad = std::abs(model.du(1.0)) / (rho * rho);
  out.surface_integral = 4.0 * kPi * std::pow(rho, 4) * std::pow(grad, p - 1.0);

  // |u'|^(p-1) rho^(6-2p) r^2 is the flux density; constant in r.
  const double ref = std::pow(model.flux_constant(), p - 1.0);
  for (double r : model.u_curve.abscissae()) {
    const double rho_r = 1.0 + 1.0 / r;
    const double flux =
        std::pow(std::abs(model.du(r)), p - 1.0) * std::pow(rho_r, 6.0 - 2.0 * p) * r * r;
    out.max_flux_deviation = std::max(out.max_flux_deviation, std::abs(flux / ref - 1.0));
  }
  const double accept = model.tolerances().accept_rel;
  if (std::abs(out.surface_integral / out.Kp - 1.0) > accept ||
      out.max_flux_deviation > accept) {
    throw NumericalError("capacity_Kp: surface-integral cross-check failed");
  }
  return out;
}

BoundaryData ws_boundary_data(const ModelGeometry& model) {
  BoundaryData b{model.Ws(1.0), model.dWs_dt(1.0)};
  const double expected = 2.0 / (model.p() - 1.0) * b.W0;
  if (std::abs(b.dW0 / expected - 1.0) > model.tolerances().accept_rel) {
    throw NumericalError("ws_boundary_data: minimal-boundary relation violated");
  }
  return b;
}

ModelConstants c_constants(const ModelGeometry& model) {
  const double p = model.p();
  ModelConstants c;
  c.c_fit = model.c_fit;
  c.c_tilde = model.c_tilde;
  c.tilde_ratio = model.c_tilde / std::pow(model.c_fit, (p - 1.0) / (3.0 - p));
  const double root = std::pow(model.Kp / (4.0 * kPi), 1.0 / (p - 1.0));
  c.closed_form_ratio = model.c_fit / ((p - 1.0) / (3.0 - p) * root);
  c.capacity_root_ratio = model.c_fit / root;
  c.b1_fit = numerics::fit_power_tail(model.u_curve, -model.kappa()).c1;
  if (!(c.c_fit > 0.0) || !(c.c_tilde > 0.0)) {
    throw NumericalError("c_constants: non-positive fitted constants");
  }
  return c;
}

}  // namespace pmono::model
