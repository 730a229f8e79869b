#include "pmono/coefficient_flows.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "pmono/frobenius.hpp"

namespace pmono::coeffs {

using model::Local;
using model::ModelGeometry;
using numerics::SampledCurve;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFdStep = 1e-3;  // in x = log r

double k4(double p) { return (p - 1.0) * (5.0 - p) / 4.0; }

numerics::Tolerances ode_tolerances(const ModelGeometry& model,
                                    const CoefficientOptions& options) {
  numerics::Tolerances tol = model.tolerances();
  tol.ode_rel = options.ode_rel;
  tol.accept_rel = std::max(tol.accept_rel, tol.ode_rel);
  return tol;
}

// y = (g, h, f) as functions of x = log r.
numerics::MatrixFn system_matrix(const ModelGeometry& model) {
  const double p = model.p();
  const double r_hi = model.evaluation_limit();
  return [&model, p, r_hi](double x, std::span<double> m) {
    const double r = std::clamp(std::exp(x), 1.0, r_hi);
    const Local loc = model.local(r);
    const ABC k = abc_at(loc, p);
    m[0] = 0.0;         m[1] = r * k.a;          m[2] = 0.0;
    m[3] = r * k.b;     m[4] = r * k.c;          m[5] = 0.0;
    m[6] = 0.0;         m[7] = r * loc.dt_dr;    m[8] = 0.0;
  };
}

void fail_certificate(const char* what, double r, double value) {
  std::ostringstream msg;
  msg << what << " violated at r=" << r << " (value " << value << ")";
  throw NumericalError(msg.str());
}

}  // namespace

const char* to_string(Flavor flavor) {
  return flavor == Flavor::decaying ? "decaying" : "growing";
}

ABC abc_at(const Local& loc, double p) {
  const double w_ratio = loc.dWs_dt / loc.Ws;
  const double pq = (p - 1.0) * (3.0 - p);
  ABC out;
  out.a = loc.dt_dr * (k4(p) * w_ratio * w_ratio - 1.0);
  out.b = -loc.dt_dr / pq;
  out.c = 2.0 * (p - 2.0) * loc.dt_dr / pq -
          (5.0 - p) / (2.0 * (3.0 - p)) * loc.dWs_dr / loc.Ws;
  return out;
}

ABC abc_at(const ModelGeometry& model, double r) { return abc_at(model.local(r), model.p()); }

ABCCoefficients abc_curves(const ModelGeometry& model) {
  const auto rs = model.u_curve.abscissae();
  std::vector<double> a(rs.size()), b(rs.size()), c(rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const ABC k = abc_at(model, rs[i]);
    a[i] = k.a;
    b[i] = k.b;
    c[i] = k.c;
  }
  std::vector<double> x(rs.begin(), rs.end());
  return {SampledCurve(x, a), SampledCurve(x, b), SampledCurve(x, c)};
}

double CoefficientSolution::Asymptote::operator()(double r) const {
  return fit.c0 * std::pow(r, alpha) * (1.0 + fit.c1 / r);
}

Triple CoefficientSolution::at_r(double r) const {
  if (!(r >= 1.0)) {
    std::ostringstream msg;
    msg << "coefficient evaluation at r=" << r << " < 1";
    throw DomainError(msg.str());
  }
  if (r > R_max_) return {tail_f_(r), tail_g_(r), tail_h_(r)};
  const double x = std::clamp(std::log(r), 0.0, std::log(R_max_));
  const auto y = dense_(x);
  Triple out{scale_ * y[2], scale_ * y[0], scale_ * y[1]};
  if (flavor_ == Flavor::growing) out.f += q_;
  return out;
}

Triple CoefficientSolution::rate_t(double r) const {
  const Local loc = model_->local(r);
  const ABC k = abc_at(loc, p_);
  const Triple v = at_r(r);
  return {v.h, k.a * v.h * loc.dr_dt, (k.b * v.g + k.c * v.h) * loc.dr_dt};
}

void CoefficientSolution::finish(const ModelGeometry& model) {
  const auto rs = model.u_curve.abscissae();
  std::vector<double> x(rs.begin(), rs.end());
  std::vector<double> f(rs.size()), g(rs.size()), h(rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const Triple v = at_r(rs[i]);
    f[i] = v.f;
    g[i] = v.g;
    h[i] = v.h;
  }
  const double alpha = flavor_ == Flavor::decaying ? -model.kappa() : 1.0;
  auto tail = [&](const std::vector<double>& v) {
    Asymptote a;
    a.alpha = alpha;
    a.fit = numerics::fit_power_tail(x, v, alpha, 1e-6);
    return a;
  };
  tail_f_ = tail(f);
  tail_g_ = tail(g);
  tail_h_ = tail(h);
  f_curve = SampledCurve(x, f);
  g_curve = SampledCurve(x, g);
  h_curve = SampledCurve(x, h);
  t_grid = model.t_of_r;
}

CoefficientSolution solve_decaying(const ModelGeometry& model, const CoefficientOptions& options) {
  const double p = model.p();
  const double kappa = model.kappa();
  const double R = model.R_max();
  const auto tol = ode_tolerances(model, options);

  const auto series = frobenius::series_coefficients(frobenius::coefficient_equation(p), -kappa, 1);
  frobenius::require_complete(series, 1);
  const double b1 = series.coefficients[0];
  const double amplitude = std::pow(R, -kappa);
  if (!(amplitude > 1e-290)) {
    throw DomainError("solve_decaying: p too close to 1 for this R_max (seed underflows)");
  }
  auto g_seed = [&](double r) { return std::pow(r, -kappa) * (1.0 + b1 / r); };
  auto dg_seed = [&](double r) {
    return -kappa * std::pow(r, -kappa - 1.0) - (kappa + 1.0) * b1 * std::pow(r, -kappa - 2.0);
  };
  auto h_seed = [&](double r) { return dg_seed(r) / abc_at(model, r).a; };
  // f = -int_r^inf h dt/dr dr; beyond R the seed integrand decays like r^(-kappa-1).
  const double f_R = -numerics::quad_tail(
      [&](double s) { return h_seed(s) * model.local(s).dt_dr; }, R,
      {kappa + 1.0, R * 100.0}, tol);

  CoefficientSolution sol;
  sol.model_ = std::make_shared<const ModelGeometry>(model);
  sol.flavor_ = Flavor::decaying;
  sol.p_ = p;
  sol.R_max_ = R;
  sol.dense_ = numerics::integrate_linear_system(system_matrix(*sol.model_),
                                                 {g_seed(R), h_seed(R), f_R},
                                                 {0.0, std::log(R)},
                                                 numerics::Direction::backward, tol);
  sol.finish(model);

  for (double r : model.u_curve.abscissae()) {
    const Triple v = sol.at_r(r);
    if (!(v.h > 0.0)) fail_certificate("decaying branch: h > 0", r, v.h);
    const Triple d = sol.rate_t(r);
    if (!(d.g + v.h > 0.0)) fail_certificate("decaying branch: dg/dt + h > 0", r, d.g + v.h);
    if (!(v.f < 0.0)) fail_certificate("decaying branch: f < 0", r, v.f);
  }
  return sol;
}

namespace {

struct GrowingRaw {
  numerics::DenseSolution dense;
  double c1 = 0.0;
};

GrowingRaw integrate_growing(const ModelGeometry& model, double epsilon,
                             const numerics::Tolerances& tol) {
  const double p = model.p();
  GrowingRaw out;
  out.dense = numerics::integrate_linear_system(system_matrix(model), {-1.0, epsilon, 0.0},
                                                {0.0, std::log(model.R_max())},
                                                numerics::Direction::forward, tol);
  const auto rs = model.u_curve.abscissae();
  std::vector<double> h(rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    h[i] = out.dense.component(1, std::min(std::log(rs[i]), out.dense.x_end()));
  }
  // h ~ c1 (r/(3-p) + 1): leading amplitude c1/(3-p).
  out.c1 = numerics::fit_power_tail(rs, h, 1.0).c0 * (3.0 - p);
  return out;
}

}  // namespace

CoefficientSolution solve_growing(const ModelGeometry& model, const CoefficientOptions& options) {
  const double p = model.p();
  const auto tol = ode_tolerances(model, options);
  if (!(options.epsilon > 0.0)) throw DomainError("solve_growing: epsilon must be positive");

  CoefficientSolution sol;
  sol.model_ = std::make_shared<const ModelGeometry>(model);
  sol.flavor_ = Flavor::growing;
  sol.p_ = p;
  sol.R_max_ = model.R_max();

  double eps = options.epsilon;
  GrowingRaw raw;
  try {
    raw = integrate_growing(*sol.model_, eps, tol);
    if (!(raw.c1 > 0.0)) throw NumericalError("non-positive leading amplitude");
  } catch (const NumericalError&) {
    eps *= 1.1;  // a perturbed start removes an accidental c1 = 0
    raw = integrate_growing(*sol.model_, eps, tol);
    if (!(raw.c1 > 0.0)) throw NumericalError("solve_growing: leading amplitude c1 <= 0");
  }
  sol.epsilon_ = eps;
  sol.c1_ = raw.c1;
  sol.scale_ = 1.0 / raw.c1;
  sol.dense_ = std::move(raw.dense);

  // q from the constant term of  int_0^t h - c_tilde e^(t/(3-p)), where
  // c_tilde e^(t/(3-p)) = r (c / (u r^kappa))^(1/kappa).
  const auto rs = model.u_curve.abscissae();
  const double kappa = model.kappa();
  const double c = model.c_closed_form();
  std::vector<double> diff(rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const double r = rs[i];
    const double F = sol.scale_ * sol.dense_.component(2, std::min(std::log(r), sol.dense_.x_end()));
    const double u = model.u(r);
    diff[i] = F - r * std::pow(c / (u * std::pow(r, kappa)), 1.0 / kappa);
  }
  sol.q_ = (3.0 - p) - numerics::fit_power_tail(rs, diff, 0.0).c0;
  sol.finish(model);

  for (double r : rs) {
    const Triple v = sol.at_r(r);
    if (!(v.h > 0.0)) fail_certificate("growing branch: h > 0", r, v.h);
    if (!(v.g < 0.0)) fail_certificate("growing branch: g < 0", r, v.g);
    const Triple d = sol.rate_t(r);
    if (!(d.g + v.h > 0.0)) fail_certificate("growing branch: dg/dt + h > 0", r, d.g + v.h);
  }
  return sol;
}

double monotone_quantity(double p, const Triple& c, double W, double dW_dt) {
  return 4.0 * kPi * (3.0 - p) * (3.0 - p) * c.f + c.g * W + (p - 1.0) * (3.0 - p) * c.h * dW_dt;
}

double SystemResidual::max() const { return std::max({first, second, square}); }

SystemResidual system_residual(const CoefficientSolution& sol, const ModelGeometry& model) {
  const double p = model.p();
  const double pq = (p - 1.0) * (3.0 - p);
  const double x_hi = std::log(std::min(sol.R_max(), model.R_max()));
  SystemResidual out;
  for (double r : model.u_curve.abscissae()) {
    const double x = std::log(r);
    const Local loc = model.local(r);
    const double W = loc.Ws, Wt = loc.dWs_dt;
    const Triple v = sol.at_r(r);

    // Perfect-square form with the solution's own t-rates.
    {
      const Triple d = sol.rate_t(r);
      const double G = d.g + v.h;
      if (!(G >= 0.0) || !(v.h >= 0.0)) {
        out.square = std::numeric_limits<double>::infinity();
      } else {
        const double sq = v.g - 2 * (p - 2) * v.h + pq * d.h + 2.0 * std::sqrt(G) * std::sqrt(k4(p) * v.h);
        out.square = std::max(out.square, std::abs(sq) / std::abs(v.g));
      }
    }

    // Both equations with t-derivatives from differences of the dense output.
    if (x - 2 * kFdStep < 0.0 || x + 2 * kFdStep > x_hi) continue;
    auto at = [&](double dx) { return sol.at_r(std::min(std::exp(x + dx), sol.R_max())); };
    const Triple m2 = at(-2 * kFdStep), m1 = at(-kFdStep), p1 = at(kFdStep), p2 = at(2 * kFdStep);
    auto d_dx = [&](double Triple::*field) {
      return (m2.*field - 8.0 * (m1.*field) + 8.0 * (p1.*field) - p2.*field) / (12.0 * kFdStep);
    };
    const double to_t = 1.0 / (r * loc.dt_dr);
    const double g_t = d_dx(&Triple::g) * to_t;
    const double h_t = d_dx(&Triple::h) * to_t;
    const double G = g_t + v.h;

    const double gW2 = g_t * W * W, hW2 = v.h * W * W, hWt2 = k4(p) * v.h * Wt * Wt;
    const double mixed[] = {v.g * W * Wt, 2 * (p - 2) * v.h * W * Wt, pq * h_t * W * Wt};
    const double first = G * W * W + (mixed[0] - mixed[1] + mixed[2]) + hWt2;
    double s1 = std::max({std::abs(gW2), std::abs(hW2), std::abs(hWt2)});
    for (double term : mixed) s1 = std::max(s1, std::abs(term));
    out.first = std::max(out.first, std::abs(first) / s1);

    const double second = G * W * W - hWt2;
    const double s2 = std::max({std::abs(gW2), std::abs(hW2), std::abs(hWt2)});
    out.second = std::max(out.second, std::abs(second) / s2);

    const double cross = 2.0 * std::sqrt(std::max(G, 0.0)) * std::sqrt(k4(p) * std::max(v.h, 0.0));
    const double sq = v.g - 2 * (p - 2) * v.h + pq * h_t + cross;
    const double s3 = std::max({std::abs(v.g), std::abs(2 * (p - 2) * v.h), std::abs(pq * h_t),
                                std::abs(cross)});
    out.square_differenced = std::max(out.square_differenced, std::abs(sq) / s3);
  }
  return out;
}

Constancy model_constancy(const CoefficientSolution& sol, const ModelGeometry& model) {
  const double p = model.p();
  Constancy out;
  const auto rs = model.u_curve.abscissae();
  const auto q_at = [&](double r) {
    const Local loc = model.local(r);
    return monotone_quantity(p, sol.at_r(r), loc.Ws, loc.dWs_dt);
  };
  out.Q0 = q_at(rs.front());
  for (double r : rs) out.max_deviation = std::max(out.max_deviation, std::abs(q_at(r) - out.Q0));
  return out;
}

}  // namespace pmono::coeffs
