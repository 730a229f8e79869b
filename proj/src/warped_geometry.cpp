#include "pmono/warped_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

namespace pmono::warp {

using numerics::SampledCurve;

namespace {

constexpr double kPi = std::numbers::pi;
// W carries phi^2 v^2 with v ~ phi^-k, so profile noise is amplified; Q^* then
// multiplies W by ~r.  Keep the interior solution at rounding level.
constexpr double kInteriorRel = 1e-15;

void check_p(double p) {
  if (!(p > 1.0 && p < 2.0)) {
    std::ostringstream msg;
    msg << "p=" << p << " outside (1, 2)";
    throw DomainError(msg.str());
  }
}

// Schwarzschild exterior of mass M anchored at (s0, phi0).
struct Exterior {
  double M = 0.0;
  double s0 = 0.0;
  double phi0 = 0.0;

  // s(phi) up to a constant; dS/dphi = (1 - 2M/phi)^(-1/2).
  [[nodiscard]] double S(double phi) const {
    if (M == 0.0) return phi;
    return std::sqrt(phi * (phi - 2.0 * M)) +
           2.0 * M * std::log(std::sqrt(phi) + std::sqrt(phi - 2.0 * M));
  }

  [[nodiscard]] WarpPoint at(double s) const {
    const double target = S(phi0) + (s - s0);
    double phi = std::max(phi0 + (s - s0), 2.0 * M + 1e-300);
    if (M != 0.0) {
      for (int it = 0; it < 100; ++it) {
        const double step = (S(phi) - target) * std::sqrt(1.0 - 2.0 * M / phi);
        double next = phi - step;
        if (next <= 2.0 * M) next = 0.5 * (phi + 2.0 * M);
        const bool done = std::abs(next - phi) <= 1e-15 * phi;
        phi = next;
        if (done) break;
      }
    }
    WarpPoint w;
    w.phi = phi;
    w.dphi = std::sqrt(1.0 - 2.0 * M / phi);
    w.ddphi = M / (phi * phi);
    w.hawking = M;
    return w;
  }
};

// Integrates (phi, phi', mu) with phi'' = (1 - phi'^2)/(2 phi) - eps b(s)/(2 phi)
// and mu' = (eps/2) b(s) phi' (mu the Hawking mass), then attaches the exterior.
WarpProfile integrate_family(std::string family, double m0, double eps,
                             std::optional<Bump> bump, double s_max) {
  if (!(m0 > 0.0)) throw DomainError("warp family: mass must be positive");
  auto source = [eps, bump](double s) { return bump ? eps * (*bump)(s) : 0.0; };
  numerics::OdeRhs rhs = [source](double s, std::span<const double> y, std::span<double> dy) {
    const double src = source(s);
    dy[0] = y[1];
    dy[1] = (1.0 - y[1] * y[1]) / (2.0 * y[0]) - src / (2.0 * y[0]);
    dy[2] = 0.5 * src * y[1];
  };
  numerics::OdeOptions opt;
  opt.rel_tol = kInteriorRel;
  auto dense = std::make_shared<numerics::DenseSolution>(
      numerics::integrate_ode(rhs, 0.0, s_max, {2.0 * m0, 0.0, m0}, opt));

  // phi' must stay in (0, 1): the profile is then a graph over its area radius.
  const std::size_t n_check = 4000;
  for (std::size_t i = 1; i <= n_check; ++i) {
    const double s = s_max * static_cast<double>(i) / static_cast<double>(n_check);
    const auto y = (*dense)(s);
    if (!(y[1] > 0.0 && y[1] < 1.0) || !(y[0] > 0.0)) {
      std::ostringstream msg;
      msg << family << ": phi' = " << y[1] << " left (0, 1) at s=" << s
          << " (family parameters invalid)";
      throw DomainError(msg.str());
    }
  }
  const auto end = dense->final_state();
  Exterior ext{end[2], s_max, end[0]};
  if (!(ext.phi0 > 2.0 * ext.M)) throw DomainError(family + ": exterior inside its horizon");

  auto eval = [dense, ext, source, s_max](double s) {
    if (!(s >= 0.0)) throw DomainError("warp evaluation at negative s");
    if (s >= s_max) return ext.at(s);
    const auto y = (*dense)(s);
    WarpPoint w;
    w.phi = y[0];
    w.dphi = y[1];
    w.ddphi = (1.0 - y[1] * y[1]) / (2.0 * y[0]) - source(s) / (2.0 * y[0]);
    w.hawking = y[2];
    return w;
  };
  std::vector<double> breaks{s_max};
  if (bump) breaks = {bump->s1, bump->s2, s_max};
  WarpProfile out(std::move(family), eval, true, 1.0, breaks);
  return with_exterior(std::move(out), ext.M, s_max);
}

}  // namespace

WarpProfile with_exterior(WarpProfile profile, double M, double s0) {
  profile.has_exterior_ = true;
  profile.exterior_mass_ = M;
  profile.exterior_start_ = s0;
  return profile;
}

double Bump::operator()(double s) const {
  if (s <= s1 || s >= s2) return 0.0;
  const double x = (2.0 * s - s1 - s2) / (s2 - s1);
  const double w = 1.0 - x * x;
  return w * w * w;
}

void Bump::validate() const {
  if (!(s1 >= 0.0 && s2 > s1)) throw DomainError("bump: need 0 <= s1 < s2");
}

WarpProfile::WarpProfile(std::string family, Evaluator eval, bool minimal_boundary,
                         double af_exponent, std::vector<double> breakpoints)
    : family_(std::move(family)),
      eval_(std::move(eval)),
      minimal_(minimal_boundary),
      af_exponent_(af_exponent),
      breaks_(std::move(breakpoints)) {
  if (!(af_exponent_ > 0.5)) throw DomainError("warp profile: AF exponent must exceed 1/2");
  std::sort(breaks_.begin(), breaks_.end());
}

double WarpProfile::scalar_curvature(double s) const {
  const WarpPoint w = at(s);
  return 2.0 * (1.0 - w.dphi * w.dphi) / (w.phi * w.phi) - 4.0 * w.ddphi / w.phi;
}

WarpProfile WarpProfile::scaled(double lambda) const {
  if (!(lambda > 0.0)) throw DomainError("scaled: lambda must be positive");
  auto inner = eval_;
  auto eval = [inner, lambda](double s) {
    WarpPoint w = inner(s / lambda);
    w.phi *= lambda;
    w.ddphi /= lambda;
    w.hawking *= lambda;
    return w;
  };
  std::vector<double> breaks = breaks_;
  for (double& b : breaks) b *= lambda;
  WarpProfile out(family_, eval, minimal_, af_exponent_, breaks);
  if (has_exterior_) out = with_exterior(std::move(out), lambda * exterior_mass_, lambda * exterior_start_);
  return out;
}

WarpProfile family_schwarzschild(double m, double s_max) {
  if (s_max <= 0.0) s_max = 10.0 * m;
  return integrate_family("schwarzschild", m, 0.0, std::nullopt, s_max);
}

WarpProfile family_bumped(double m0, double eps, const Bump& bump, double s_max) {
  bump.validate();
  if (s_max <= 0.0) s_max = bump.s2 + 4.0 * m0 + 1.0;
  if (!(bump.s2 < s_max)) throw DomainError("family_bumped: bump must end before s_max");
  return integrate_family("bumped", m0, eps, bump, s_max);
}

WarpProfile family_euclidean(double radius) {
  if (!(radius > 0.0)) throw DomainError("family_euclidean: radius must be positive");
  Exterior flat{0.0, 0.0, radius};
  WarpProfile out("euclidean", [flat](double s) { return flat.at(s); }, false, 1.0, {});
  return with_exterior(std::move(out), 0.0, 0.0);
}

SampledCurve scalar_curvature(const WarpProfile& warp, std::span<const double> s_grid) {
  std::vector<double> s(s_grid.begin(), s_grid.end()), R(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) R[i] = warp.scalar_curvature(s[i]);
  return SampledCurve(s, R);
}

// ---------------------------------------------------------------------------

namespace {

// int_Phi^inf phi^-k (1 - 2M/phi)^(-1/2) dphi by the binomial series in 2M/phi.
double exterior_tail(double Phi, double M, double k) {
  const double x = 2.0 * M / Phi;
  if (!(std::abs(x) < 0.95)) throw NumericalError("exterior tail: too close to the horizon");
  double coef = 1.0;  // binomial coefficient of (1 - x)^(-1/2)
  double xn = 1.0;
  double sum = 0.0;
  for (int n = 0; n < 2000; ++n) {
    const double term = coef * xn / (k + n - 1.0);
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
    coef *= (n + 0.5) / (n + 1.0);
    xn *= x;
  }
  return sum * std::pow(Phi, 1.0 - k);
}

}  // namespace

RadialPotential::RadialPotential(std::shared_ptr<const WarpProfile> warp, double p,
                                 const numerics::Tolerances& tol)
    : warp_(std::move(warp)), p_(p), k_(0.0), tol_(tol) {
  check_p(p);
  tol_.validate();
  if (!warp_->has_exterior()) {
    throw DomainError("radial_p_harmonic: profile needs a closed-form exterior");
  }
  k_ = 2.0 / (p - 1.0);
  const double s_end = warp_->exterior_start();
  // Cells: breakpoints split [0, s_end]; each piece uniformly refined.
  std::vector<double> edges{0.0};
  for (double b : warp_->breakpoints()) {
    if (b > edges.back() && b < s_end) edges.push_back(b);
  }
  if (s_end > edges.back()) edges.push_back(s_end);
  const double h0 = 0.02 * warp_->phi(0.0);
  nodes_.push_back(0.0);
  for (std::size_t j = 1; j < edges.size(); ++j) {
    const double len = edges[j] - edges[j - 1];
    const auto n = std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(len / h0)));
    for (std::size_t i = 1; i <= n; ++i) {
      nodes_.push_back(i == n ? edges[j] : edges[j - 1] + len * static_cast<double>(i) / n);
    }
  }
  cumulative_.assign(nodes_.size(), 0.0);
  const double k = k_;
  const auto& w = *warp_;
  cumulative_.back() = exterior_tail(w.phi(nodes_.back()), w.exterior_mass(), k);
  for (std::size_t i = nodes_.size() - 1; i-- > 0;) {
    cumulative_[i] = cumulative_[i + 1] +
                     numerics::quad_gauss_legendre(
                         [&](double s) { return std::pow(w.phi(s), -k); }, nodes_[i], nodes_[i + 1]);
  }
  C_ = 1.0 / cumulative_.front();
  if (!std::isfinite(C_) || !(C_ > 0.0)) throw NumericalError("radial_p_harmonic: bad normalization");
}

double RadialPotential::tail_integral(double s) const {
  if (!(s >= 0.0)) throw DomainError("radial potential at negative s");
  if (s >= nodes_.back()) return exterior_tail(warp_->phi(s), warp_->exterior_mass(), k_);
  const std::size_t i = numerics::locate_cell(nodes_, s);
  if (s == nodes_[i]) return cumulative_[i];
  const double k = k_;
  const auto& w = *warp_;
  return cumulative_[i + 1] + numerics::quad_gauss_legendre(
                                  [&](double x) { return std::pow(w.phi(x), -k); }, s,
                                  nodes_[i + 1]);
}

double RadialPotential::u(double s) const { return C_ * tail_integral(s); }

double RadialPotential::du(double s) const { return -C_ * std::pow(warp_->phi(s), -k_); }

double RadialPotential::v(double s) const {
  return std::pow(warp_->phi(s), -k_) / tail_integral(s);
}

RadialPotential radial_p_harmonic(const WarpProfile& warp, double p, const numerics::Tolerances& tol) {
  return RadialPotential(std::make_shared<const WarpProfile>(warp), p, tol);
}

double capacity_Cp(const WarpProfile& warp, double p, const numerics::Tolerances& tol) {
  const auto pot = radial_p_harmonic(warp, p, tol);
  return 4.0 * kPi * std::pow(pot.flux_constant(), p - 1.0);
}

namespace {

// s-grid clustered near the boundary: s = phi0 (e^x - 1), x uniform.
std::vector<double> boundary_grid(double phi0, double s_far, std::size_t n) {
  std::vector<double> s(n);
  const double x_hi = std::log1p(s_far / phi0);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = phi0 * std::expm1(x_hi * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  s.front() = 0.0;
  s.back() = s_far;
  return s;
}

}  // namespace

Masses masses(const WarpProfile& warp, double s_far) {
  const auto s = boundary_grid(warp.phi(0.0), s_far, 2000);
  std::vector<double> phi(s.size()), m(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const WarpPoint w = warp.at(s[i]);
    phi[i] = w.phi;
    m[i] = w.hawking;
  }
  Masses out;
  out.hawking = SampledCurve(s, m);
  out.adm = numerics::fit_power_tail(phi, m, 0.0).c0;
  return out;
}

PotentialAsymptote potential_asymptote(const WarpProfile& warp, double p,
                                       const numerics::Tolerances& tol) {
  const auto pot = radial_p_harmonic(warp, p, tol);
  const double kappa = (3.0 - p) / (p - 1.0);
  const auto s = boundary_grid(warp.phi(0.0), 1e6, 2000);
  std::vector<double> phi(s.size()), y(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    phi[i] = warp.phi(s[i]);
    y[i] = pot.u(s[i]) * std::pow(phi[i], kappa);
  }
  PotentialAsymptote out;
  out.fitted = numerics::fit_power_tail(phi, y, 0.0).c0;
  const double Cp = 4.0 * kPi * std::pow(pot.flux_constant(), p - 1.0);
  out.predicted = (p - 1.0) / (3.0 - p) * std::pow(Cp / (4.0 * kPi), 1.0 / (p - 1.0));
  return out;
}

// ---------------------------------------------------------------------------

SampledCurve FlowProfile::curve(const std::vector<double>& column) const {
  return SampledCurve(t, column);
}

FlowProfile level_flow(const WarpProfile& warp, double p, const FlowOptions& options) {
  check_p(p);
  if (!warp.minimal_boundary()) {
    throw HypothesisError("level_flow: boundary is not minimal (" + warp.family() + ")");
  }
  if (!(options.dt > 0.0) || !(options.s_far > 0.0)) throw DomainError("level_flow: bad grid options");
  const auto pot = radial_p_harmonic(warp, p, options.tol);
  const double k = 2.0 / (p - 1.0);
  const double kappa = k - 1.0;
  const double beta = kappa / (p - 1.0);
  auto t_of_s = [&](double s) { return (1.0 - p) * std::log(pot.u(s)); };
  const double t_max = t_of_s(options.s_far);
  const auto n = static_cast<std::size_t>(std::floor(t_max / options.dt)) + 1;
  if (n < 8) throw DomainError("level_flow: fewer than 8 grid points");

  FlowProfile flow;
  flow.p = p;
  flow.flux_constant = pot.flux_constant();
  flow.Cp = 4.0 * kPi * std::pow(pot.flux_constant(), p - 1.0);
  flow.adm = masses(warp, options.s_far).adm;
  for (auto* col : {&flow.t, &flow.s, &flow.phi, &flow.dphi, &flow.u, &flow.du, &flow.W,
                    &flow.dWdt, &flow.d2Wdt2, &flow.H, &flow.R, &flow.hawking}) {
    col->resize(n);
  }

  double s_prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double target = options.dt * static_cast<double>(i);
    double s = s_prev;
    if (i > 0) {
      // bracket, then safeguarded Newton
      double lo = s_prev, hi = std::max(2.0 * s_prev, s_prev + warp.phi(0.0));
      while (t_of_s(hi) < target) hi *= 2.0;
      s = 0.5 * (lo + hi);
      for (int it = 0; it < 200; ++it) {
        const double f = t_of_s(s) - target;
        if (f > 0.0) hi = s; else lo = s;
        double next = s - f / ((p - 1.0) * pot.v(s));
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const bool done = std::abs(next - s) <= 1e-15 * std::max(1.0, s);
        s = next;
        if (done) break;
      }
    }
    s_prev = s;

    const WarpPoint w = warp.at(s);
    const double v = pot.v(s);
    const double W = 4.0 * kPi * (p - 1.0) * (p - 1.0) * w.phi * w.phi * v * v;
    const double H = 2.0 * w.dphi / w.phi;
    const double G = 2.0 / (p - 1.0) - beta * H / v;
    const double Hs = 2.0 * w.ddphi / w.phi - 0.5 * H * H;
    const double HVs = Hs / v - H + 0.5 * k * H * H / v;
    const double Gt = -beta * HVs / ((p - 1.0) * v);

    flow.t[i] = target;
    flow.s[i] = s;
    flow.phi[i] = w.phi;
    flow.dphi[i] = w.dphi;
    flow.u[i] = i == 0 ? 1.0 : pot.u(s);
    flow.du[i] = pot.du(s);
    flow.W[i] = W;
    flow.dWdt[i] = W * G;
    flow.d2Wdt2[i] = W * (G * G + Gt);
    flow.H[i] = H;
    flow.R[i] = 2.0 * (1.0 - w.dphi * w.dphi) / (w.phi * w.phi) - 4.0 * w.ddphi / w.phi;
    flow.hawking[i] = w.hawking;
  }
  return flow;
}

WResidual w_inequality_residual(const FlowProfile& flow) {
  const double p = flow.p;
  const double pq = (p - 1.0) * (3.0 - p);
  const double k4 = (p - 1.0) * (5.0 - p) / 4.0;
  const double target = 4.0 * kPi * (3.0 - p) * (3.0 - p);
  const std::size_t n = flow.size();
  std::vector<double> res(n);
  WResidual out;
  out.min_residual = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double W = flow.W[i], Wt = flow.dWdt[i];
    res[i] = pq * flow.d2Wdt2[i] - W + target - 2.0 * (2.0 - p) * Wt - k4 * Wt * Wt / W;
    const double expected = 2.0 * kPi * (3.0 - p) * (3.0 - p) * flow.R[i] * flow.phi[i] * flow.phi[i];
    out.identity_gap = std::max(out.identity_gap, std::abs(res[i] - expected));
    out.min_residual = std::min(out.min_residual, res[i]);
  }
  const double dt = flow.t[1] - flow.t[0];
  for (std::size_t i = 2; i + 2 < n; ++i) {
    const double fd = (-flow.W[i + 2] + 16.0 * flow.W[i + 1] - 30.0 * flow.W[i] +
                       16.0 * flow.W[i - 1] - flow.W[i - 2]) /
                      (12.0 * dt * dt);
    out.fd_gap = std::max(out.fd_gap, std::abs(fd - flow.d2Wdt2[i]) / target);
  }
  out.residual = SampledCurve(flow.t, res);
  return out;
}

}  // namespace pmono::warp
