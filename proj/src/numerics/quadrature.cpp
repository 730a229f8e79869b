#include <array>
#include <cmath>
#include <sstream>
#include <vector>

#include "pmono/numerics.hpp"

namespace pmono::numerics {

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the nodes kXgk[1], kXgk[3], kXgk[5], kXgk[7].
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr std::array<double, 8> kXgl16 = {
    0.0950125098376374401853193354249581, 0.281603550779258913230460501460496,
    0.458016777657227386342419442983578,  0.617876244402643748446671764048791,
    0.755404408355003033895101194847442,  0.865631202387831743880467897712393,
    0.944575023073232576077988415534608,  0.989400934991649932596154173450333};
constexpr std::array<double, 8> kWgl16 = {
    0.189450610455068496285396723208283,  0.182603415044923588866763667969220,
    0.169156519395002538189312079030360,  0.149595988816576732081501730547479,
    0.124628971255533872052476282192016,  0.0951585116824927848099251076022463,
    0.0622535239386478928628438369943776, 0.0271524594117540948517805724560181};

struct Segment {
  double a, b, value, error;
};

Segment gk15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = kWgk[7] * fc;
  double gauss = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kWgk[j] * sum;
    if (j % 2 == 1) gauss += kWg[j / 2] * sum;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace

double quad_gauss_legendre(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t j = 0; j < kXgl16.size(); ++j) {
    const double dx = half * kXgl16[j];
    sum += kWgl16[j] * (f(center - dx) + f(center + dx));
  }
  return sum * half;
}

double quad_adaptive(const std::function<double(double)>& f, double a, double b,
                     double rel_tol, double abs_tol) {
  if (a == b) return 0.0;
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw DomainError("quad_adaptive: infinite limits; use quad_tail");
  }
  std::vector<Segment> work{gk15(f, a, b)};
  double total = work.front().value;
  double total_err = work.front().error;
  constexpr std::size_t kMaxSegments = 20000;
  while (total_err > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (work.size() >= kMaxSegments) {
      std::ostringstream msg;
      msg << "quad_adaptive: no convergence on [" << a << ", " << b
          << "], error estimate " << total_err;
      throw NumericalError(msg.str());
    }
    // Bisect the segment with the largest error estimate.
    std::size_t worst = 0;
    for (std::size_t i = 1; i < work.size(); ++i) {
      if (work[i].error > work[worst].error) worst = i;
    }
    const Segment s = work[worst];
    const double mid = 0.5 * (s.a + s.b);
    if (mid <= std::min(s.a, s.b) || mid >= std::max(s.a, s.b)) {
      // Cannot split further; accept what we have.
      break;
    }
    const Segment left = gk15(f, s.a, mid);
    const Segment right = gk15(f, mid, s.b);
    work[worst] = left;
    work.push_back(right);
    total = 0.0;
    total_err = 0.0;
    for (const auto& w : work) {
      total += w.value;
      total_err += w.error;
    }
    if (total_err < 1e-15 * std::abs(total)) break;
  }
  return total;
}

double quad_tail(const std::function<double(double)>& f, double a, const TailSpec& tail,
                 const Tolerances& tol) {
  const double kappa = tail.exponent;
  if (!(kappa > 1.0)) {
    throw DomainError("quad_tail: exponent must exceed 1 (integral diverges)");
  }
  if (!(tail.cutoff > 0.0)) throw DomainError("quad_tail: cutoff must be positive");
  const double cut = std::max(tail.cutoff, a);

  double finite = 0.0;
  if (cut > a) finite = quad_adaptive(f, a, cut, tol.quad_rel * 0.1);

  // v(x) = f(x) x^kappa ~ c0 + c0 c1 / x.
  auto v = [&](double x) { return f(x) * std::pow(x, kappa); };
  const double v1 = v(cut);
  const double v2 = v(2.0 * cut);
  const double v4 = v(4.0 * cut);
  const double c0 = 2.0 * v2 - v1;
  const double c0c1 = 2.0 * cut * (v1 - v2);
  const double predicted = c0 + c0c1 / (4.0 * cut);
  const double scale = std::max({std::abs(v1), std::abs(v2), std::abs(v4)});
  if (scale > 0.0 && std::abs(v4 - predicted) > 1e-2 * scale) {
    std::ostringstream msg;
    msg << "quad_tail: integrand beyond x=" << cut
        << " is inconsistent with decay exponent " << kappa;
    throw NumericalError(msg.str());
  }
  const double tail_value =
      c0 * std::pow(cut, 1.0 - kappa) / (kappa - 1.0) + c0c1 * std::pow(cut, -kappa) / kappa;
  return finite + tail_value;
}

}  // namespace pmono::numerics
