#include <cmath>
#include <numbers>

#include "doctest.h"
#include "pmono/schwarzschild_model.hpp"

using namespace pmono;
using namespace pmono::model;
using std::numbers::pi;

namespace {

const ModelGeometry& model15() {
  static const ModelGeometry m = model_profile(1.5);
  return m;
}

}  // namespace

TEST_CASE("flux constant") {
  // int_1^inf sigma^2/(sigma+1)^6 = 1/60 exactly.
  CHECK(flux_constant(1.5) == doctest::Approx(60.0).epsilon(1e-10));
  CHECK(model15().flux_constant() == doctest::Approx(60.0).epsilon(1e-12));
  CHECK_THROWS_AS(flux_constant(1.0), DomainError);
  CHECK_THROWS_AS(flux_constant(2.0), DomainError);
  CHECK_THROWS_AS(model_profile(2.5), DomainError);
  CHECK_THROWS_AS(model_profile(1.5, 1e3), DomainError);
}

TEST_CASE("Euclidean analogue of the flux constant is (3-p)/(p-1)") {
  numerics::Tolerances tol;
  for (double p : {1.2, 1.5, 1.8}) {
    const double I = numerics::quad_tail([p](double s) { return std::pow(s, -2.0 / (p - 1)); },
                                         1.0, {2.0 / (p - 1), 10.0}, tol);
    CHECK(1.0 / I == doctest::Approx((3 - p) / (p - 1)).epsilon(1e-12));
  }
}

TEST_CASE("model potential at p = 1.5") {
  const auto& m = model15();
  CHECK(m.u(1.0) == 1.0);
  CHECK(m.du(1.0) == doctest::Approx(-15.0 / 16.0).epsilon(1e-12));
  CHECK(m.t(1.0) == doctest::Approx(0.0));
  // closed form: u(r) = 60 * int_r^inf s^2/(s+1)^6
  //   = 60 [1/(3 x^3) - 1/(2 x^4) + 1/(5 x^5)],  x = r + 1
  for (double r : {1.0, 2.0, 10.0, 1234.5, 9e5}) {
    const double x = r + 1.0;
    const double exact =
        60.0 * (1.0 / (3 * std::pow(x, 3)) - 1.0 / (2 * std::pow(x, 4)) + 1.0 / (5 * std::pow(x, 5)));
    CHECK(m.u(r) == doctest::Approx(exact).epsilon(1e-11));
  }
}

TEST_CASE("u_s at t = 1 matches direct quadrature") {
  for (double p : {1.2, 1.5, 1.8}) {
    const auto m = model_profile(p);
    const double r = m.r_at_t(1.0);
    const double direct =
        m.flux_constant() *
        numerics::quad_tail([p](double s) { return flux_integrand(p, s); }, r,
                            {2.0 / (p - 1), 1e5}, {});
    CHECK(direct == doctest::Approx(std::exp(1.0 / (1.0 - p))).epsilon(1e-10));
    CHECK(m.u_curve(r) == doctest::Approx(direct).epsilon(1e-8));
  }
}

TEST_CASE("model invariants") {
  for (double p : {1.2, 1.5, 1.8}) {
    const auto m = model_profile(p);
    const auto rs = m.u_curve.abscissae();
    const auto us = m.u_curve.values();
    const auto ts = m.t_of_r.values();
    for (std::size_t i = 1; i < rs.size(); ++i) {
      CHECK(us[i] < us[i - 1]);
      CHECK(ts[i] > ts[i - 1]);
    }
    for (double w : m.Ws_curve.values()) CHECK(w > 0.0);
    // coordinate consistency
    for (std::size_t i = 0; i < rs.size(); i += 97) {
      CHECK(m.r_at_t(m.t(rs[i])) == doctest::Approx(rs[i]).epsilon(1e-12));
    }
    // Eq. residual of (p-1)u'' + (2/r + 2(p-3)/(r+r^2))u' with u'' by central differences
    for (double r : {1.5, 3.0, 20.0, 400.0}) {
      const double h = 1e-4 * r;
      const double d2 = (m.du(r + h) - m.du(r - h)) / (2 * h);
      const double res = (p - 1) * d2 + (2 / r + 2 * (p - 3) / (r + r * r)) * m.du(r);
      CHECK(std::abs(res) <= 1e-6 * std::abs((p - 1) * d2));
    }
    // W identity: 4pi(p-1)^2 r^2 (u'/u)^2 equals |grad w|_g^2 times the metric area
    for (double r : {1.0, 2.0, 50.0}) {
      const double rho = 1.0 + 1.0 / r;
      const double grad_w_g = (p - 1) * std::abs(m.du(r)) / m.u(r) / (rho * rho);
      const double area_g = 4 * pi * std::pow(rho, 4) * r * r;
      CHECK(m.Ws(r) == doctest::Approx(grad_w_g * grad_w_g * area_g).epsilon(1e-12));
    }
    // two-term expansion remainder stays bounded
    const double c = m.c_fit;
    const double b1 = -(3 - p) * (3 - p) / (p - 1);
    double prev = 0.0;
    for (double r : {1e3, 1e4, 1e5}) {
      const double rem = std::abs(m.u(r) / (c * std::pow(r, -m.kappa())) - 1 - b1 / r) * r * r;
      if (prev > 0) CHECK(rem < 2 * prev);
      prev = rem;
    }
  }
}

TEST_CASE("capacity K_p") {
  const auto chk = capacity_Kp(model15());
  CHECK(chk.Kp == doctest::Approx(4 * pi * std::sqrt(60.0)).epsilon(1e-12));
  CHECK(chk.Kp == doctest::Approx(97.33869).epsilon(1e-7));
  CHECK(chk.surface_integral == doctest::Approx(chk.Kp).epsilon(1e-12));
  CHECK(chk.max_flux_deviation < 1e-12);
  for (double p = 1.05; p < 1.96; p += 0.1) {
    CHECK(4 * pi * std::pow(flux_constant(p), p - 1) > 0.0);
  }
}

TEST_CASE("W_s boundary data") {
  const auto b = ws_boundary_data(model15());
  CHECK(b.W0 == doctest::Approx(pi * 225.0 / 256.0).epsilon(1e-12));
  CHECK(b.W0 == doctest::Approx(2.76117).epsilon(1e-5));
  CHECK(b.dW0 == doctest::Approx(4.0 * b.W0).epsilon(1e-10));
  // W_s(t) -> 4 pi (3-p)^2 = 9 pi
  const auto& m = model15();
  CHECK(m.Ws(m.R_max()) == doctest::Approx(9 * pi).epsilon(1e-5));
  CHECK(m.Ws_curve.values().back() == doctest::Approx(9 * pi).epsilon(1e-5));
}

TEST_CASE("normalization constants") {
  for (double p : {1.2, 1.5, 1.8}) {
    const auto m = model_profile(p);
    const auto c = c_constants(m);
    CHECK(c.c_fit > 0.0);
    CHECK(c.tilde_ratio == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(c.closed_form_ratio == doctest::Approx(1.0).epsilon(1e-6));
    // Remark-style normalization (K_p/4pi)^(1/(p-1)) is off by (p-1)/(3-p).
    CHECK(c.capacity_root_ratio == doctest::Approx((p - 1) / (3 - p)).epsilon(1e-6));
    CHECK(c.b1_fit == doctest::Approx(-(3 - p) * (3 - p) / (p - 1)).epsilon(1e-6));
  }
  // exact at p = 1.5: c_fit = C_s/kappa = 20
  CHECK(model15().c_fit == doctest::Approx(20.0).epsilon(1e-10));
}
