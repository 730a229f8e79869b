#include <cmath>
#include <map>
#include <numbers>

#include "doctest.h"
#include "pmono/coefficient_flows.hpp"
#include "pmono/frobenius.hpp"

using namespace pmono;
using namespace pmono::coeffs;
using std::numbers::pi;

namespace {

const model::ModelGeometry& model_at(double p) {
  static std::map<double, model::ModelGeometry> cache;
  auto it = cache.find(p);
  if (it == cache.end()) it = cache.emplace(p, model::model_profile(p)).first;
  return it->second;
}

const double kGrid[] = {1.2, 1.5, 1.8};

}  // namespace

TEST_CASE("a, b, c asymptotics") {
  for (double p : kGrid) {
    const auto& m = model_at(p);
    const double r = 1e5;
    const ABC k = abc_at(m, r);
    // leading r^-1 coefficients, next order checked through the r^-2 term
    CHECK(r * k.a == doctest::Approx(-(3 - p) + (3 - p) * (3 - p) / r).epsilon(1e-8));
    CHECK(r * k.b == doctest::Approx(-1 / (p - 1) + (3 - p) / (p - 1) / r).epsilon(1e-8));
    CHECK(r * k.c ==
          doctest::Approx(2 * (p - 2) / (p - 1) -
                          (2 * (p - 2) * (3 - p) / (p - 1) + (5 - p)) / r)
              .epsilon(1e-8));
    const auto curves = abc_curves(m);
    for (double b : curves.b_curve.values()) CHECK(b < 0.0);
  }
}

TEST_CASE("decaying branch") {
  for (double p : kGrid) {
    const auto& m = model_at(p);
    const auto sol = solve_decaying(m);
    CHECK(sol.flavor() == Flavor::decaying);
    for (double h : sol.h_curve.values()) CHECK(h > 0.0);
    for (double f : sol.f_curve.values()) CHECK(f < 0.0);
    // g*, h*, f* vanish at the far end like R^-kappa
    const Triple v0 = sol.at_r(1.0), vR = sol.at_r(m.R_max());
    const double decay = std::pow(m.R_max(), -m.kappa());
    CHECK(std::abs(vR.g) <= 2 * decay);
    CHECK(std::abs(vR.h) <= 2 * decay / (p - 1));
    CHECK(std::abs(vR.f) <= 2 * decay);

    // identity at the horizon: -4 pi (3-p)^2 f(0) / (g(0) + 2(3-p) h(0)) = W_s(0)
    const double denom = v0.g + 2 * (3 - p) * v0.h;
    CHECK(v0.f < 0.0);
    CHECK(denom > 0.0);
    const double W0 = model::ws_boundary_data(m).W0;
    CHECK(-4 * pi * (3 - p) * (3 - p) * v0.f / denom == doctest::Approx(W0).epsilon(1e-6));

    // asymptotic shape g ~ r^-kappa, h ~ r^-kappa/(p-1), up to O(1/r)
    const double kappa = m.kappa();
    const double r = 1e5;
    const Triple v = sol.at_r(r);
    CHECK(v.g * std::pow(r, kappa) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(v.h * std::pow(r, kappa) == doctest::Approx(1.0 / (p - 1)).epsilon(1e-3));
  }
  const auto& m15 = model_at(1.5);
  CHECK(-4 * pi * 2.25 * solve_decaying(m15).at_r(1.0).f /
            (solve_decaying(m15).at_r(1.0).g + 3.0 * solve_decaying(m15).at_r(1.0).h) ==
        doctest::Approx(2.76117).epsilon(1e-5));
}

TEST_CASE("decaying branch is stable under moving the seed point") {
  const auto& m = model_at(1.5);
  const auto m2 = model::model_profile(1.5, 2 * m.R_max());
  const Triple a = solve_decaying(m).at_r(1.0), b = solve_decaying(m2).at_r(1.0);
  CHECK(b.f == doctest::Approx(a.f).epsilon(1e-6));
  CHECK(b.g == doctest::Approx(a.g).epsilon(1e-6));
  CHECK(b.h == doctest::Approx(a.h).epsilon(1e-6));
}

TEST_CASE("growing branch") {
  for (double p : kGrid) {
    const auto& m = model_at(p);
    const auto sol = solve_growing(m);
    CHECK(sol.flavor() == Flavor::growing);
    CHECK(sol.c1() > 0.0);
    for (double h : sol.h_curve.values()) CHECK(h > 0.0);
    for (double g : sol.g_curve.values()) CHECK(g < 0.0);
    const Triple v0 = sol.at_r(1.0);
    CHECK(v0.g + 2 * (3 - p) * v0.h < 0.0);
    CHECK(v0.f == doctest::Approx(sol.q()).epsilon(1e-14));

    // h - r/(3-p) -> 1 and g + r -> -4/(3-p) (not -4/(p-1))
    const auto rs = m.u_curve.abscissae();
    std::vector<double> dh, dg;
    for (double r : rs) {
      const Triple v = sol.at_r(r);
      dh.push_back(v.h - r / (3 - p));
      dg.push_back(v.g + r);
    }
    const double h_const = numerics::fit_power_tail(rs, dh, 0.0, 1e-6, 1e5).c0;
    const double g_const = numerics::fit_power_tail(rs, dg, 0.0, 1e-6, 1e5).c0;
    CHECK(h_const == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(g_const == doctest::Approx(-4.0 / (3 - p)).epsilon(1e-6));
    CHECK(g_const != doctest::Approx(-4.0 / (p - 1)).epsilon(1e-3));

    // f - c_tilde e^(t/(3-p)) -> 3 - p, with c_tilde from the model fit
    std::vector<double> df;
    for (double r : rs) {
      df.push_back(sol.at_r(r).f - m.c_tilde * std::exp(m.t(r) / (3 - p)));
    }
    CHECK(numerics::fit_power_tail(rs, df, 0.0, 1e-4, 1e4).c0 ==
          doctest::Approx(3 - p).epsilon(1e-4));
  }
}

TEST_CASE("changing the starting slope adds a multiple of the decaying branch") {
  const auto& m = model_at(1.5);
  const auto dec = solve_decaying(m);
  CoefficientOptions opt;
  const auto ref = solve_growing(m, opt);
  for (double eps : {0.005, 0.02}) {
    opt.epsilon = eps;
    const auto sol = solve_growing(m, opt);
    const double lambda = (sol.at_r(1.0).g - ref.at_r(1.0).g) / dec.at_r(1.0).g;
    for (double r : {1.0, 1.7, 4.0, 30.0}) {
      const Triple a = sol.at_r(r), b = ref.at_r(r), d = dec.at_r(r);
      CHECK(a.g - b.g == doctest::Approx(lambda * d.g).epsilon(1e-6).scale(std::abs(b.g)));
      CHECK(a.h - b.h == doctest::Approx(lambda * d.h).epsilon(1e-6).scale(std::abs(b.h)));
      CHECK(a.f - b.f == doctest::Approx(lambda * d.f).epsilon(1e-6).scale(std::abs(b.f)));
    }
    // hence Q_s, which vanishes on the decaying branch, is unchanged
    const double W0 = m.Ws(1.0), dW0 = m.dWs_dt(1.0);
    CHECK(monotone_quantity(1.5, sol.at_r(1.0), W0, dW0) ==
          doctest::Approx(monotone_quantity(1.5, ref.at_r(1.0), W0, dW0)).epsilon(1e-6));
  }
  opt.epsilon = -0.01;
  CHECK_THROWS_AS(solve_growing(m, opt), DomainError);
}

TEST_CASE("growing minus decaying component has pure growing asymptotics") {
  const double p = 1.5;
  const auto& m = model_at(p);
  const auto grow = solve_growing(m);
  const auto rs = m.u_curve.abscissae();
  std::vector<double> g;
  for (double r : rs) g.push_back(grow.at_r(r).g);
  const auto fit = numerics::fit_power_tail(rs, g, 1.0);
  CHECK(fit.residual < 1e-6);
  CHECK(fit.c0 == doctest::Approx(-1.0).epsilon(1e-8));
  // frobenius recurrence: g1 = -r(1 + A/r), A = 4/(3-p)
  const auto series = frobenius::series_coefficients(frobenius::coefficient_equation(p), 1.0, 1);
  CHECK(fit.c1 == doctest::Approx(series.coefficients[0]).epsilon(1e-5));
}

TEST_CASE("system residuals") {
  for (double p : kGrid) {
    const auto& m = model_at(p);
    for (const auto& sol : {solve_decaying(m), solve_growing(m)}) {
      const auto res = system_residual(sol, m);
      CHECK(res.first <= 1e-6);
      CHECK(res.second <= 1e-6);
      CHECK(res.square <= 1e-6);
      CHECK(res.max() <= m.tolerances().accept_rel);
    }
  }
}

TEST_CASE("Q_s is constant on the model") {
  for (double p : kGrid) {
    const auto& m = model_at(p);
    const double W0 = m.Ws(1.0);
    const auto dec = model_constancy(solve_decaying(m), m);
    CHECK(std::abs(dec.Q0) <= 1e-6 * W0);
    CHECK(dec.max_deviation <= 1e-6 * W0);
    const auto grow = model_constancy(solve_growing(m), m);
    CHECK(grow.Q0 != 0.0);
    CHECK(grow.max_deviation <= 1e-6 * std::abs(grow.Q0));
  }
}

TEST_CASE("monotone quantity") {
  const Triple c{1.0, 2.0, 3.0};
  // 4 pi (1.5)^2 * 1 + 2 * 5 + 0.5 * 1.5 * 3 * 7
  CHECK(monotone_quantity(1.5, c, 5.0, 7.0) == doctest::Approx(9 * pi + 10 + 15.75));
  CHECK(std::string(to_string(Flavor::growing)) == "growing");
}
