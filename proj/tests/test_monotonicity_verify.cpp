#include <cmath>
#include <map>
#include <numbers>

#include "doctest.h"
#include "pmono/errors.hpp"
#include "pmono/monotonicity_verify.hpp"

using namespace pmono;
using namespace pmono::verify;
using std::numbers::pi;

namespace {

const ModelBundle& bundle_at(double p) {
  static std::map<double, ModelBundle> cache;
  auto it = cache.find(p);
  if (it == cache.end()) it = cache.emplace(p, build_bundle(p)).first;
  return it->second;
}

const double kGrid[] = {1.2, 1.5, 1.8};

QCurve synthetic(std::vector<double> values) {
  QCurve q;
  for (std::size_t i = 0; i < values.size(); ++i) {
    q.t.push_back(0.1 * static_cast<double>(i));
    q.r_model.push_back(1.0 + static_cast<double>(i));
  }
  q.values = std::move(values);
  q.scale = 1.0;
  return q;
}

}  // namespace

TEST_CASE("monotonicity report on synthetic data") {
  const auto inc = monotonicity_report(synthetic({0.0, 0.1, 0.3, 0.35, 1.0}));
  CHECK(inc.violations.empty());
  CHECK(inc.min_forward_slope == doctest::Approx(0.5));
  CHECK_FALSE(inc.equality_flag);

  const auto flat = monotonicity_report(synthetic({2.0, 2.0, 2.0, 2.0}));
  CHECK(flat.violations.empty());
  CHECK(flat.equality_flag);

  const auto dip = monotonicity_report(synthetic({0.0, 0.1, 0.05, 0.2}));
  REQUIRE(dip.violations.size() == 1);
  CHECK(dip.violations[0].t == doctest::Approx(0.1));
  CHECK(dip.min_forward_slope == doctest::Approx(-0.5));
  CHECK(dip.max_violation == doctest::Approx(0.5 - 1e-8));

  // slopes past the certification window are not examined
  MonotonicityOptions opt;
  opt.r_window = 2.5;
  CHECK(monotonicity_report(synthetic({0.0, 0.1, 0.05, 0.2}), opt).violations.empty());
}

TEST_CASE("model radius matches the model and extends continuously") {
  const auto& m = *bundle_at(1.5).model;
  for (double r : {1.0, 3.0, 1e3, 1e5}) CHECK(model_radius(m, m.t(r)) == doctest::Approx(r).epsilon(1e-12));
  const double t_end = m.t(m.evaluation_limit());
  const double r_end = model_radius(m, t_end);
  CHECK(model_radius(m, t_end + 1e-9) == doctest::Approx(r_end).epsilon(1e-8));
  // (r + 3 - p) e^(-t/(3-p)) -> c_tilde
  const double t = t_end + 2.0;
  CHECK((model_radius(m, t) + 1.5) * std::exp(-t / 1.5) == doctest::Approx(m.c_tilde).epsilon(1e-8));
}

TEST_CASE("Schwarzschild members are equality cases") {
  for (double p : kGrid) {
    const auto& b = bundle_at(p);
    const double Ws0 = model::ws_boundary_data(*b.model).W0;
    for (double mass : {1.0, 2.0, 5.0}) {
      const auto v = verify_metric(warp::family_schwarzschild(mass), b);
      CHECK(std::abs(v.penrose.penrose_margin) <= 1e-6 * mass);
      CHECK(v.penrose.equality_flag);
      CHECK(v.decaying.equality_flag);
      CHECK(v.growing.equality_flag);
      CHECK(std::abs(v.Q_dec0) <= 1e-6 * Ws0);
      CHECK(std::abs(v.decaying.limit_estimate) <= 1e-6 * Ws0);
      CHECK(v.decaying.diagnostics.at("max_deviation") <= 1e-6 * Ws0);
      CHECK(v.growing.diagnostics.at("max_deviation") <= 1e-6 * std::abs(v.Q_grow0));
      CHECK(v.decaying.violations.empty());
      CHECK(v.growing.violations.empty());
      CHECK(std::abs(v.horizon_gap) <= 1e-6 * Ws0);
      CHECK(v.Fp.limit == doctest::Approx(8 * pi * mass).epsilon(1e-5));
      CHECK(v.growing.limit_estimate == doctest::Approx(v.Q_grow0).epsilon(1e-6));
    }
  }
}

TEST_CASE("bumped members are strict") {
  for (double p : kGrid) {
    const auto& b = bundle_at(p);
    const double Ws0 = model::ws_boundary_data(*b.model).W0;
    const double Qs_grow = coeffs::model_constancy(*b.growing, *b.model).Q0;
    for (double eps : {0.05, 0.1}) {
      const auto v = verify_metric(warp::family_bumped(1.0, eps), b);
      CHECK(v.penrose.penrose_margin > 0.0);
      CHECK_FALSE(v.penrose.equality_flag);
      CHECK(v.decaying.min_forward_slope >= -1e-8);
      CHECK(v.growing.min_forward_slope >= -1e-8);
      CHECK(v.decaying.violations.empty());
      CHECK(v.growing.violations.empty());
      CHECK_FALSE(v.decaying.equality_flag);
      CHECK_FALSE(v.growing.equality_flag);
      // chain of the corollary: Q_*(0) <= 0 <=> W(0) <= W_s(0); Q^*(0) >= Q^*_s(0)
      CHECK(v.Q_dec0 < 0.0);
      CHECK(v.horizon_gap > 0.0);
      CHECK(v.Q_grow0 > Qs_grow);
      CHECK(std::abs(v.decaying.limit_estimate) <= 1e-6 * Ws0);
      CHECK(v.Fp.limit <= v.Fp.bound + 1e-6);
      CHECK(v.R_min >= -1e-12);  // exactly zero off the bump, up to rounding
    }
  }
}

TEST_CASE("hypotheses are enforced") {
  const auto& b = bundle_at(1.5);
  CHECK_THROWS_AS(verify_metric(warp::family_euclidean(1.0), b), HypothesisError);
  CHECK_THROWS_AS(verify_metric(warp::family_bumped(1.0, -0.1), b), HypothesisError);
  const auto flow = warp::level_flow(warp::family_schwarzschild(1.0), 1.2);
  CHECK_THROWS_AS(evaluate_Q(flow, *b.decaying, *b.model), DomainError);
  CHECK_THROWS_AS(horizon_W_bound(warp::level_flow(warp::family_schwarzschild(1.0), 1.5), *b.growing),
                  DomainError);
}

TEST_CASE("margin scales with the metric and is grid independent") {
  const auto& b = bundle_at(1.5);
  const auto w = warp::family_bumped(1.0, 0.1);
  const double m1 = verify_metric(w, b).penrose.penrose_margin;
  for (double lambda : {0.5, 2.0}) {
    warp::FlowOptions fo;
    fo.s_far = 1e6 * lambda;
    CHECK(verify_metric(w.scaled(lambda), b, fo).penrose.penrose_margin ==
          doctest::Approx(lambda * m1).epsilon(1e-6));
  }
  warp::FlowOptions fine;
  fine.dt = 0.005;
  CHECK(verify_metric(w, b, fine).penrose.penrose_margin == doctest::Approx(m1).epsilon(1e-6));
}

TEST_CASE("mass functional vanishes with the mass") {
  const double p = 1.5;
  std::vector<double> limits;
  for (double m0 : {1e-1, 1e-2}) {
    const auto flow = warp::level_flow(warp::family_bumped(m0, m0, {1.0, 2.0}), p);
    const auto F = mass_functional_Fp(flow);
    CHECK(F.limit <= F.bound + 1e-6);
    CHECK(F.limit > 0.0);
    limits.push_back(F.limit);
  }
  CHECK(limits[1] < 0.2 * limits[0]);
}

TEST_CASE("growing-limit bound candidates") {
  // Schwarzschild: (K_p/C_p)^(1/(3-p)) m = 2
  warp::FlowProfile flow;
  flow.p = 1.5;
  flow.Cp = 1.0;
  flow.adm = 2.0;
  const auto b = growing_bound(122.5, flow, 1.0);
  CHECK(b.bound_without_factor == doctest::Approx(16 * pi * 2.25 - 4 * pi * 6.25));
  CHECK(b.bound_with_factor == doctest::Approx(16 * pi * 2.25 * std::cbrt(3.0) - 4 * pi * 6.25));
  CHECK(b.bound_with_factor == doctest::Approx(84.57).epsilon(1e-3));
  CHECK(b.measured == 122.5);
}
