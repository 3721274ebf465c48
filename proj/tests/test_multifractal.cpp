#include <doctest.h>

#include <cmath>
#include <random>

#include "fractspec/dimension.hpp"
#include "fractspec/errors.hpp"
#include "fractspec/multifractal.hpp"
#include "oracles.hpp"

using namespace fractspec;

namespace {

SelfSimilarSystem step_system() { return build_system(std::vector<double>{0.25, 0.25, 0.25, 0.25, 0.5}); }

SelfSimilarSystem tent(double p) {
  const double a = tent_family_contractor(p);
  const double b = std::pow(a, p);
  return build_system(std::vector<double>{a, b, b, a});
}

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

}  // namespace

TEST_CASE("alpha and f of frequency vectors") {
  const auto s = step_system();
  const double ln2 = std::log(2.0);
  const auto half = vec({0.125, 0.125, 0.125, 0.125, 0.5});
  CHECK(alpha_of(half, s) == doctest::Approx(std::log(5.0) / (1.5 * ln2)).epsilon(1e-14));
  CHECK(alpha_of(half, s) == doctest::Approx(1.5480).epsilon(1e-4));
  CHECK(f_of(half, s) == doctest::Approx(4.0 / 3).epsilon(1e-14));
  CHECK(f_of(vec({0.25, 0.25, 0.25, 0.25, 0.0}), s) == doctest::Approx(1.0).epsilon(1e-14));
  for (int i = 0; i < 5; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(5);
    e(i) = 1.0;
    CHECK(f_of(e, s) == 0.0);
    CHECK(alpha_of(e, s) == doctest::Approx(std::log(0.2) / std::log(s.contractors()(i))));
  }
  const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(5, 0.2);
  CHECK(alpha_of(uniform, s) ==
        doctest::Approx(std::log(0.2) / (0.2 * s.contractors().array().log().sum())).epsilon(1e-14));
  CHECK_THROWS_AS(alpha_of(vec({0.5, 0.5, 0.1, 0.0, -0.1}), s), ValidationError);
  CHECK_THROWS_AS(f_of(vec({0.5, 0.5}), s), ValidationError);
}

TEST_CASE("alpha bounds") {
  const auto b = alpha_bounds(step_system());
  CHECK(b.alpha_min == doctest::Approx(std::log(5.0) / std::log(4.0)).epsilon(1e-14));
  CHECK(b.alpha_max == doctest::Approx(std::log(5.0) / std::log(2.0)).epsilon(1e-14));
  CHECK(b.argmin.size() == 4);

  const auto s = build_system(std::vector<double>{0.2, 0.3, 0.45});
  const double d0 = hausdorff_dim(s);
  const Eigen::VectorXd p = s.contractors().array().pow(d0).matrix();
  const auto deg = alpha_bounds(s.with_weights(p / p.sum()));
  CHECK(deg.alpha_min == doctest::Approx(d0).epsilon(1e-10));
  CHECK(deg.alpha_max == doctest::Approx(d0).epsilon(1e-10));

  const auto five = build_system(std::vector<double>{1.0 / 7, 1.0 / 7, 1.0 / 7, 2.0 / 7, 4.0 / 7});
  const auto case_a = alpha_bounds(five.with_weights(five.contractors() / five.length()));
  CHECK(case_a.alpha_min == doctest::Approx(mf_dim_min(five)).epsilon(1e-13));
}

TEST_CASE("partition function roots") {
  const auto s = step_system();
  CHECK(solve_omega(0.0, s) == doctest::Approx(hausdorff_dim(s)).epsilon(1e-13));
  CHECK(std::abs(solve_omega(1.0, s)) < 1e-13);
  const std::vector<double> a{0.25, 0.25, 0.25, 0.25, 0.5}, p(5, 0.2);
  CHECK(solve_omega(2.0, s) == doctest::Approx(oracle::partition_root(a, p, 2.0)).epsilon(1e-11));

  // the multiplier that yields lambda = (1/8, ..., 1/2)
  const auto ew = equal_weight_point(2.0, s);
  const auto cp = critical_point(ew.point.multiplier, s);
  CHECK((cp.frequencies - vec({0.125, 0.125, 0.125, 0.125, 0.5})).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(cp.point.f == doctest::Approx(4.0 / 3).epsilon(1e-12));

  // extreme multipliers stay finite in log space
  CHECK(std::isfinite(solve_omega(1e6, s)));
  CHECK(std::isfinite(solve_omega(-1e6, s)));
}

TEST_CASE("critical points") {
  const auto s = build_system(std::vector<double>{0.2, 0.35, 0.4});
  const double d0 = hausdorff_dim(s);
  const auto c0 = critical_point(0.0, s);
  CHECK((c0.frequencies - s.contractors().array().pow(d0).matrix()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(c0.point.f == doctest::Approx(d0).epsilon(1e-12));

  const auto w = s.with_weights(vec({0.5, 0.2, 0.3}));
  const auto c1 = critical_point(1.0, w);
  CHECK((c1.frequencies - w.weights()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(c1.point.f == doctest::Approx(c1.point.alpha).epsilon(1e-12));
  CHECK(std::abs(c1.frequencies.sum() - 1.0) < 1e-12);

  const auto eq = build_system(std::vector<double>{0.3, 0.3, 0.3}, std::vector<double>{0.6, 0.3, 0.1});
  for (double lam : {-3.0, 0.5, 2.0}) {
    const auto c = critical_point(lam, eq);
    const Eigen::VectorXd want = eq.weights().array().pow(lam).matrix();
    CHECK((c.frequencies - want / want.sum()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("equal-weight parameterization") {
  const auto s = build_system(std::vector<double>{1.0 / 7, 1.0 / 7, 1.0 / 7, 2.0 / 7, 4.0 / 7});
  const auto at0 = equal_weight_point(0.0, s).point;
  CHECK(at0.f == doctest::Approx(at0.alpha).epsilon(1e-14));
  CHECK(at0.f == doctest::Approx(information_dim(s)).epsilon(1e-14));
  const double d0 = hausdorff_dim(s);
  CHECK(equal_weight_point(d0, s).point.f == doctest::Approx(d0).epsilon(1e-12));
  CHECK(equal_weight_point(1.0, s).point.f == doctest::Approx(d_tilde(s)).epsilon(1e-13));
  // agrees with the direct formula
  const std::vector<double> a{1.0 / 7, 1.0 / 7, 1.0 / 7, 2.0 / 7, 4.0 / 7};
  for (double om : {-5.0, -1.0, 0.3, 2.0, 7.0}) {
    CHECK(equal_weight_f(om, s) == doctest::Approx(oracle::equal_weight_f(a, om)).epsilon(1e-12));
    // and with the multiplier parameterization
    const auto p = equal_weight_point(om, s).point;
    CHECK(critical_point(p.multiplier, s).point.alpha == doctest::Approx(p.alpha).epsilon(1e-10));
  }
}

TEST_CASE("Omega_min") {
  const double a = std::sqrt(2.0) - 1;
  const auto p2 = build_system(std::vector<double>{a, a * a, a * a, a});
  const auto om = omega_min(p2);
  CHECK(std::abs(om.f - 1.08983) < 1e-4);
  CHECK(std::abs(om.f - om.d_min) < 1e-10);
  CHECK(om.omega <= 1.0);
  CHECK_FALSE(om.used_scan);
  const std::vector<double> av{a, a * a, a * a, a};
  const double want = oracle::scan_root([&](double x) { return oracle::equal_weight_f(av, x) - mf_dim_min(p2); },
                                        -30.0, hausdorff_dim(p2));
  CHECK(om.omega == doctest::Approx(want).epsilon(1e-9));

  const auto s = step_system();
  const auto om2 = omega_min(s);
  CHECK(om2.f == doctest::Approx(1.0 + std::log(1.5) / std::log(4.0)).epsilon(1e-10));
  CHECK(om2.f == doctest::Approx(1.2925).epsilon(1e-4));

  CHECK_THROWS_AS(omega_min(build_system(std::vector<double>(3, 0.4))), ValidationError);
}

TEST_CASE("left branch of the equal-weight curve is increasing") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    const auto s = build_system(oracle::random_contractors(rng, 2 + t % 6));
    if (!has_distinct_contractors(s)) continue;
    const double d0 = hausdorff_dim(s);
    double prev = -1e300;
    for (int i = 0; i <= 400; ++i) {
      const double om = -40.0 + (d0 + 40.0) * i / 400.0;
      const double f = equal_weight_f(om, s);
      CHECK(f >= prev - 1e-12);
      prev = f;
    }
  }
}

TEST_CASE("Renyi dimensions") {
  const auto p2 = tent(2.0);
  CHECK(std::abs(renyi(p2, 1.0) - 1.048585) < 1e-5);
  const double a = tent_family_contractor(2.0);
  CHECK(renyi(p2, 1.0) == doctest::Approx(-std::log(4.0) / (1.5 * std::log(a))).epsilon(1e-14));
  CHECK(std::abs(renyi(tent(1.5), 1.0) - 1.152) < 1e-3);
  const auto koch = build_system(std::vector<double>(4, 1.0 / 3));
  for (double q : {-50.0, -2.0, 0.0, 0.5, 1.0, 3.0, 100.0}) {
    CHECK(renyi(koch, q) == doctest::Approx(std::log(4.0) / std::log(3.0)).epsilon(1e-12));
  }
  const auto w = build_system(std::vector<double>{0.3, 0.2, 0.45}, std::vector<double>{0.2, 0.5, 0.3});
  CHECK(renyi(w, 0.0) == doctest::Approx(hausdorff_dim(w)).epsilon(1e-10));
  CHECK(renyi(w, std::numeric_limits<double>::infinity()) == alpha_bounds(w).alpha_min);
  CHECK(renyi(w, -std::numeric_limits<double>::infinity()) == alpha_bounds(w).alpha_max);
  CHECK(renyi(w, 2e4) == alpha_bounds(w).alpha_min);
  // continuity at q = 1
  CHECK(renyi(w, 1.0 + 1e-6) == doctest::Approx(renyi(w, 1.0)).epsilon(1e-5));
  double prev = 1e300;
  for (int i = 0; i <= 200; ++i) {
    const double q = -20.0 + 0.2 * i;
    const double d = renyi(w, q);
    CHECK(d <= prev + 1e-10);
    prev = d;
  }
}

TEST_CASE("case (a) identification") {
  const auto five = case_a_identification(build_system(std::vector<double>{1.0 / 7, 1.0 / 7, 1.0 / 7, 2.0 / 7, 4.0 / 7}));
  CHECK(five.alpha_min == doctest::Approx(1.0 + std::log(9.0 / 7) / std::log(7.0)).epsilon(1e-13));
  CHECK(five.alpha_min_closed_form == doctest::Approx(five.alpha_min).epsilon(1e-13));
  CHECK(five.min_identity);
  CHECK(five.max_identity);
  const auto half = case_a_identification(build_system(std::vector<double>{0.5, 0.5}));
  CHECK(half.d_min == doctest::Approx(1.0));
  CHECK(half.d_max == doctest::Approx(1.0));
  CHECK(half.d_plus_inf == doctest::Approx(1.0));
  CHECK(half.d_zero == doctest::Approx(1.0));
  const auto step = case_a_identification(step_system());
  CHECK(std::abs(step.d_zero - oracle::quadratic_dim_step()) < 1e-10);
}

TEST_CASE("D tilde") {
  const double a = std::sqrt(2.0) - 1;
  CHECK(d_tilde(build_system(std::vector<double>{a, a * a, a * a, a})) >= 1.08983);
  CHECK(d_tilde(build_system(std::vector<double>{0.5, 0.5})) == doctest::Approx(1.0));
  const std::vector<double> av{1.0 / 7, 1.0 / 7, 1.0 / 7, 2.0 / 7, 4.0 / 7};
  const auto five = build_system(av);
  double len = 0.0, mean = 0.0;
  for (double x : av) len += x;
  for (double x : av) mean += x / len * std::log(1.0 / x);
  CHECK(d_tilde(five) == doctest::Approx(1.0 + std::log(len) / mean).epsilon(1e-14));
  CHECK(d_tilde(five) > mf_dim_min(five));
}

TEST_CASE("spectrum endpoints and apex") {
  const auto s = step_system();
  const auto ends = spectrum_endpoints(s);
  CHECK(ends.first.f == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ends.second.f == 0.0);
  const auto asym = equal_weight_asymptotes(s);
  CHECK(asym.m_min == 4);
  CHECK(asym.m_max == 1);

  SpectrumOptions opt;
  opt.parameter = SpectrumOptions::Parameter::Omega;
  opt.lo = -30;
  opt.hi = 30;
  const auto curve = spectrum(s, opt);
  double fmax = 0.0, at = 0.0;
  for (const auto& p : curve.points) {
    if (p.f > fmax) {
      fmax = p.f;
      at = p.omega;
    }
  }
  CHECK(fmax == doctest::Approx(hausdorff_dim(s)).epsilon(1e-8));
  CHECK(at == doctest::Approx(hausdorff_dim(s)).epsilon(1e-12));
  CHECK(curve.annotations.omega_min.has_value());
  CHECK(curve.annotations.d_tilde.has_value());

  // multiplier grid, general weights
  const auto w = s.with_weights(vec({0.1, 0.2, 0.3, 0.15, 0.25}));
  const auto cw = spectrum(w);
  CHECK_FALSE(cw.annotations.d_tilde.has_value());
  CHECK_THROWS_AS(spectrum(w, opt), ValidationError);
}

TEST_CASE("sampled curve invariants") {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 2 + static_cast<std::size_t>(t % 5);
    const auto s = build_system(oracle::random_contractors(rng, n), oracle::random_weights(rng, n));
    const auto curve = spectrum(s);
    const auto b = alpha_bounds(s);
    const double d0 = hausdorff_dim(s);
    for (std::size_t j = 0; j < curve.points.size(); ++j) {
      const auto& p = curve.points[j];
      CHECK(p.alpha >= b.alpha_min - 1e-10);
      CHECK(p.alpha <= b.alpha_max + 1e-10);
      CHECK(p.f <= d0 + 1e-10);
      CHECK(p.f >= -1e-10);
      CHECK(std::abs(p.f - (p.omega + p.multiplier * p.alpha)) < 1e-10);
      CHECK(std::abs(curve.frequencies.col(static_cast<Eigen::Index>(j)).sum() - 1.0) < 1e-12);
      if (j > 0) CHECK(p.alpha >= curve.points[j - 1].alpha);
    }
    // concavity: chord slopes decrease along alpha
    for (std::size_t j = 2; j < curve.points.size(); ++j) {
      const auto& p0 = curve.points[j - 2];
      const auto& p1 = curve.points[j - 1];
      const auto& p2 = curve.points[j];
      const double h0 = p1.alpha - p0.alpha, h1 = p2.alpha - p1.alpha;
      if (h0 < 1e-9 || h1 < 1e-9) continue;
      const double second = ((p2.f - p1.f) / h1 - (p1.f - p0.f) / h0) * (h0 * h1);
      CHECK(second <= 1e-8);
    }
  }
}

TEST_CASE("degenerate spectrum is one point") {
  const auto koch = build_system(std::vector<double>(4, 1.0 / 3));
  const auto c = spectrum(koch);
  REQUIRE(c.points.size() == 1);
  CHECK(c.monofractal);
  CHECK(c.points[0].alpha == doctest::Approx(std::log(4.0) / std::log(3.0)));
  CHECK(c.points[0].f == doctest::Approx(std::log(4.0) / std::log(3.0)));
}

TEST_CASE("shrink and invert") {
  const auto s = step_system();
  SpectrumOptions opt;
  opt.parameter = SpectrumOptions::Parameter::Omega;
  const auto curve = spectrum(s, opt);
  const double d0 = hausdorff_dim(s);
  const auto [sh, inv] = shrink_and_invert(curve, d0);
  double apex = 0.0;
  for (const auto& p : sh.points) apex = std::max(apex, p.f);
  CHECK(apex == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sh.left.alpha == doctest::Approx(std::log(0.2) / std::log(std::pow(0.25, d0))).epsilon(1e-12));
  for (std::size_t j = 0; j < curve.points.size(); ++j) {
    CHECK(sh.points[j].multiplier == curve.points[j].multiplier);
  }
  for (const auto& p : inv.points) {
    CHECK(std::abs(p.f - (p.omega + p.multiplier * p.alpha)) < 1e-10);
  }
  // a point with f = alpha maps to f* = 1
  const auto d1 = equal_weight_point(0.0, s).point;
  SpectrumCurve<double> one = curve;
  one.points = {d1};
  one.frequencies = equal_weight_point(0.0, s).frequencies;
  const auto [sh1, inv1] = shrink_and_invert(one, d0);
  CHECK(inv1.points[0].f == doctest::Approx(1.0).epsilon(1e-14));
  // tangent slope of the inverted curve is Omega / D_0
  CHECK(inv1.points[0].multiplier == doctest::Approx(d1.omega / d0));
  CHECK_THROWS_AS(shrink_and_invert(curve, 0.0), ValidationError);
}

TEST_CASE("bordered Hessian, two maps") {
  const auto s = build_system(std::vector<double>{0.5, 0.25});
  const auto h = hessian_check(1.0, s);
  REQUIRE(h.applicable);
  CHECK((h.b_terms.array() < 0).all());
  const double want = -h.b_terms(1) * h.a_terms(0) * h.a_terms(0) - h.b_terms(0) * h.a_terms(1) * h.a_terms(1);
  CHECK(h.minors[1] == doctest::Approx(want).epsilon(1e-12));
  CHECK(h.minors[1] == doctest::Approx(oracle::cofactor_det(h.bordered)).epsilon(1e-12));
  CHECK(h.minors[1] > 0.0);
  CHECK(h.verdict);
}

TEST_CASE("bordered Hessian, random five-map systems") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> lam(-5.0, 5.0);
  for (int t = 0; t < 100; ++t) {
    const auto s = build_system(oracle::random_contractors(rng, 5), oracle::random_weights(rng, 5));
    const auto h = hessian_check(lam(rng), s);
    REQUIRE(h.applicable);
    CHECK((h.b_terms.array() < 0).all());
    for (Eigen::Index k = 2; k <= 6; ++k) {
      const double det = oracle::cofactor_det(h.bordered.topLeftCorner(k, k));
      CHECK(h.minors[static_cast<std::size_t>(k - 2)] == doctest::Approx(det).epsilon(1e-9));
      CHECK((k % 2 == 1 ? det > 0.0 : det < 0.0));
    }
    CHECK(h.verdict);
    CHECK(h.max_recurrence_rel_error < 1e-8);
  }
}

TEST_CASE("perturbations on the constraint surface do not increase f") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> lam(-5.0, 5.0);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 3 + static_cast<std::size_t>(t % 4);
    const auto s = build_system(oracle::random_contractors(rng, n), oracle::random_weights(rng, n));
    const auto m = constrained_perturbation_check(lam(rng), s, 1000 + t);
    REQUIRE(m.applicable);
    CHECK(m.max_increase <= 1e-9);
    CHECK(m.max_constraint_drift < 1e-12);
  }
}

TEST_CASE("Legendre consistency, tent family p = 2") {
  const auto s = tent(2.0);
  const auto curve = spectrum<long double>(s);
  const auto r = legendre_consistency(curve);
  CHECK(r.interior_points >= 510);
  CHECK(r.max_slope_error <= 1e-4);
  CHECK(r.max_identity_error <= 1e-10);
  CHECK(r.max_tau_slope_error <= 1e-4);
  CHECK(r.passed);

  // apex has slope 0, the D_1 point slope 1 with f = alpha
  bool saw_apex = false, saw_one = false;
  for (const auto& p : curve.points) {
    if (p.multiplier == 0) {
      saw_apex = true;
      CHECK(static_cast<double>(p.f) == doctest::Approx(hausdorff_dim(s)).epsilon(1e-12));
    }
    if (p.multiplier == 1) {
      saw_one = true;
      CHECK(static_cast<double>(p.f) == doctest::Approx(static_cast<double>(p.alpha)).epsilon(1e-14));
    }
  }
  CHECK(saw_apex);
  CHECK(saw_one);

  SpectrumOptions coarse;
  coarse.points = 10;
  coarse.include_marks = false;
  CHECK_THROWS_AS(legendre_consistency(spectrum<long double>(s, coarse)), ValidationError);
}

TEST_CASE("Fornberg weights reproduce polynomial derivatives") {
  const std::vector<double> x{-0.3, -0.1, 0.0, 0.2, 0.25, 0.7, 1.0};
  const auto w = derivative_weights(0.1, x);
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d += w[i] * std::pow(x[i], 5);
  CHECK(d == doctest::Approx(5 * std::pow(0.1, 4)).epsilon(1e-10));
}

TEST_CASE("ordering between d_min, D_1 and D tilde") {
  // d_min > D_1 for p = 2, d_min < D_1 for p = 1.5
  CHECK(mf_dim_min(tent(2.0)) > renyi(tent(2.0), 1.0));
  CHECK(mf_dim_min(tent(1.5)) < renyi(tent(1.5), 1.0));
  std::mt19937_64 rng(3);
  for (int t = 0; t < 1000; ++t) {
    const auto s = build_system(oracle::random_contractors(rng, 2 + static_cast<std::size_t>(t % 7)));
    CHECK(mf_dim_min(s) <= d_tilde(s) + 1e-12);
  }
}
