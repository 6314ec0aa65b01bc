#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "valdist/value_distribution.hpp"

using namespace valdist;

namespace {

IntegratorConfig sweep_cfg() {
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-9;
  cfg.abs_tol = 1e-11;
  return cfg;
}

// closed-form F for the free potential: -sqrt(l) cot(sqrt(l) x)
double free_f(double lambda, double x) {
  const double w = std::sqrt(lambda);
  return -w * std::cos(w * x) / std::sin(w * x);
}

}  // namespace

TEST_CASE("truncated boundary function closed forms") {
  const Potential p = Potential::zero(0.0);
  CHECK(*big_f(p, M_PI / 4.0, 1.0) == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(std::abs(*big_f(p, M_PI / 2.0, 1.0)) < 1e-9);
  CHECK(!big_f(p, M_PI, 1.0).has_value());  // v(pi) = 0: truncated eigenvalue
  CHECK_THROWS_AS(big_f(p, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("m_truncated approaches the half-line m-function") {
  const Potential p = Potential::zero(0.0);
  const Complex z(1.0, 0.1);
  const Complex limit = Complex(0.0, 1.0) * std::sqrt(z);
  const auto m = m_truncated(p, 200.0, z);
  REQUIRE(m.has_value());
  CHECK(std::abs(*m - limit) < 1e-3);

  // real z coincides with big_f through the same propagation path
  const auto mreal = m_truncated(p, M_PI / 4.0, Complex(1.0, 0.0));
  CHECK(mreal->real() == *big_f(p, M_PI / 4.0, 1.0));
  CHECK(mreal->imag() == 0.0);
}

TEST_CASE("Weyl disk contraction and Herglotz sign") {
  const Potential p = Potential::inverse_square(0.0, 1.0);
  const Complex z(1.0, 0.05);
  double prev = kInf;
  for (double b : {50.0, 100.0, 200.0}) {
    const auto m1 = m_truncated(p, b, z);
    const auto m2 = m_truncated(p, 2.0 * b, z);
    REQUIRE(m1.has_value());
    REQUIRE(m2.has_value());
    CHECK(m1->imag() > 0.0);
    const double shrink = std::abs(*m2 - *m1);
    CHECK(shrink < prev);
    prev = shrink;
  }
}

TEST_CASE("preimage measure of trivial sets") {
  const Potential p = Potential::zero(0.0);
  const Interval window{1.0, 4.0};
  CHECK(preimage_measure(p, 7.0, window, IntervalUnion::whole_line(), 2000, sweep_cfg()) ==
        doctest::Approx(3.0).epsilon(1e-12));
  CHECK(preimage_measure(p, 7.0, window, IntervalUnion::empty(), 2000, sweep_cfg()) == 0.0);
}

TEST_CASE("preimage measure against the closed-form brute-force oracle") {
  const Potential p = Potential::zero(0.0);
  const Interval window{1.0, 4.0};
  const IntervalUnion S{{0.0, kInf}};
  const int n = 20000;
  const double measured = preimage_measure(p, 100.0, window, S, n, sweep_cfg());

  const Eigen::ArrayXd grid = midpoint_grid(window, n);
  int count = 0;
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    if (free_f(grid[i], 100.0) > 0.0) ++count;
  const double oracle = 3.0 / n * count;

  CHECK(measured == doctest::Approx(oracle).epsilon(1e-3));
  CHECK(std::abs(measured - 1.5) < 0.05);
}

TEST_CASE("preimage measure is monotone and additive in S") {
  const Potential p = Potential::inverse_square(0.0, 1.0);
  const Interval window{1.0, 4.0};
  const int n = 4000;
  const double x = 40.0;
  const IntervalUnion small{{0.0, 1.0}};
  const IntervalUnion large{{-1.0, 2.0}};
  const IntervalUnion left{{-1.0, 0.0}};
  const IntervalUnion right{{0.0, 2.0}};
  const double ms = preimage_measure(p, x, window, small, n, sweep_cfg());
  const double ml = preimage_measure(p, x, window, large, n, sweep_cfg());
  CHECK(ms <= ml + 1e-12);
  const double sum = preimage_measure(p, x, window, left, n, sweep_cfg()) +
                     preimage_measure(p, x, window, right, n, sweep_cfg());
  CHECK(ml == doctest::Approx(sum).epsilon(1e-9));
}

TEST_CASE("moving-target preimage measure") {
  const Potential p = Potential::zero(0.0);
  const Interval window{1.0, 4.0};
  const MovingTarget S{[](double l) { return -l; }, [](double l) { return l; }};
  const double m = preimage_measure(p, 30.0, window, S, 6000, sweep_cfg());
  CHECK(m > 0.0);
  CHECK(m < 3.0);
}

TEST_CASE("theorem 2 table for the free model") {
  const Potential p = Potential::zero(0.0);
  const BoundaryM model = BoundaryM::free_model();
  const Interval window{1.0, 4.0};
  const std::vector<double> xs{25.0, 50.0, 100.0};

  const auto rows =
      theorem2_table(p, model, IntervalUnion{{0.0, kInf}}, window, xs, 6000, sweep_cfg());
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK(r.limit == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(r.error < 0.06);
    CHECK(r.error == doctest::Approx(std::abs(r.empirical - r.limit)).epsilon(1e-12));
  }

  const auto full =
      theorem2_table(p, model, IntervalUnion::whole_line(), window, xs, 6000, sweep_cfg());
  for (const auto& r : full) {
    CHECK(r.limit == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(r.empirical == doctest::Approx(3.0).epsilon(1e-9));
  }
}

TEST_CASE("theorem 2 moving-target variant matches the fixed-set run") {
  const Potential p = Potential::zero(0.0);
  const BoundaryM model = BoundaryM::free_model();
  const Interval window{1.0, 4.0};
  const std::vector<double> xs{40.0};
  const Interval s{0.0, 2.0};
  const auto fixed =
      theorem2_table(p, model, IntervalUnion{{s.lo, s.hi}}, window, xs, 5000, sweep_cfg());
  const auto moving =
      theorem2_table(p, model, MovingTarget::fixed(s), window, xs, 5000, sweep_cfg());
  CHECK(fixed[0].empirical == doctest::Approx(moving[0].empirical).epsilon(1e-12));
  CHECK(fixed[0].limit == doctest::Approx(moving[0].limit).epsilon(1e-12));
}

TEST_CASE("theta0 mod pi closed forms") {
  const Potential p = Potential::zero(0.0);
  const BoundaryM model = BoundaryM::free_model();
  CHECK(theta0_mod_pi(p, 4.0, model, 1.0) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(theta0_mod_pi(p, 16.0, model, 1.0) == doctest::Approx(4.0 - M_PI).epsilon(1e-9));
  CHECK(theta0_mod_pi(p, 4.0, model, 0.0) == 0.0);

  const Potential q = Potential::inverse_square(1.0, 1.0);
  const BoundaryM bm = BoundaryM::bessel_model(1.0, 1.0);
  for (double x : {1.0, 3.0, 10.0, 31.0}) {
    const double t = theta0_mod_pi(q, 2.0, bm, x);
    CHECK(t >= 0.0);
    CHECK(t < M_PI);
  }
}

TEST_CASE("free-case theta0 mod pi equals sqrt(lambda) x mod pi") {
  const Potential p = Potential::zero(0.0);
  const BoundaryM model = BoundaryM::free_model();
  for (double lambda : {1.0, 2.3, 4.0}) {
    for (double x : {10.0, 35.5}) {
      const double expect = std::fmod(std::sqrt(lambda) * x, M_PI);
      CHECK(theta0_mod_pi(p, lambda, model, x) == doctest::Approx(expect).epsilon(1e-7));
    }
  }
}

TEST_CASE("uad distribution check, free potential") {
  const Potential p = Potential::zero(0.0);
  const BoundaryM model = BoundaryM::free_model();
  const Interval window{1.0, 4.0};
  const std::vector<double> xs{25.0, 200.0};
  const int n = 20000;

  const auto rows = uad_check(p, model, window, BandSpec::constant(M_PI / 4, 3 * M_PI / 4),
                              xs, n, sweep_cfg());
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].limit == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(std::abs(rows[1].empirical - 1.5) < 0.05);
  CHECK(rows[1].error < rows[0].error);

  // full band: everything except the zeros of v lands inside
  const auto full = uad_check(p, model, window, BandSpec::constant(0.0, M_PI), {50.0}, n,
                              sweep_cfg());
  CHECK(full[0].limit == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(full[0].empirical == doctest::Approx(3.0).epsilon(0.01));

  // step band: limit from the quadrature of (D - C)/pi
  const BandSpec step = BandSpec::step(
      [](double) { return 0.0; },
      [](double l) { return l <= 2.5 ? M_PI / 2.0 : M_PI; });
  const auto srows = uad_check(p, model, window, step, {200.0}, n, sweep_cfg());
  CHECK(srows[0].limit == doctest::Approx(2.25).epsilon(1e-9));
  CHECK(std::abs(srows[0].empirical - 2.25) < 0.05);
}

TEST_CASE("uad empirical column cross-checked against the no-ODE oracle") {
  const Potential p = Potential::zero(0.0);
  const BoundaryM model = BoundaryM::free_model();
  const Interval window{1.0, 4.0};
  const int n = 10000;
  const double x = 60.0;
  const double c = M_PI / 4, d = 3 * M_PI / 4;

  const auto rows = uad_check(p, model, window, BandSpec::constant(c, d), {x}, n, sweep_cfg());
  const Eigen::ArrayXd grid = midpoint_grid(window, n);
  int count = 0;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double t = std::fmod(std::sqrt(grid[i]) * x, M_PI);
    if (c < t && t < d) ++count;
  }
  CHECK(rows[0].empirical == doctest::Approx(3.0 / n * count).epsilon(1e-6));
}

TEST_CASE("uad limit column is potential independent") {
  const Interval window{1.0, 4.0};
  const BandSpec band = BandSpec::constant(0.4, 2.0);
  const auto a = uad_check(Potential::zero(0.0), BoundaryM::free_model(), window, band,
                           {20.0}, 3000, sweep_cfg());
  const auto b = uad_check(Potential::inverse_square(0.0, 1.0), BoundaryM::bessel_model(0.0, 1.0),
                           window, band, {20.0}, 3000, sweep_cfg());
  CHECK(a[0].limit == b[0].limit);
}

TEST_CASE("band validation") {
  const BandSpec bad = BandSpec::constant(1.0, 0.5);
  CHECK_THROWS_AS(bad.validate_at(2.0), std::invalid_argument);
  const BandSpec worse = BandSpec::constant(-0.1, 1.0);
  CHECK_THROWS_AS(worse.validate_at(2.0), std::invalid_argument);
}

TEST_CASE("condition A ratios") {
  const Potential p = Potential::zero(0.0);
  {
    const Complex r = condition_a_ratio(p, 1.0, Complex(0.0, 1.0), 100.0, sweep_cfg());
    CHECK(std::abs(r) <= 1.0 / 100.0);
  }
  for (double N : {20.0, 50.0, 200.0}) {
    const Complex r = condition_a_ratio(p, 4.0, Complex(0.0, 2.0), N, sweep_cfg());
    CHECK(std::abs(r) <= 1.0 / (2.0 * N) * 1.05);
  }
  {
    // short integrals: ratio tends to 1
    const Complex r = condition_a_ratio(p, 1.0, Complex(0.0, 1.0), 1e-4, sweep_cfg());
    CHECK(std::abs(r - 1.0) < 1e-3);
  }
  CHECK_THROWS_AS(condition_a_ratio(p, 1.0, Complex(0.0, -1.0), 10.0), std::invalid_argument);
}

TEST_CASE("gap bound with the ODE-backed truncated m-function") {
  const Potential p = Potential::zero(0.0);
  const HerglotzFn fn = herglotz_from_truncated(p, 20.0, sweep_cfg());
  const IntervalUnion S{{0.0, 2.0}};
  const Interval window{1.0, 4.0};
  for (double eps : {0.5, 0.1}) {
    const GapResult g = theorem1_gap(fn, S, window, eps, 600);
    CHECK(g.lhs <= g.rhs + 5e-3);
  }
}

TEST_CASE("boundary model validation") {
  const BoundaryM model = BoundaryM::free_model();
  CHECK_THROWS_AS(model(-1.0), std::invalid_argument);
  const auto [A, B] = model(4.0);
  CHECK(A == 0.0);
  CHECK(B == 2.0);
}
