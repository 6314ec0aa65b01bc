#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "valdist/herglotz.hpp"

using namespace valdist;

TEST_CASE("subtended angle closed forms") {
  CHECK(angle(IntervalUnion{{-1.0, 1.0}}, Complex(0.0, 1.0)) ==
        doctest::Approx(M_PI / 2).epsilon(1e-14));
  CHECK(angle(IntervalUnion::whole_line(), Complex(17.0, 0.3)) ==
        doctest::Approx(M_PI).epsilon(1e-14));
  CHECK(angle(IntervalUnion{{0.0, 2.0}}, Complex(1.0, 1.0)) ==
        doctest::Approx(M_PI / 2).epsilon(1e-14));
  CHECK_THROWS_AS(angle(IntervalUnion{{0.0, 1.0}}, Complex(0.0, -1.0)), std::invalid_argument);
  CHECK_THROWS_AS(angle(IntervalUnion{{0.0, 1.0}}, Complex(0.0, 0.0)), std::invalid_argument);
}

TEST_CASE("angle stays in [0, pi] and is additive over disjoint parts") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::uniform_real_distribution<double> w(0.1, 3.0);
  for (int rep = 0; rep < 200; ++rep) {
    const double a1 = u(rng), l1 = w(rng);
    const double a2 = a1 + l1 + w(rng), l2 = w(rng);
    const IntervalUnion s1{{a1, a1 + l1}};
    const IntervalUnion s2{{a2, a2 + l2}};
    const IntervalUnion both{{a1, a1 + l1}, {a2, a2 + l2}};
    const Complex z(u(rng), w(rng));
    const double t1 = angle(s1, z), t2 = angle(s2, z), tb = angle(both, z);
    CHECK(t1 >= 0.0);
    CHECK(tb <= M_PI + 1e-14);
    CHECK(tb == doctest::Approx(t1 + t2).epsilon(1e-12));
  }
}

TEST_CASE("boundary angle is the membership indicator") {
  const IntervalUnion s{{0.0, 2.0}};
  CHECK(angle_boundary(s, 1.0) == M_PI);
  CHECK(angle_boundary(s, 3.0) == 0.0);
  CHECK(!angle_boundary(s, 2.0).has_value());  // endpoint: indeterminate
  const IntervalUnion two{{0.0, 2.0}, {5.0, 6.0}};
  CHECK(angle_boundary(two, 5.5) == M_PI);
}

TEST_CASE("angle converges to the boundary indicator as eps -> 0") {
  const IntervalUnion s{{-0.5, 1.5}, {2.0, 4.0}};
  for (double lam : {-1.0, 0.3, 1.8, 3.0, 7.0}) {
    const double limit = *angle_boundary(s, lam);
    double prev_gap = 10.0;
    for (double eps : {1e-1, 1e-3, 1e-5, 1e-7}) {
      const double gap = std::abs(angle(s, Complex(lam, eps)) - limit);
      CHECK(gap < prev_gap + 1e-14);
      prev_gap = gap;
    }
    CHECK(prev_gap < 1e-5);
  }
}

TEST_CASE("omega basics and monotonicity under set inclusion") {
  CHECK(*omega(IntervalUnion{{0.0, kInf}}, Complex(0.0, 1.0)) ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK(*omega(IntervalUnion{{-1.0, 1.0}}, Complex(0.0, 1.0)) ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK(*omega(IntervalUnion{{0.0, 2.0}}, 1.0) == doctest::Approx(1.0));
  CHECK(!omega(IntervalUnion{{0.0, 2.0}}, Complex(kInf, 0.0)).has_value());

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_real_distribution<double> w(0.1, 2.0);
  for (int rep = 0; rep < 100; ++rep) {
    const double lo = u(rng), len = w(rng), pad = w(rng);
    const IntervalUnion small{{lo, lo + len}};
    const IntervalUnion big{{lo - pad, lo + len + pad}};
    const Complex z(u(rng), w(rng));
    CHECK(*omega(small, z) <= *omega(big, z) + 1e-14);
  }
}

TEST_CASE("rational Herglotz validation and evaluation") {
  RationalHerglotz f;
  f.poles = {{1.0, 1.0}};
  f.validate();
  // f(z) = 1/(1 - z)
  CHECK(std::abs(f.eval(Complex(0.0, 1.0)) - 1.0 / Complex(1.0, -1.0)) < 1e-15);
  CHECK(f.boundary(3.0).real() == doctest::Approx(-0.5));
  CHECK(!std::isfinite(f.boundary(1.0).real()));

  RationalHerglotz bad;
  bad.poles = {{0.0, -1.0}};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.poles.clear();
  bad.slope = -0.1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("gap bound degenerate cases") {
  const Interval window{-1.0, 3.0};
  const HerglotzFn c = HerglotzFn::constant(Complex(0.0, 1.0));
  const GapResult empty =
      theorem1_gap(c, IntervalUnion::empty(), window, 0.5, 2001);
  CHECK(empty.lhs == doctest::Approx(0.0).scale(1.0));
  CHECK(empty.rhs > 0.0);

  // constant function: boundary and off-axis omega coincide for every eps
  for (double eps : {1.0, 0.1, 0.01}) {
    const GapResult g = theorem1_gap(c, IntervalUnion{{0.0, 2.0}}, window, eps, 2001);
    CHECK(g.lhs < 1e-12);
    CHECK(g.lhs <= g.rhs);
  }
}

TEST_CASE("gap bound for f(z) = 1/(1-z)") {
  RationalHerglotz f;
  f.poles = {{1.0, 1.0}};
  const HerglotzFn fn = HerglotzFn::rational(f);
  const IntervalUnion S{{0.0, 2.0}};
  const Interval window{-1.0, 3.0};
  double prev_rhs = kInf;
  for (double eps : {1.0, 0.1, 0.01}) {
    const GapResult g = theorem1_gap(fn, S, window, eps, 20000);
    CHECK(g.lhs <= g.rhs + 1e-3);
    CHECK(g.rhs < prev_rhs);
    prev_rhs = g.rhs;
  }
}

TEST_CASE("gap bound input validation") {
  const HerglotzFn c = HerglotzFn::constant(Complex(0.0, 1.0));
  CHECK_THROWS_AS(theorem1_gap(c, IntervalUnion::empty(), {0.0, 1.0}, 0.0, 100),
                  std::invalid_argument);
  CHECK_THROWS_AS(theorem1_gap(c, IntervalUnion::empty(), {0.0, kInf}, 0.1, 100),
                  std::invalid_argument);
  CHECK_THROWS_AS(theorem1_gap(c, IntervalUnion::empty(), {0.0, 1.0}, 0.1, 1),
                  std::invalid_argument);
}

TEST_CASE("interval union validation") {
  CHECK_THROWS_AS(IntervalUnion({{1.0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(IntervalUnion({{0.0, 2.0}, {1.0, 3.0}}), std::invalid_argument);
  const IntervalUnion u{{0.0, 1.0}, {2.0, kInf}};
  const IntervalUnion c = u.complement();
  REQUIRE(c.parts().size() == 2);
  CHECK(c.parts()[0].lo == -kInf);
  CHECK(c.parts()[0].hi == 0.0);
  CHECK(c.parts()[1].lo == 1.0);
  CHECK(c.parts()[1].hi == 2.0);
}
