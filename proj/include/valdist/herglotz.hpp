#pragma once

// Geometry of Herglotz boundary values: the angle subtended by a set S at a
// point of the upper half plane, its boundary limit on the real axis, the
// value-distribution weight omega = angle/pi, and the epsilon-gap inequality
// relating boundary and off-axis averages of omega over a window Lambda.

#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "valdist/grid.hpp"
#include "valdist/interval.hpp"

namespace valdist {

using Complex = std::complex<double>;

// angle(S, z) = int_S Im(1/(t-z)) dt for Im z > 0; in closed form the sum of
// arctan((hi - Re z)/Im z) - arctan((lo - Re z)/Im z) over the parts of S.
// Always in [0, pi].
inline double angle(const IntervalUnion& S, Complex z) {
  if (!(z.imag() > 0.0)) throw std::invalid_argument("angle: require Im z > 0");
  const double x = z.real(), y = z.imag();
  auto leg = [&](double t) {
    if (t == kInf) return M_PI / 2.0;
    if (t == -kInf) return -M_PI / 2.0;
    return std::atan((t - x) / y);
  };
  double total = 0.0;
  for (const Interval& part : S.parts()) total += leg(part.hi) - leg(part.lo);
  return total;
}

// Boundary limit of the angle at a real point: pi inside S, 0 outside,
// indeterminate exactly at an endpoint (a measure-zero set the callers
// exclude from counts).
inline std::optional<double> angle_boundary(const IntervalUnion& S, double X) {
  if (!std::isfinite(X)) throw std::invalid_argument("angle_boundary: require finite X");
  switch (S.classify(X)) {
    case Membership::inside:
      return M_PI;
    case Membership::outside:
      return 0.0;
    case Membership::boundary:
      return std::nullopt;
  }
  return std::nullopt;
}

// omega = angle/pi in [0, 1].  Real values use the boundary rule; non-finite
// values (poles of a boundary function) are excluded.
inline std::optional<double> omega(const IntervalUnion& S, Complex value) {
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) return std::nullopt;
  if (value.imag() > 0.0) return angle(S, value) / M_PI;
  if (value.imag() == 0.0) {
    const auto a = angle_boundary(S, value.real());
    if (!a) return std::nullopt;
    return *a / M_PI;
  }
  throw std::invalid_argument("omega: value must have Im >= 0");
}

inline std::optional<double> omega(const IntervalUnion& S, double value) {
  return omega(S, Complex(value, 0.0));
}

// A Herglotz function of the synthetic rational family
//   f(z) = slope z + offset + sum_k w_k / (lambda_k - z),  w_k > 0, slope >= 0.
struct RationalHerglotz {
  struct Pole {
    double location = 0.0;
    double weight = 1.0;
  };

  std::vector<Pole> poles;
  double slope = 0.0;
  double offset = 0.0;

  void validate() const {
    if (!(slope >= 0.0)) throw std::invalid_argument("RationalHerglotz: slope must be >= 0");
    for (const Pole& p : poles)
      if (!(p.weight > 0.0))
        throw std::invalid_argument("RationalHerglotz: weights must be positive");
  }

  Complex eval(Complex z) const {
    Complex f = slope * z + offset;
    for (const Pole& p : poles) f += p.weight / (p.location - z);
    return f;
  }

  // Boundary value on the real axis; infinite at the poles.
  Complex boundary(double lambda) const {
    double f = slope * lambda + offset;
    for (const Pole& p : poles) {
      if (lambda == p.location) return Complex(kInf, 0.0);
      f += p.weight / (p.location - lambda);
    }
    return Complex(f, 0.0);
  }
};

// Evaluation pair for any Herglotz function we can both evaluate off the real
// axis and trace on it.  boundary(lambda) returns f+(lambda); real values
// mean the boundary limit is real a.e. there.
struct HerglotzFn {
  std::function<Complex(Complex)> eval;
  std::function<Complex(double)> boundary;

  static HerglotzFn rational(RationalHerglotz f) {
    f.validate();
    auto shared = std::make_shared<RationalHerglotz>(std::move(f));
    return {[shared](Complex z) { return shared->eval(z); },
            [shared](double l) { return shared->boundary(l); }};
  }

  static HerglotzFn constant(Complex w) {
    if (!(w.imag() >= 0.0))
      throw std::invalid_argument("HerglotzFn::constant: require Im >= 0");
    return {[w](Complex) { return w; }, [w](double) { return w; }};
  }
};

struct GapResult {
  double lhs = 0.0;
  double rhs = 0.0;
};

// Both sides of the epsilon-gap bound over a bounded window Lambda:
//   lhs = | int_L omega(.,S,f+) - int_L omega(.,S,f(.+i eps)) |
//   rhs = (1/pi) int_L angle(complement of L, . + i eps)
// by the composite midpoint rule on grid_n cells.
inline GapResult theorem1_gap(const HerglotzFn& f, const IntervalUnion& S,
                              const Interval& Lambda, double eps, int grid_n) {
  if (!(eps > 0.0)) throw std::invalid_argument("theorem1_gap: require eps > 0");
  if (!Lambda.bounded()) throw std::invalid_argument("theorem1_gap: Lambda must be bounded");
  const Eigen::ArrayXd grid = midpoint_grid(Lambda, grid_n);
  const double h = Lambda.length() / grid_n;
  const IntervalUnion complement = IntervalUnion{{Lambda.lo, Lambda.hi}}.complement();

  double boundary_sum = 0.0, offaxis_sum = 0.0, angle_sum = 0.0;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double lam = grid[i];
    if (const auto w = omega(S, f.boundary(lam))) boundary_sum += *w;
    if (const auto w = omega(S, f.eval(Complex(lam, eps)))) offaxis_sum += *w;
    angle_sum += angle(complement, Complex(lam, eps));
  }
  return GapResult{std::abs(boundary_sum - offaxis_sum) * h, angle_sum * h / M_PI};
}

}  // namespace valdist
