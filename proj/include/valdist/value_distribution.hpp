#pragma once

// The measurable-dynamics layer: truncated boundary functions F(x, lambda),
// grid estimates of preimage measures, the phase theta0 reduced mod pi, and
// the empirical convergence tables behind the two limit theorems.

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "valdist/boundary_m.hpp"
#include "valdist/grid.hpp"
#include "valdist/herglotz.hpp"
#include "valdist/interval.hpp"
#include "valdist/potential.hpp"
#include "valdist/schrodinger.hpp"

namespace valdist {

inline constexpr double kPoleTol = 1e-12;

namespace detail {

inline bool is_pole(double u, double v) {
  return std::abs(v) < kPoleTol * (std::abs(u) + std::abs(v));
}

}  // namespace detail

// F(x, lambda) = -u/v, the real boundary value of the problem truncated at
// b = x.  Empty when lambda is an eigenvalue of the truncated problem
// (v(x) = 0 within the pole tolerance).
inline std::optional<double> big_f(const Potential& p, double x, double lambda,
                                   const IntegratorConfig& cfg = {}) {
  if (!(x > p.a())) throw std::invalid_argument("big_f: require x > a");
  const RealState s = propagate_fundamental(p, lambda, x, cfg);
  if (detail::is_pole(s.u, s.v)) return std::nullopt;
  return -s.u / s.v;
}

// m_b(z) = -u(b, z)/v(b, z).  For real z this is big_f; for Im z > 0 it lies
// in the Weyl disk contracting to the half-line m-function.
inline std::optional<Complex> m_truncated(const Potential& p, double b, Complex z,
                                          const IntegratorConfig& cfg = {}) {
  if (!(b > p.a())) throw std::invalid_argument("m_truncated: require b > a");
  if (z.imag() < 0.0) throw std::invalid_argument("m_truncated: require Im z >= 0");
  const ComplexState s = propagate_fundamental(p, z, b, cfg);
  if (detail::is_pole(std::abs(s.u), std::abs(s.v))) return std::nullopt;
  return -s.u / s.v;
}

// Moving target S_lambda = (alpha(lambda), beta(lambda)).
struct MovingTarget {
  std::function<double(double)> alpha;
  std::function<double(double)> beta;

  Interval at(double lambda) const {
    const double lo = alpha(lambda), hi = beta(lambda);
    if (!(lo < hi)) throw std::invalid_argument("MovingTarget: require alpha < beta");
    return {lo, hi};
  }

  static MovingTarget fixed(const Interval& s) {
    return {[lo = s.lo](double) { return lo; }, [hi = s.hi](double) { return hi; }};
  }
};

// Bands 0 <= C(lambda) < D(lambda) <= pi for the mod-pi distribution checks.
// C and D may be constants, step functions or sampled grids.
struct BandSpec {
  std::function<double(double)> C;
  std::function<double(double)> D;

  static BandSpec constant(double c, double d) {
    return {[c](double) { return c; }, [d](double) { return d; }};
  }

  static BandSpec step(std::function<double(double)> c, std::function<double(double)> d) {
    return {std::move(c), std::move(d)};
  }

  static BandSpec from_grids(GridFunction c, GridFunction d) {
    auto cs = std::make_shared<GridFunction>(std::move(c));
    auto ds = std::make_shared<GridFunction>(std::move(d));
    return {[cs](double l) { return (*cs)(l); }, [ds](double l) { return (*ds)(l); }};
  }

  void validate_at(double lambda) const {
    const double c = C(lambda), d = D(lambda);
    if (!(0.0 <= c && c < d && d <= M_PI))
      throw std::invalid_argument("BandSpec: need 0 <= C < D <= pi at lambda = " +
                                  std::to_string(lambda));
  }
};

struct SweepOptions {
  int threads = 0;  // 0 = hardware concurrency
};

namespace detail {

template <class Member>
double count_measure(const Eigen::ArrayXd& grid, double h, int threads, Member&& member) {
  std::vector<unsigned char> hit(static_cast<std::size_t>(grid.size()), 0);
  parallel_for_index(static_cast<std::size_t>(grid.size()), threads,
                     [&](std::size_t i) { hit[i] = member(grid[static_cast<Eigen::Index>(i)]) ? 1 : 0; });
  std::size_t count = 0;
  for (unsigned char b : hit) count += b;
  return h * static_cast<double>(count);
}

}  // namespace detail

// Midpoint-grid estimate of mu(Lambda intersect F_x^{-1}(S)); pole points
// count as outside S.
inline double preimage_measure(const Potential& p, double x, const Interval& Lambda,
                               const IntervalUnion& S, int grid_n,
                               const IntegratorConfig& cfg = {},
                               const SweepOptions& opt = {}) {
  if (!Lambda.bounded()) throw std::invalid_argument("preimage_measure: Lambda must be bounded");
  const Eigen::ArrayXd grid = midpoint_grid(Lambda, grid_n);
  const double h = Lambda.length() / grid_n;
  return detail::count_measure(grid, h, opt.threads, [&](double lam) {
    const auto F = big_f(p, x, lam, cfg);
    return F && S.contains(*F);
  });
}

inline double preimage_measure(const Potential& p, double x, const Interval& Lambda,
                               const MovingTarget& S, int grid_n,
                               const IntegratorConfig& cfg = {},
                               const SweepOptions& opt = {}) {
  if (!Lambda.bounded()) throw std::invalid_argument("preimage_measure: Lambda must be bounded");
  const Eigen::ArrayXd grid = midpoint_grid(Lambda, grid_n);
  const double h = Lambda.length() / grid_n;
  return detail::count_measure(grid, h, opt.threads, [&](double lam) {
    const auto F = big_f(p, x, lam, cfg);
    return F && S.at(lam).contains(*F);
  });
}

struct ConvergenceRow {
  double x = 0.0;
  double empirical = 0.0;
  double limit = 0.0;
  double error = 0.0;
};

// Empirical preimage measures along an x schedule against the limit
//   int_Lambda omega(lambda, S, A + iB) d lambda.
// One integration pass per lambda serves the whole schedule.
inline std::vector<ConvergenceRow> theorem2_table(
    const Potential& p, const BoundaryM& model, const IntervalUnion& S,
    const Interval& Lambda, const std::vector<double>& x_list, int grid_n,
    const IntegratorConfig& cfg = {}, const SweepOptions& opt = {}) {
  if (!Lambda.bounded()) throw std::invalid_argument("theorem2_table: Lambda must be bounded");
  if (x_list.empty()) return {};
  for (std::size_t i = 0; i < x_list.size(); ++i) {
    if (!(x_list[i] > p.a()))
      throw std::invalid_argument("theorem2_table: x values must exceed a");
    if (i > 0 && !(x_list[i] > x_list[i - 1]))
      throw std::invalid_argument("theorem2_table: x_list must be increasing");
  }
  const Eigen::ArrayXd grid = midpoint_grid(Lambda, grid_n);
  const double h = Lambda.length() / grid_n;
  const std::size_t nx = x_list.size(),
                    nl = static_cast<std::size_t>(grid.size());

  std::vector<unsigned char> hits(nx * nl, 0);
  std::vector<double> limit_terms(nl, 0.0);
  parallel_for_index(nl, opt.threads, [&](std::size_t i) {
    const double lam = grid[static_cast<Eigen::Index>(i)];
    const auto [A, B] = model(lam);
    if (const auto w = omega(S, Complex(A, B))) limit_terms[i] = *w;
    std::size_t row = 0;
    propagate_fundamental_path(p, lam, x_list, cfg, [&](const RealState& s) {
      const bool pole = detail::is_pole(s.u, s.v);
      const double F = -s.u / s.v;
      hits[row * nl + i] = (!pole && S.contains(F)) ? 1 : 0;
      ++row;
    });
  });

  double limit = 0.0;
  for (double t : limit_terms) limit += t;
  limit *= h;

  std::vector<ConvergenceRow> rows(nx);
  for (std::size_t r = 0; r < nx; ++r) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < nl; ++i) count += hits[r * nl + i];
    const double emp = h * static_cast<double>(count);
    rows[r] = {x_list[r], emp, limit, std::abs(emp - limit)};
  }
  return rows;
}

// Moving-target variant: S_lambda = (alpha(lambda), beta(lambda)) in both the
// counts and the limit integrand.
inline std::vector<ConvergenceRow> theorem2_table(
    const Potential& p, const BoundaryM& model, const MovingTarget& S,
    const Interval& Lambda, const std::vector<double>& x_list, int grid_n,
    const IntegratorConfig& cfg = {}, const SweepOptions& opt = {}) {
  if (!Lambda.bounded()) throw std::invalid_argument("theorem2_table: Lambda must be bounded");
  if (x_list.empty()) return {};
  const Eigen::ArrayXd grid = midpoint_grid(Lambda, grid_n);
  const double h = Lambda.length() / grid_n;
  const std::size_t nx = x_list.size(),
                    nl = static_cast<std::size_t>(grid.size());

  std::vector<unsigned char> hits(nx * nl, 0);
  std::vector<double> limit_terms(nl, 0.0);
  parallel_for_index(nl, opt.threads, [&](std::size_t i) {
    const double lam = grid[static_cast<Eigen::Index>(i)];
    const Interval target = S.at(lam);
    const IntervalUnion target_set{{target.lo, target.hi}};
    const auto [A, B] = model(lam);
    if (const auto w = omega(target_set, Complex(A, B))) limit_terms[i] = *w;
    std::size_t row = 0;
    propagate_fundamental_path(p, lam, x_list, cfg, [&](const RealState& s) {
      const bool pole = detail::is_pole(s.u, s.v);
      const double F = -s.u / s.v;
      hits[row * nl + i] = (!pole && target.contains(F)) ? 1 : 0;
      ++row;
    });
  });

  double limit = 0.0;
  for (double t : limit_terms) limit += t;
  limit *= h;

  std::vector<ConvergenceRow> rows(nx);
  for (std::size_t r = 0; r < nx; ++r) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < nl; ++i) count += hits[r * nl + i];
    const double emp = h * static_cast<double>(count);
    rows[r] = {x_list[r], emp, limit, std::abs(emp - limit)};
  }
  return rows;
}

// theta0 reduced to [0, pi).  The phase passes through multiples of pi
// exactly at the zeros of v, so the floor reduction reproduces the
// reset-at-zeros definition.
inline double theta0_mod_pi(const Potential& p, double lambda, const BoundaryM& model,
                            double x, const IntegratorConfig& cfg = {}) {
  const auto [A, B] = model(lambda);
  const double theta = accumulate_theta0(p, lambda, A, B, x, cfg);
  return theta - M_PI * std::floor(theta / M_PI);
}

// Empirical distribution of theta0 mod pi against the uniform limit
//   (1/pi) int_Lambda (D - C) d lambda.
inline std::vector<ConvergenceRow> uad_check(const Potential& p, const BoundaryM& model,
                                             const Interval& Lambda, const BandSpec& band,
                                             const std::vector<double>& x_list, int grid_n,
                                             const IntegratorConfig& cfg = {},
                                             const SweepOptions& opt = {}) {
  if (!Lambda.bounded()) throw std::invalid_argument("uad_check: Lambda must be bounded");
  if (x_list.empty()) return {};
  for (std::size_t i = 0; i < x_list.size(); ++i) {
    if (!(x_list[i] >= p.a())) throw std::invalid_argument("uad_check: x values must be >= a");
    if (i > 0 && !(x_list[i] > x_list[i - 1]))
      throw std::invalid_argument("uad_check: x_list must be increasing");
  }
  const Eigen::ArrayXd grid = midpoint_grid(Lambda, grid_n);
  const double h = Lambda.length() / grid_n;
  const std::size_t nx = x_list.size(),
                    nl = static_cast<std::size_t>(grid.size());

  std::vector<unsigned char> hits(nx * nl, 0);
  std::vector<double> band_width(nl, 0.0);
  parallel_for_index(nl, opt.threads, [&](std::size_t i) {
    const double lam = grid[static_cast<Eigen::Index>(i)];
    band.validate_at(lam);
    const double c = band.C(lam), d = band.D(lam);
    band_width[i] = d - c;
    const auto [A, B] = model(lam);
    std::size_t row = 0;
    accumulate_theta0_path(p, lam, A, B, x_list, cfg, [&](const Theta0Sample& s) {
      const double reduced = s.theta0 - M_PI * std::floor(s.theta0 / M_PI);
      hits[row * nl + i] = (c < reduced && reduced < d) ? 1 : 0;
      ++row;
    });
  });

  double width = 0.0;
  for (double t : band_width) width += t;
  const double limit = width * h / M_PI;

  std::vector<ConvergenceRow> rows(nx);
  for (std::size_t r = 0; r < nx; ++r) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < nl; ++i) count += hits[r * nl + i];
    const double emp = h * static_cast<double>(count);
    rows[r] = {x_list[r], emp, limit, std::abs(emp - limit)};
  }
  return rows;
}

// The truncated m-function as a Herglotz evaluation pair, for the gap bound
// with ODE-derived functions.  Off-axis values come from complex propagation,
// boundary values from the real path; poles map to the excluded sentinel.
inline HerglotzFn herglotz_from_truncated(const Potential& p, double b,
                                          const IntegratorConfig& cfg = {}) {
  if (!(b > p.a())) throw std::invalid_argument("herglotz_from_truncated: require b > a");
  auto pot = std::make_shared<Potential>(p);
  return {[pot, b, cfg](Complex z) {
            const auto m = m_truncated(*pot, b, z, cfg);
            return m ? *m : Complex(kInf, 0.0);
          },
          [pot, b, cfg](double lam) {
            const auto F = big_f(*pot, b, lam, cfg);
            return F ? Complex(*F, 0.0) : Complex(kInf, 0.0);
          }};
}

// Condition A diagnostic: int_a^N y^2 dx / int_a^N |y|^2 dx for y = u + M v.
// Both integrals reduce to the three real moments of (u, v).
inline Complex condition_a_ratio(const Potential& p, double lambda, Complex M, double N,
                                 const IntegratorConfig& cfg = {}) {
  if (!(M.imag() > 0.0)) throw std::invalid_argument("condition_a_ratio: require Im M > 0");
  if (!(N > p.a())) throw std::invalid_argument("condition_a_ratio: require N > a");
  const SolutionMoments m = accumulate_moments(p, lambda, N, cfg);
  const Complex numerator = m.uu + 2.0 * M * m.uv + M * M * m.vv;
  const double denominator = m.uu + 2.0 * M.real() * m.uv + std::norm(M) * m.vv;
  return numerator / denominator;
}

}  // namespace valdist
