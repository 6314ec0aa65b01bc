#pragma once

// Bessel functions J_nu, Y_nu and derivatives for real order, used as the
// independent analytic ground truth for the inverse-square potential class.
//
// Three regimes:
//   x <= 10   ascending series, plain double
//   x <= 28   ascending series summed in double-double (the cancellation in
//             the alternating series costs ~x/ln(10) digits, which compensated
//             summation absorbs through the whole mid-range)
//   x > 28    Hankel asymptotic expansions
//
// Y at non-integer order comes from the reflection combination of J_{+nu}
// and J_{-nu}; integer order uses the logarithmic series with harmonic
// numbers.  Orders within 1e-8 of an integer are rounded to it; accuracy for
// non-integer orders degrades like 1/dist(nu, Z) near integers.

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "valdist/appell_forms.hpp"
#include "valdist/detail/double_double.hpp"

namespace valdist {

struct BesselEval {
  double nu = 0.0;
  double x = 0.0;
  double J = 0.0, Y = 0.0, Jprime = 0.0, Yprime = 0.0;

  // J Y' - J' Y - 2/(pi x), relative to 2/(pi x).
  double wronskian_defect() const {
    const double w = J * Yprime - Jprime * Y;
    const double ref = 2.0 / (M_PI * x);
    return (w - ref) / ref;
  }
};

enum class BesselBranch { series, series_dd, asymptotic };

namespace bessel_detail {

inline constexpr double kSeriesSwitch = 10.0;
inline constexpr double kAsymptoticSwitch = 28.0;
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
inline constexpr double kIntegerSnap = 1e-8;

template <class T>
struct series_traits;

template <>
struct series_traits<double> {
  static constexpr double eps = 2.3e-17;
  static double from(double v) { return v; }
  static double value(double v) { return v; }
  static double magnitude(double v) { return std::abs(v); }
};

template <>
struct series_traits<detail::dd> {
  static constexpr double eps = 1e-33;
  static detail::dd from(double v) { return detail::dd(v); }
  static double value(const detail::dd& v) { return v.to_double(); }
  static double magnitude(const detail::dd& v) { return std::abs(v.to_double()); }
};

// Ascending series J_mu(x) = sum_k (-1)^k (x/2)^{mu+2k} / (k! Gamma(mu+k+1)),
// valid for any real mu that is not a negative integer.
template <class T>
double series_J(double mu, double x) {
  using tr = series_traits<T>;
  const double half = 0.5 * x;
  const T q = tr::from(half) * tr::from(half);
  T term = tr::from(std::pow(half, mu) / std::tgamma(mu + 1.0));
  T sum = term;
  double tmax = tr::magnitude(term);
  for (int k = 1; k <= 500; ++k) {
    const T denom = tr::from(static_cast<double>(k)) *
                    (tr::from(mu) + tr::from(static_cast<double>(k)));
    term = term * (-q) / denom;
    sum = sum + term;
    tmax = std::max(tmax, tr::magnitude(term));
    if (k > half && tr::magnitude(term) <= tr::eps * tmax) break;
  }
  return tr::value(sum);
}

inline std::pair<double, double> sin_cos_pi(double v) {
  const double k = std::round(v);
  const double f = v - k;
  double s = std::sin(M_PI * f);
  double c = std::cos(M_PI * f);
  if (std::fmod(k, 2.0) != 0.0) {
    s = -s;
    c = -c;
  }
  return {s, c};
}

// Y_nu = (J_nu cos(nu pi) - J_{-nu}) / sin(nu pi), non-integer nu.
template <class T>
std::pair<double, double> jy_reflection(double nu, double x) {
  const double Jp = series_J<T>(nu, x);
  const double Jm = series_J<T>(-nu, x);
  const auto [s, c] = sin_cos_pi(nu);
  return {Jp, (Jp * c - Jm) / s};
}

// Integer order: Y_n = (2/pi)(ln(x/2) + gamma) J_n
//                      - (1/pi) (x/2)^{-n} sum_{k<n} (n-k-1)!/k! (x^2/4)^k
//                      - (1/pi) (x/2)^n sum_k (-1)^k (H_k + H_{n+k}) (x^2/4)^k / (k!(n+k)!)
template <class T>
std::pair<double, double> jy_integer(int n, double x) {
  using tr = series_traits<T>;
  const double half = 0.5 * x;
  const T q = tr::from(half) * tr::from(half);

  const double Jn = series_J<T>(static_cast<double>(n), x);

  T finite = tr::from(0.0);
  if (n > 0) {
    T term = tr::from(std::tgamma(static_cast<double>(n)) * std::pow(half, -n));
    finite = term;
    for (int k = 1; k < n; ++k) {
      term = term * q / tr::from(static_cast<double>(k) * static_cast<double>(n - k));
      finite = finite + term;
    }
  }

  T harm_k = tr::from(0.0);
  T harm_nk = tr::from(0.0);
  for (int j = 1; j <= n; ++j) harm_nk = harm_nk + tr::from(1.0) / tr::from(double(j));
  T base = tr::from(std::pow(half, n) / std::tgamma(n + 1.0));
  T psi_sum = base * (harm_k + harm_nk);
  double tmax = tr::magnitude(base);
  for (int k = 1; k <= 500; ++k) {
    base = base * (-q) /
           (tr::from(static_cast<double>(k)) * tr::from(static_cast<double>(n + k)));
    harm_k = harm_k + tr::from(1.0) / tr::from(static_cast<double>(k));
    harm_nk = harm_nk + tr::from(1.0) / tr::from(static_cast<double>(n + k));
    const T contrib = base * (harm_k + harm_nk);
    psi_sum = psi_sum + contrib;
    tmax = std::max(tmax, tr::magnitude(contrib));
    if (k > half && tr::magnitude(contrib) <= tr::eps * tmax) break;
  }

  const double L = std::log(half) + kEulerGamma;
  const double Yn = (2.0 / M_PI) * L * Jn - tr::value(finite) / M_PI -
                    tr::value(psi_sum) / M_PI;
  return {Jn, Yn};
}

template <class T>
std::pair<double, double> jy_series(double nu, double x) {
  const double r = std::round(nu);
  if (std::abs(nu - r) <= kIntegerSnap && r >= 0.0)
    return jy_integer<T>(static_cast<int>(r), x);
  return jy_reflection<T>(nu, x);
}

// Hankel expansions: J = c (P cos w - Q sin w), Y = c (P sin w + Q cos w)
// with w = x - (nu/2 + 1/4) pi, c = sqrt(2/(pi x)).
inline std::pair<double, double> jy_asymptotic(double nu, double x) {
  const double mu = 4.0 * nu * nu;
  double P = 0.0, Q = 0.0;
  double t = 1.0;
  double prev = std::abs(t);
  for (int k = 0; k <= 60; ++k) {
    const double mag = std::abs(t);
    if (k > 0 && mag > prev) break;  // divergent tail reached
    const int j = k / 2;
    const double signed_t = (j % 2 == 0) ? t : -t;
    if (k % 2 == 0)
      P += signed_t;
    else
      Q += signed_t;
    prev = mag;
    if (mag < 1e-18) break;
    const double odd = 2.0 * k + 1.0;
    t *= (mu - odd * odd) / (8.0 * (k + 1.0) * x);
  }
  const double w = x - (0.5 * nu + 0.25) * M_PI;
  const double c = std::sqrt(2.0 / (M_PI * x));
  const double cw = std::cos(w), sw = std::sin(w);
  return {c * (P * cw - Q * sw), c * (P * sw + Q * cw)};
}

inline std::pair<double, double> jy_pair(double nu, double x, BesselBranch branch) {
  switch (branch) {
    case BesselBranch::series:
      return jy_series<double>(nu, x);
    case BesselBranch::series_dd:
      return jy_series<detail::dd>(nu, x);
    case BesselBranch::asymptotic:
      return jy_asymptotic(nu, x);
  }
  return {0.0, 0.0};
}

inline BesselBranch pick_branch(double x) {
  if (x <= kSeriesSwitch) return BesselBranch::series;
  if (x <= kAsymptoticSwitch) return BesselBranch::series_dd;
  return BesselBranch::asymptotic;
}

}  // namespace bessel_detail

// Evaluation pinned to one regime; the regime-agreement self tests compare
// adjacent branches on their overlap windows.
inline BesselEval bessel_eval_branch(double nu, double x, BesselBranch branch) {
  if (!(x > 0.0)) throw std::invalid_argument("bessel_eval: require x > 0");
  if (!(nu >= 0.0) || nu > 5.0)
    throw std::invalid_argument("bessel_eval: supported order range is [0, 5]");
  const auto [J0v, Y0v] = bessel_detail::jy_pair(nu, x, branch);
  const auto [J1v, Y1v] = bessel_detail::jy_pair(nu + 1.0, x, branch);
  BesselEval out;
  out.nu = nu;
  out.x = x;
  out.J = J0v;
  out.Y = Y0v;
  out.Jprime = (nu / x) * J0v - J1v;
  out.Yprime = (nu / x) * Y0v - Y1v;
  return out;
}

inline BesselEval bessel_eval(double nu, double x) {
  return bessel_eval_branch(nu, x, bessel_detail::pick_branch(x));
}

struct BesselFundamental {
  double x = 0.0;
  double u = 0.0, uprime = 0.0, v = 0.0, vprime = 0.0;
};

// Closed-form fundamental system of the inverse-square problem,
//   u, v = combinations of sqrt(x) J_nu(x sqrt(lambda)), sqrt(x) Y_nu(...)
// normalized to u(a)=1, u'(a)=0, v(a)=0, v'(a)=1.
inline BesselFundamental bessel_fundamental(double nu, double a, double lambda, double x) {
  if (!(a > 0.0) || !(lambda > 0.0) || !(x >= a))
    throw std::invalid_argument("bessel_fundamental: require a > 0, lambda > 0, x >= a");
  const double w = std::sqrt(lambda);
  const BesselEval ea = bessel_eval(nu, a * w);
  const double sa = std::sqrt(a);
  const double cu_J = M_PI / (4.0 * sa) * ea.Y + M_PI / 2.0 * sa * w * ea.Yprime;
  const double cu_Y = -M_PI / (4.0 * sa) * ea.J - M_PI / 2.0 * sa * w * ea.Jprime;
  const double cv_J = -M_PI / 2.0 * sa * ea.Y;
  const double cv_Y = M_PI / 2.0 * sa * ea.J;

  const BesselEval ex = bessel_eval(nu, x * w);
  const double sx = std::sqrt(x);
  const double fJ = sx * ex.J, fY = sx * ex.Y;
  const double dJ = ex.J / (2.0 * sx) + sx * w * ex.Jprime;
  const double dY = ex.Y / (2.0 * sx) + sx * w * ex.Yprime;

  BesselFundamental out;
  out.x = x;
  out.u = cu_J * fJ + cu_Y * fY;
  out.uprime = cu_J * dJ + cu_Y * dY;
  out.v = cv_J * fJ + cv_Y * fY;
  out.vprime = cv_J * dJ + cv_Y * dY;
  return out;
}

// Connection coefficients of the inverse-square problem in closed form:
//   a~ = (pi a / 2)(J^2 + Y^2)(a sqrt(lambda)), etc.
inline FormCoefficients bessel_connection(double nu, double a, double lambda) {
  if (!(a > 0.0) || !(lambda > 0.0))
    throw std::invalid_argument("bessel_connection: require a > 0, lambda > 0");
  const double w = std::sqrt(lambda);
  const BesselEval e = bessel_eval(nu, a * w);
  const double m2 = e.J * e.J + e.Y * e.Y;
  const double md2 = e.Jprime * e.Jprime + e.Yprime * e.Yprime;
  const double cross = e.J * e.Jprime + e.Y * e.Yprime;
  FormCoefficients f;
  f.a = M_PI * a / 2.0 * m2;
  f.b = M_PI / 2.0 * m2 + M_PI * a * w * cross;
  f.c = M_PI / (8.0 * a) * m2 + M_PI * a * lambda / 2.0 * md2 + M_PI * w / 2.0 * cross;
  return f;
}

// Spectral density f(lambda) = 2 / (pi^2 a (J^2 + Y^2)(a sqrt(lambda))).
inline double bessel_density(double nu, double a, double lambda) {
  if (!(a > 0.0) || !(lambda > 0.0))
    throw std::invalid_argument("bessel_density: require a > 0, lambda > 0");
  const double w = std::sqrt(lambda);
  const BesselEval e = bessel_eval(nu, a * w);
  return 2.0 / (M_PI * M_PI * a * (e.J * e.J + e.Y * e.Y));
}

}  // namespace valdist
