#pragma once

// Minimal double-double arithmetic (Dekker/Knuth error-free transformations,
// products via FMA).  Used to sum Bessel ascending series through the
// mid-range of x where plain double summation loses too many digits to
// cancellation.  Roughly 31 significant digits.

#include <cmath>

namespace valdist::detail {

struct dd {
  double hi = 0.0;
  double lo = 0.0;

  dd() = default;
  constexpr dd(double h, double l) : hi(h), lo(l) {}
  constexpr dd(double h) : hi(h), lo(0.0) {}

  double to_double() const { return hi + lo; }
};

inline dd two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline dd quick_two_sum(double a, double b) {  // requires |a| >= |b|
  const double s = a + b;
  return {s, b - (s - a)};
}

inline dd two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

inline dd operator+(const dd& a, const dd& b) {
  dd s = two_sum(a.hi, b.hi);
  s.lo += a.lo + b.lo;
  return quick_two_sum(s.hi, s.lo);
}

inline dd operator-(const dd& a) { return {-a.hi, -a.lo}; }

inline dd operator-(const dd& a, const dd& b) { return a + (-b); }

inline dd operator*(const dd& a, const dd& b) {
  dd p = two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return quick_two_sum(p.hi, p.lo);
}

inline dd operator*(const dd& a, double b) { return a * dd(b); }
inline dd operator*(double a, const dd& b) { return dd(a) * b; }

inline dd operator/(const dd& a, const dd& b) {
  const double q1 = a.hi / b.hi;
  dd r = a - b * q1;
  const double q2 = r.hi / b.hi;
  r = r - b * q2;
  const double q3 = r.hi / b.hi;
  dd q = quick_two_sum(q1, q2);
  return q + dd(q3);
}

inline dd operator/(const dd& a, double b) { return a / dd(b); }

inline double abs_value(const dd& a) { return std::abs(a.to_double()); }

}  // namespace valdist::detail
