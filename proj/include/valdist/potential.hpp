#pragma once

// Potentials q(x) on [a, infinity).  Built-in analytic families plus
// user-tabulated data with monotone cubic (Fritsch-Carlson) interpolation.
// Tabulated potentials continue with their last value beyond the table.

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace valdist {

namespace detail {

// Monotone cubic Hermite interpolant.  Slopes follow Fritsch-Carlson, so the
// interpolant preserves monotonicity between breakpoints and is C^1.
class Pchip {
 public:
  Pchip() = default;

  Pchip(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n != y_.size() || n < 2)
      throw std::invalid_argument("Pchip: need at least two matching breakpoints");
    for (std::size_t i = 1; i < n; ++i)
      if (!(x_[i] > x_[i - 1]))
        throw std::invalid_argument("Pchip: breakpoints must be strictly increasing");
    m_.assign(n, 0.0);
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x_[i + 1] - x_[i];
      delta[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    if (n == 2) {
      m_[0] = m_[1] = delta[0];
    } else {
      for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
          m_[i] = 0.0;
        } else {
          const double w1 = 2.0 * h[i] + h[i - 1];
          const double w2 = h[i] + 2.0 * h[i - 1];
          m_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
      }
      m_[0] = edge_slope(h[0], h[1], delta[0], delta[1]);
      m_[n - 1] = edge_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    }
  }

  double value(double x) const { return eval(x).first; }
  double derivative(double x) const { return eval(x).second; }
  double front() const { return x_.front(); }
  double back() const { return x_.back(); }

 private:
  static double edge_slope(double h0, double h1, double d0, double d1) {
    double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (m * d0 <= 0.0)
      m = 0.0;
    else if (d0 * d1 < 0.0 && std::abs(m) > 3.0 * std::abs(d0))
      m = 3.0 * d0;
    return m;
  }

  std::pair<double, double> eval(double x) const {
    const std::size_t n = x_.size();
    if (x <= x_.front()) return {y_.front(), 0.0};
    if (x >= x_.back()) return {y_.back(), 0.0};
    std::size_t lo = 0, hi = n - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      (x_[mid] <= x ? lo : hi) = mid;
    }
    const double h = x_[lo + 1] - x_[lo];
    const double t = (x - x_[lo]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    const double val = h00 * y_[lo] + h10 * h * m_[lo] + h01 * y_[lo + 1] + h11 * h * m_[lo + 1];
    const double d00 = 6 * t2 - 6 * t, d10 = 3 * t2 - 4 * t + 1;
    const double d01 = -6 * t2 + 6 * t, d11 = 3 * t2 - 2 * t;
    const double der =
        (d00 * y_[lo] + d01 * y_[lo + 1]) / h + d10 * m_[lo] + d11 * m_[lo + 1];
    return {val, der};
  }

  std::vector<double> x_, y_, m_;
};

}  // namespace detail

class Potential {
 public:
  enum class Kind { zero, inverse_square, tabulated };

  static Potential zero(double a = 0.0) {
    Potential p;
    p.kind_ = Kind::zero;
    p.a_ = a;
    return p;
  }

  // q(x) = (nu^2 - 1/4) / x^2 on [a, infinity), a > 0.
  static Potential inverse_square(double nu, double a) {
    if (!(nu >= 0.0)) throw std::invalid_argument("Potential: require nu >= 0");
    if (!(a > 0.0)) throw std::invalid_argument("Potential: inverse-square requires a > 0");
    Potential p;
    p.kind_ = Kind::inverse_square;
    p.a_ = a;
    p.nu_ = nu;
    return p;
  }

  static Potential tabulated(std::vector<double> x, std::vector<double> q, double a) {
    if (x.empty() || x.front() > a)
      throw std::invalid_argument("Potential: first breakpoint must not exceed a");
    Potential p;
    p.kind_ = Kind::tabulated;
    p.a_ = a;
    p.table_ = detail::Pchip(std::move(x), std::move(q));
    return p;
  }

  Kind kind() const { return kind_; }
  double a() const { return a_; }
  double nu() const { return nu_; }

  double operator()(double x) const {
    switch (kind_) {
      case Kind::zero:
        return 0.0;
      case Kind::inverse_square:
        return (nu_ * nu_ - 0.25) / (x * x);
      case Kind::tabulated:
        return table_.value(x);
    }
    return 0.0;
  }

  double derivative(double x) const {
    switch (kind_) {
      case Kind::zero:
        return 0.0;
      case Kind::inverse_square:
        return -2.0 * (nu_ * nu_ - 0.25) / (x * x * x);
      case Kind::tabulated:
        return table_.derivative(x);
    }
    return 0.0;
  }

  // True when q(x) -> 0 as x -> infinity, the class the asymptotic matching
  // of the connection coefficients is valid for.
  bool decays_to_zero() const {
    switch (kind_) {
      case Kind::zero:
      case Kind::inverse_square:
        return true;
      case Kind::tabulated:
        return std::abs(table_.value(table_.back())) <= 1e-12;
    }
    return false;
  }

  std::string describe() const {
    switch (kind_) {
      case Kind::zero:
        return "zero(a=" + std::to_string(a_) + ")";
      case Kind::inverse_square:
        return "inverse_square(nu=" + std::to_string(nu_) + ", a=" + std::to_string(a_) + ")";
      case Kind::tabulated:
        return "tabulated(a=" + std::to_string(a_) + ")";
    }
    return "?";
  }

 private:
  Potential() = default;

  Kind kind_ = Kind::zero;
  double a_ = 0.0;
  double nu_ = 0.0;
  detail::Pchip table_;
};

}  // namespace valdist
