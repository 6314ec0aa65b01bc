#pragma once

// Quadratic forms R = a u^2 + b uv + c v^2 of Schrodinger solutions, the
// indefinite inner product in coefficient coordinates, the connection
// coefficients obtained by matching the propagated frame against the
// constant far-field solution (sqrt(lambda), 0, 1/sqrt(lambda)), and the
// spectral density / boundary m-function data they determine.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "valdist/appell.hpp"
#include "valdist/potential.hpp"
#include "valdist/schrodinger.hpp"

namespace valdist {

class matching_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FormCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double discriminant() const { return 4.0 * a * c - b * b; }
};

// Inner product of two companion-system solution triples at the same x.
inline double inner_product(const Eigen::Vector3d& U, const Eigen::Vector3d& V) {
  return appell_inner_product(U, V);
}

// <F1, F2> = 2(a1 c2 + c1 a2) - b1 b2; agrees with the (P,Q,R) inner product
// of the corresponding companion-system solutions at every x.
inline double inner_product_coeffs(const FormCoefficients& f1, const FormCoefficients& f2) {
  return 2.0 * (f1.a * f2.c + f1.c * f2.a) - f1.b * f2.b;
}

// Coefficients of R0 = |u + (A + iB) v|^2 / B; discriminant exactly 4.
inline FormCoefficients r0_coefficients(double A, double B) {
  if (!(B > 0.0)) throw std::invalid_argument("r0_coefficients: require B > 0");
  return {1.0 / B, 2.0 * A / B, (A * A + B * B) / B};
}

struct DensityResult {
  double lambda = 0.0;
  double a_tilde = 0.0, b_tilde = 0.0, c_tilde = 0.0;
  double f = 0.0;  // spectral density, 1/(pi a_tilde)
  double A = 0.0;  // Re m+
  double B = 0.0;  // Im m+
};

inline DensityResult density_from_coeffs(const FormCoefficients& coeffs,
                                         double lambda = std::numeric_limits<double>::quiet_NaN()) {
  if (!(coeffs.a > 0.0))
    throw matching_error("density_from_coeffs: a_tilde <= 0 signals a failed matching");
  DensityResult r;
  r.lambda = lambda;
  r.a_tilde = coeffs.a;
  r.b_tilde = coeffs.b;
  r.c_tilde = coeffs.c;
  r.f = 1.0 / (M_PI * coeffs.a);
  r.B = 1.0 / coeffs.a;
  r.A = coeffs.b / (2.0 * coeffs.a);
  return r;
}

struct ConnectionResult {
  FormCoefficients coeffs;
  double error_estimate = 0.0;  // relative, from the extrapolation fit
  bool low_confidence = false;
  std::vector<double> match_points;
};

namespace detail {

inline constexpr double kMatchThreshold = 1e-3;      // require |q(X)| <= 1e-3 lambda
inline constexpr double kLowConfidence = 1e-4;

// Default schedule: geometric bases {X0, 2X0, 4X0}, each widened to four
// points a quarter oscillation period apart.  The frame entries oscillate at
// frequency 2 sqrt(lambda); quarter-period clusters cancel that component of
// the per-point matching error, and the 1/X fit removes the smooth tail.
inline std::vector<double> default_match_points(const Potential& p, double lambda) {
  double x0 = std::max(p.a() + 1.0, 500.0);
  const double w = std::sqrt(lambda);
  // push past the |q| <= 1e-3 lambda threshold if the potential decays slowly
  double xq = p.a();
  for (double x = std::max(p.a(), 1.0); x < 1e7; x *= 1.25) {
    if (std::abs(p(x)) <= kMatchThreshold * lambda) {
      xq = x;
      break;
    }
  }
  x0 = std::max(x0, xq);
  const double quarter = M_PI / (4.0 * w);
  std::vector<double> pts;
  for (double base : {x0, 2.0 * x0, 4.0 * x0})
    for (int j = 0; j < 4; ++j) pts.push_back(base + j * quarter);
  return pts;
}

}  // namespace detail

inline std::vector<double> default_match_points(const Potential& p, double lambda) {
  return detail::default_match_points(p, lambda);
}

// Solves the frame equation [U1 U2 U3](X) (a,b,c)^T = (sqrt(l), 0, 1/sqrt(l))^T
// at every match point and extrapolates each coefficient with a least-squares
// fit of c0 + c1/X, reporting c0.
inline ConnectionResult connection_coefficients(const Potential& p, double lambda,
                                                std::vector<double> match_points = {},
                                                const IntegratorConfig& cfg = {}) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("connection_coefficients: require lambda > 0");
  if (!p.decays_to_zero())
    throw std::invalid_argument(
        "connection_coefficients: potential must decay to zero at infinity");
  if (match_points.empty()) match_points = detail::default_match_points(p, lambda);
  std::sort(match_points.begin(), match_points.end());
  for (double X : match_points) {
    if (!(X > p.a()))
      throw std::invalid_argument("connection_coefficients: match point before a");
    if (std::abs(p(X)) > detail::kMatchThreshold * lambda)
      throw matching_error("connection_coefficients: |q| above 1e-3*lambda at X = " +
                           std::to_string(X));
  }

  const std::vector<AppellFrame> frames = propagate_appell_path(p, lambda, match_points, cfg);
  const double w = std::sqrt(lambda);
  const Eigen::Vector3d target(w, 0.0, 1.0 / w);

  const int n = static_cast<int>(frames.size());
  Eigen::MatrixXd estimates(n, 3);
  for (int i = 0; i < n; ++i) {
    Eigen::FullPivLU<Eigen::Matrix3d> lu(frames[i].U);
    if (!lu.isInvertible())
      throw matching_error("connection_coefficients: singular frame at X = " +
                           std::to_string(frames[i].x));
    estimates.row(i) = lu.solve(target).transpose();
  }

  ConnectionResult result;
  result.match_points = match_points;
  if (n == 1) {
    result.coeffs = {estimates(0, 0), estimates(0, 1), estimates(0, 2)};
    result.error_estimate = 1.0;  // no extrapolation information
    result.low_confidence = true;
    return result;
  }

  Eigen::MatrixXd design(n, 2);
  for (int i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = 1.0 / match_points[i];
  }
  const auto qr = design.colPivHouseholderQr();
  Eigen::Vector3d c0;
  double se_max = 0.0;
  for (int k = 0; k < 3; ++k) {
    const Eigen::Vector2d fit = qr.solve(estimates.col(k));
    c0[k] = fit[0];
    const Eigen::VectorXd resid = estimates.col(k) - design * fit;
    if (n > 2) {
      // standard error of the intercept under the linear model
      const double s2 = resid.squaredNorm() / (n - 2);
      const Eigen::Matrix2d gram = (design.transpose() * design).inverse();
      se_max = std::max(se_max, std::sqrt(std::max(0.0, s2 * gram(0, 0))));
    }
  }
  result.coeffs = {c0[0], c0[1], c0[2]};
  const double scale = std::max({std::abs(c0[0]), std::abs(c0[1]), std::abs(c0[2]), 1e-300});
  result.error_estimate = se_max / scale;
  result.low_confidence = result.error_estimate > detail::kLowConfidence;
  return result;
}

namespace detail {

// Fornberg finite-difference weights for derivative order m at point 0 of the
// stencil zs (distinct offsets).
inline Eigen::VectorXd fornberg_weights(const Eigen::VectorXd& zs, int m) {
  const int n = static_cast<int>(zs.size());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, m + 1);
  double c1 = 1.0;
  double c4 = zs[0];
  c(0, 0) = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = zs[i];
    for (int j = 0; j < i; ++j) {
      const double c3 = zs[i] - zs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c(i, k) = c1 * (k * c(i - 1, k - 1) - c5 * c(i - 1, k)) / c2;
        c(i, 0) = -c1 * c5 * c(i - 1, 0) / c2;
      }
      for (int k = mn; k >= 1; --k)
        c(j, k) = (c4 * c(j, k) - k * c(j, k - 1)) / c3;
      c(j, 0) = c4 * c(j, 0) / c3;
    }
    c1 = c2;
  }
  return c.col(m);
}

}  // namespace detail

// Residual of the third order form equation R''' + 4(lambda - q) R' - 2 q' R
// for R = a u^2 + b uv + c v^2, with R', R''' taken by high-order central
// differences of the reconstructed R.  Independent of the companion-system
// route, which satisfies the equation identically.
inline double third_order_residual(const Potential& p, double lambda,
                                   const FormCoefficients& coeffs,
                                   const std::vector<double>& x_samples,
                                   const IntegratorConfig& cfg = {}) {
  if (x_samples.empty()) return 0.0;
  if (coeffs.a == 0.0 && coeffs.b == 0.0 && coeffs.c == 0.0) return 0.0;

  constexpr int kHalf = 4;  // 9-point stencil
  const double wfreq = std::max(1.0, 2.0 * std::sqrt(std::max(lambda, 0.0)));
  const double h = 0.08 / wfreq;

  std::vector<double> stops;
  for (double xs : x_samples) {
    if (!(xs - kHalf * h >= p.a()))
      throw std::invalid_argument("third_order_residual: sample too close to a");
    for (int j = -kHalf; j <= kHalf; ++j) stops.push_back(xs + j * h);
  }
  std::sort(stops.begin(), stops.end());

  std::vector<double> rvals;
  std::vector<double> xvals;
  rvals.reserve(stops.size());
  propagate_fundamental_path(p, lambda, stops, cfg, [&](const RealState& s) {
    rvals.push_back(coeffs.a * s.u * s.u + coeffs.b * s.u * s.v + coeffs.c * s.v * s.v);
    xvals.push_back(s.x);
  });

  Eigen::VectorXd offsets(2 * kHalf + 1);
  for (int j = -kHalf; j <= kHalf; ++j) offsets[j + kHalf] = j * h;
  const Eigen::VectorXd w1 = detail::fornberg_weights(offsets, 1);
  const Eigen::VectorXd w3 = detail::fornberg_weights(offsets, 3);

  double worst = 0.0;
  for (double xs : x_samples) {
    double r1 = 0.0, r3 = 0.0;
    for (int j = -kHalf; j <= kHalf; ++j) {
      const double target = xs + j * h;
      const auto it = std::lower_bound(xvals.begin(), xvals.end(), target - 1e-12);
      const double rv = rvals[static_cast<std::size_t>(it - xvals.begin())];
      r1 += w1[j + kHalf] * rv;
      r3 += w3[j + kHalf] * rv;
    }
    const double q = p(xs), qd = p.derivative(xs);
    const auto it = std::lower_bound(xvals.begin(), xvals.end(), xs - 1e-12);
    const double r0 = rvals[static_cast<std::size_t>(it - xvals.begin())];
    const double resid = r3 + 4.0 * (lambda - q) * r1 - 2.0 * qd * r0;
    // constant forms solve the equation with r3 = r1 = 0; the generic member
    // has |R'''| ~ (4|lambda-q|)^{3/2} |R|, which anchors the scale there
    const double floor = std::pow(4.0 * std::abs(lambda - q), 1.5) * std::abs(r0);
    const double scale = std::max({std::abs(r3), 4.0 * std::abs(lambda - q) * std::abs(r1),
                                   floor, 1e-300});
    worst = std::max(worst, std::abs(resid) / scale);
  }
  return worst;
}

}  // namespace valdist
