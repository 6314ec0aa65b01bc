#pragma once

// The first order 3x3 companion system
//
//   d/dx (P, Q, R)^T = [ 0      lambda-q   0          ] (P, Q, R)^T
//                      [ -2     0          2(lambda-q)]
//                      [ 0      -1         0          ]
//
// whose R components range over quadratic forms a u^2 + b uv + c v^2 of
// Schrodinger solutions.  The frame propagated here is seeded at x = a with
// the columns U1 = (0,0,1), U2 = (0,-1,0), U3 = (1,0,0), i.e. the images of
// the basis forms u^2, uv, v^2 under the identity fundamental frame.

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "valdist/dop853.hpp"
#include "valdist/potential.hpp"

namespace valdist {

// 2(P R~ + P~ R) - Q Q~, the indefinite inner product conserved along
// trajectories of the companion system.  Triples are ordered (P, Q, R).
inline double appell_inner_product(const Eigen::Vector3d& U, const Eigen::Vector3d& V) {
  return 2.0 * (U[0] * V[2] + V[0] * U[2]) - U[1] * V[1];
}

struct AppellFrame {
  double x = 0.0;
  Eigen::Matrix3d U = Eigen::Matrix3d::Zero();  // column j holds U_{j+1}, rows (P,Q,R)

  Eigen::Vector3d U1() const { return U.col(0); }
  Eigen::Vector3d U2() const { return U.col(1); }
  Eigen::Vector3d U3() const { return U.col(2); }
  Eigen::Vector3d r_components() const { return U.row(2).transpose(); }

  Eigen::Matrix3d gram() const {
    Eigen::Matrix3d g;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) g(i, j) = appell_inner_product(U.col(i), U.col(j));
    return g;
  }

  // Gram matrix of the seeded basis; constant in x.
  static Eigen::Matrix3d reference_gram() {
    Eigen::Matrix3d g;
    g << 0, 0, 2, 0, -1, 0, 2, 0, 0;
    return g;
  }

  static Eigen::Matrix3d seed() {
    Eigen::Matrix3d u0;
    u0 << 0, 0, 1, 0, -1, 0, 1, 0, 0;
    return u0;
  }
};

namespace detail {

struct AppellRhs {
  const Potential& q;
  double lambda;

  using State = Eigen::Matrix<double, 9, 1>;  // three stacked (P,Q,R) columns
  void operator()(double x, const State& y, State& dy) const {
    const double w = lambda - q(x);
    for (int c = 0; c < 3; ++c) {
      const double P = y[3 * c], Q = y[3 * c + 1], R = y[3 * c + 2];
      dy[3 * c] = w * Q;
      dy[3 * c + 1] = -2.0 * P + 2.0 * w * R;
      dy[3 * c + 2] = -Q;
    }
  }
};

inline Eigen::Matrix<double, 9, 1> appell_seed() {
  Eigen::Matrix<double, 9, 1> y;
  const Eigen::Matrix3d u0 = AppellFrame::seed();
  for (int c = 0; c < 3; ++c)
    for (int r = 0; r < 3; ++r) y[3 * c + r] = u0(r, c);
  return y;
}

inline AppellFrame frame_from_state(double x, const Eigen::Matrix<double, 9, 1>& y) {
  AppellFrame f;
  f.x = x;
  for (int c = 0; c < 3; ++c)
    for (int r = 0; r < 3; ++r) f.U(r, c) = y[3 * c + r];
  return f;
}

}  // namespace detail

inline AppellFrame propagate_appell(const Potential& p, double lambda, double x_target,
                                    const IntegratorConfig& cfg = {}) {
  if (x_target < p.a()) throw std::invalid_argument("propagate_appell: x_target < a");
  detail::AppellRhs rhs{p, lambda};
  const auto y = integrate_to(rhs, p.a(), detail::appell_seed(), x_target, cfg);
  return detail::frame_from_state(x_target, y);
}

// Frames at every stop of an ascending schedule, from one integration pass.
inline std::vector<AppellFrame> propagate_appell_path(const Potential& p, double lambda,
                                                      std::span<const double> stops,
                                                      const IntegratorConfig& cfg = {}) {
  std::vector<AppellFrame> frames;
  frames.reserve(stops.size());
  detail::AppellRhs rhs{p, lambda};
  integrate_path(rhs, p.a(), detail::appell_seed(), stops, cfg,
                 [&](double x, const Eigen::Matrix<double, 9, 1>& y) {
                   frames.push_back(detail::frame_from_state(x, y));
                 });
  return frames;
}

}  // namespace valdist
