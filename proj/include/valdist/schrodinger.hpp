#pragma once

// Propagation of the fundamental system {u, v} of  -y'' + q y = lambda y
// from the regular endpoint x = a, with u(a)=1, u'(a)=0, v(a)=0, v'(a)=1.
// Extra quadrature components (the phase theta0 and the solution moments
// used by the Condition A ratio) ride along in the same integration.

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <vector>

#include "valdist/dop853.hpp"
#include "valdist/potential.hpp"

namespace valdist {

template <class Scalar>
struct SchrodingerState {
  double x = 0.0;
  Scalar u{}, uprime{}, v{}, vprime{};

  Scalar wronskian() const { return u * vprime - uprime * v; }
};

using RealState = SchrodingerState<double>;
using ComplexState = SchrodingerState<std::complex<double>>;

namespace detail {

template <class Scalar>
struct FundamentalRhs {
  const Potential& q;
  Scalar lambda;

  using State = Eigen::Matrix<Scalar, 4, 1>;
  void operator()(double x, const State& y, State& dy) const {
    const Scalar w = (Scalar(q(x)) - lambda);
    dy[0] = y[1];
    dy[1] = w * y[0];
    dy[2] = y[3];
    dy[3] = w * y[2];
  }
};

template <class Scalar>
Eigen::Matrix<Scalar, 4, 1> fundamental_seed() {
  Eigen::Matrix<Scalar, 4, 1> y;
  y << Scalar(1), Scalar(0), Scalar(0), Scalar(1);
  return y;
}

// Fundamental system plus the phase quadrature
//   theta0' = B / ((u + A v)^2 + B^2 v^2).
struct FundamentalTheta0Rhs {
  const Potential& q;
  double lambda, A, B;

  using State = Eigen::Matrix<double, 5, 1>;
  void operator()(double x, const State& y, State& dy) const {
    const double w = q(x) - lambda;
    dy[0] = y[1];
    dy[1] = w * y[0];
    dy[2] = y[3];
    dy[3] = w * y[2];
    const double c = y[0] + A * y[2];
    const double s = B * y[2];
    dy[4] = B / (c * c + s * s);
  }
};

// Fundamental system plus the moments  int u^2,  int u v,  int v^2.
struct FundamentalMomentsRhs {
  const Potential& q;
  double lambda;

  using State = Eigen::Matrix<double, 7, 1>;
  void operator()(double x, const State& y, State& dy) const {
    const double w = q(x) - lambda;
    dy[0] = y[1];
    dy[1] = w * y[0];
    dy[2] = y[3];
    dy[3] = w * y[2];
    dy[4] = y[0] * y[0];
    dy[5] = y[0] * y[2];
    dy[6] = y[2] * y[2];
  }
};

}  // namespace detail

template <class Scalar>
SchrodingerState<Scalar> propagate_fundamental_impl(const Potential& p, Scalar lambda,
                                                    double x_target,
                                                    const IntegratorConfig& cfg) {
  if (x_target < p.a())
    throw std::invalid_argument("propagate_fundamental: x_target < a");
  using State = Eigen::Matrix<Scalar, 4, 1>;
  detail::FundamentalRhs<Scalar> rhs{p, lambda};
  State y = integrate_to(rhs, p.a(), detail::fundamental_seed<Scalar>(), x_target, cfg);
  return SchrodingerState<Scalar>{x_target, y[0], y[1], y[2], y[3]};
}

inline RealState propagate_fundamental(const Potential& p, double lambda, double x_target,
                                       const IntegratorConfig& cfg = {}) {
  return propagate_fundamental_impl<double>(p, lambda, x_target, cfg);
}

inline ComplexState propagate_fundamental(const Potential& p, std::complex<double> lambda,
                                          double x_target,
                                          const IntegratorConfig& cfg = {}) {
  if (lambda.imag() == 0.0) {
    const RealState s = propagate_fundamental(p, lambda.real(), x_target, cfg);
    return ComplexState{s.x, s.u, s.uprime, s.v, s.vprime};
  }
  return propagate_fundamental_impl<std::complex<double>>(p, lambda, x_target, cfg);
}

// Runs the fundamental system through an ascending list of x stops,
// calling on_stop(state) at each.  One pass serves a whole x schedule.
template <class OnStop>
void propagate_fundamental_path(const Potential& p, double lambda,
                                std::span<const double> stops, const IntegratorConfig& cfg,
                                OnStop&& on_stop) {
  detail::FundamentalRhs<double> rhs{p, lambda};
  integrate_path(rhs, p.a(), detail::fundamental_seed<double>(), stops, cfg,
                 [&](double x, const Eigen::Matrix<double, 4, 1>& y) {
                   on_stop(RealState{x, y[0], y[1], y[2], y[3]});
                 });
}

// theta0(x, lambda) = int_a^x B / ((u + A v)^2 + B^2 v^2) dt, accumulated as
// an extra component of the propagation.  Strictly increasing in x for B > 0.
inline double accumulate_theta0(const Potential& p, double lambda, double A, double B,
                                double x_target, const IntegratorConfig& cfg = {}) {
  if (!(B > 0.0)) throw std::invalid_argument("accumulate_theta0: require B > 0");
  if (x_target < p.a())
    throw std::invalid_argument("accumulate_theta0: x_target < a");
  using State = Eigen::Matrix<double, 5, 1>;
  detail::FundamentalTheta0Rhs rhs{p, lambda, A, B};
  State y;
  y << 1.0, 0.0, 0.0, 1.0, 0.0;
  y = integrate_to(rhs, p.a(), y, x_target, cfg);
  return y[4];
}

struct Theta0Sample {
  RealState state;
  double theta0 = 0.0;
};

template <class OnStop>
void accumulate_theta0_path(const Potential& p, double lambda, double A, double B,
                            std::span<const double> stops, const IntegratorConfig& cfg,
                            OnStop&& on_stop) {
  if (!(B > 0.0)) throw std::invalid_argument("accumulate_theta0: require B > 0");
  using State = Eigen::Matrix<double, 5, 1>;
  detail::FundamentalTheta0Rhs rhs{p, lambda, A, B};
  State y;
  y << 1.0, 0.0, 0.0, 1.0, 0.0;
  integrate_path(rhs, p.a(), y, stops, cfg, [&](double x, const State& s) {
    on_stop(Theta0Sample{RealState{x, s[0], s[1], s[2], s[3]}, s[4]});
  });
}

struct SolutionMoments {
  RealState state;
  double uu = 0.0, uv = 0.0, vv = 0.0;  // int u^2, int u v, int v^2 over [a, x]
};

inline SolutionMoments accumulate_moments(const Potential& p, double lambda, double x_target,
                                          const IntegratorConfig& cfg = {}) {
  if (x_target < p.a()) throw std::invalid_argument("accumulate_moments: x_target < a");
  using State = Eigen::Matrix<double, 7, 1>;
  detail::FundamentalMomentsRhs rhs{p, lambda};
  State y;
  y << 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0;
  y = integrate_to(rhs, p.a(), y, x_target, cfg);
  return SolutionMoments{RealState{x_target, y[0], y[1], y[2], y[3]}, y[4], y[5], y[6]};
}

}  // namespace valdist
