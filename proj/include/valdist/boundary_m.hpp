#pragma once

// Per-lambda providers of (A, B), the real and imaginary parts of the
// boundary m-function on an interval of absolutely continuous spectrum.

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <utility>

#include "valdist/appell_forms.hpp"
#include "valdist/bessel.hpp"
#include "valdist/grid.hpp"
#include "valdist/interval.hpp"
#include "valdist/potential.hpp"

namespace valdist {

struct BoundaryM {
  enum class Provenance { closed_form, appell_derived, grid_interpolated };

  std::function<std::pair<double, double>(double)> ab;
  Interval support{0.0, kInf};
  Provenance provenance = Provenance::closed_form;

  std::pair<double, double> operator()(double lambda) const {
    if (!(lambda > support.lo && lambda < support.hi))
      throw std::invalid_argument("BoundaryM: lambda outside the declared a.c. interval");
    const auto [A, B] = ab(lambda);
    if (!(B > 0.0))
      throw std::invalid_argument("BoundaryM: B(lambda) must be positive on the support");
    return {A, B};
  }

  // Free half-line problem: m+(lambda) = i sqrt(lambda) on (0, inf).
  static BoundaryM free_model() {
    return {[](double l) { return std::make_pair(0.0, std::sqrt(l)); },
            Interval{0.0, kInf},
            Provenance::closed_form};
  }

  // Inverse-square potential via the closed-form connection coefficients.
  static BoundaryM bessel_model(double nu, double a) {
    return {[nu, a](double l) {
              const FormCoefficients f = bessel_connection(nu, a, l);
              return std::make_pair(f.b / (2.0 * f.a), 1.0 / f.a);
            },
            Interval{0.0, kInf},
            Provenance::closed_form};
  }

  // Numeric route: connection coefficients by frame matching, per lambda.
  static BoundaryM appell_model(Potential p, IntegratorConfig cfg = {}) {
    auto pot = std::make_shared<Potential>(std::move(p));
    return {[pot, cfg](double l) {
              const ConnectionResult r = connection_coefficients(*pot, l, {}, cfg);
              const DensityResult d = density_from_coeffs(r.coeffs, l);
              return std::make_pair(d.A, d.B);
            },
            Interval{0.0, kInf},
            Provenance::appell_derived};
  }

  // Piecewise-linear interpolation of sampled (A, B) grids.
  static BoundaryM grid_model(GridFunction A, GridFunction B) {
    if (A.lambda.size() == 0 || B.lambda.size() == 0)
      throw std::invalid_argument("BoundaryM::grid_model: empty grid");
    const Interval dom{std::max(A.domain().lo, B.domain().lo),
                       std::min(A.domain().hi, B.domain().hi)};
    auto a_fn = std::make_shared<GridFunction>(std::move(A));
    auto b_fn = std::make_shared<GridFunction>(std::move(B));
    return {[a_fn, b_fn](double l) { return std::make_pair((*a_fn)(l), (*b_fn)(l)); },
            dom,
            Provenance::grid_interpolated};
  }
};

}  // namespace valdist
