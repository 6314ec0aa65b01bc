#pragma once

// Uniform lambda grids and the per-point value arrays built on them, plus a
// small deterministic parallel sweep helper.  Grid sweeps write into
// preallocated slots indexed by grid position, so results are bitwise
// independent of the number of worker threads.

#include <Eigen/Dense>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include "valdist/interval.hpp"

namespace valdist {

struct GridFunction {
  Eigen::ArrayXd lambda;
  Eigen::ArrayXd values;

  GridFunction() = default;
  GridFunction(Eigen::ArrayXd grid, Eigen::ArrayXd vals)
      : lambda(std::move(grid)), values(std::move(vals)) {
    if (lambda.size() != values.size())
      throw std::invalid_argument("GridFunction: grid/value size mismatch");
    for (Eigen::Index i = 1; i < lambda.size(); ++i)
      if (!(lambda[i] > lambda[i - 1]))
        throw std::invalid_argument("GridFunction: grid must be strictly increasing");
  }

  Interval domain() const {
    if (lambda.size() == 0) return {0.0, 0.0};
    return {lambda[0], lambda[lambda.size() - 1]};
  }

  // Piecewise-linear evaluation, clamped at the grid ends.
  double operator()(double x) const {
    const Eigen::Index n = lambda.size();
    if (n == 0) throw std::logic_error("GridFunction: empty");
    if (x <= lambda[0]) return values[0];
    if (x >= lambda[n - 1]) return values[n - 1];
    Eigen::Index lo = 0, hi = n - 1;
    while (hi - lo > 1) {
      const Eigen::Index mid = (lo + hi) / 2;
      (lambda[mid] <= x ? lo : hi) = mid;
    }
    const double t = (x - lambda[lo]) / (lambda[lo + 1] - lambda[lo]);
    return values[lo] + t * (values[lo + 1] - values[lo]);
  }
};

// Midpoints of n equal cells covering the interval.  All measure estimates
// and Lambda-integrals use this grid so that jump discontinuities are never
// sampled at cell boundaries.
inline Eigen::ArrayXd midpoint_grid(const Interval& domain, int n) {
  if (n < 2) throw std::invalid_argument("midpoint_grid: need n >= 2");
  if (!domain.bounded() || !(domain.lo < domain.hi))
    throw std::invalid_argument("midpoint_grid: need a bounded interval");
  const double h = domain.length() / n;
  Eigen::ArrayXd grid(n);
  for (int i = 0; i < n; ++i) grid[i] = domain.lo + (i + 0.5) * h;
  return grid;
}

// Runs fn(i) for i in [0, n).  threads <= 0 picks the hardware count.
template <class Fn>
void parallel_for_index(std::size_t n, int threads, Fn&& fn) {
  unsigned nt = threads > 0 ? static_cast<unsigned>(threads)
                            : std::max(1u, std::thread::hardware_concurrency());
  nt = std::min<std::size_t>(nt, n > 0 ? n : 1);
  if (nt <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nt);
  std::exception_ptr error;
  std::mutex error_mutex;
  for (unsigned t = 0; t < nt; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += nt) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace valdist
