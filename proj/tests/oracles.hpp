#pragma once

// Reference computations used only by the tests. Each one is written
// independently of the library code it checks.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "fdsm/solver.hpp"

namespace oracle {

using fdsm::Vector;

inline Vector random_vector(std::size_t d, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(d);
  for (auto& x : v) x = u(rng);
  return v;
}

inline Eigen::MatrixXd to_eigen(const fdsm::DenseMatrix& m) {
  Eigen::MatrixXd out(m.rows, m.cols);
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) out(r, c) = m(r, c);
  }
  return out;
}

// Column-by-column materialization through apply() only.
inline Eigen::MatrixXd materialize(const fdsm::LinearMap& map) {
  Eigen::MatrixXd out(map.out_dim(), map.in_dim());
  Vector e(map.in_dim(), 0.0);
  for (std::size_t j = 0; j < map.in_dim(); ++j) {
    e[j] = 1.0;
    const Vector col = map.apply(e);
    for (std::size_t i = 0; i < col.size(); ++i) out(i, j) = col[i];
    e[j] = 0.0;
  }
  return out;
}

// Largest singular value from the symmetric eigendecomposition of B^T B.
inline double spectral_norm(const Eigen::MatrixXd& b) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.transpose() * b);
  return std::sqrt(es.eigenvalues().maxCoeff());
}

// Minimizes f over [lo0,hi0] x [lo1,hi1] on a grid, then re-grids around the
// best point with a shrinking window that never leaves the original box.
inline Vector grid_minimize_2d(const std::function<double(double, double)>& f, double lo0, double hi0,
                               double lo1, double hi1, int points = 401, int rounds = 6) {
  const double min0 = lo0, max0 = hi0, min1 = lo1, max1 = hi1;
  double bx = lo0, by = lo1, best = f(lo0, lo1);
  for (int round = 0; round < rounds; ++round) {
    const double sx = (hi0 - lo0) / (points - 1), sy = (hi1 - lo1) / (points - 1);
    for (int i = 0; i < points; ++i) {
      for (int j = 0; j < points; ++j) {
        const double x = lo0 + i * sx, y = lo1 + j * sy;
        const double v = f(x, y);
        if (v < best) best = v, bx = x, by = y;
      }
    }
    const double wx = 4 * sx, wy = 4 * sy;
    lo0 = std::max(min0, bx - wx), hi0 = std::min(max0, bx + wx);
    lo1 = std::max(min1, by - wy), hi1 = std::min(max1, by + wy);
  }
  return {bx, by};
}

// Straightforward delayed recursion that keeps every iterate and recomputes
// the delayed subgradient every step.
inline std::vector<Vector> naive_fdsm(const fdsm::FneOperator& t, const fdsm::SubgradientOracle& f,
                                      const Vector& x0, const std::function<double(std::size_t)>& alpha,
                                      const std::function<std::size_t(std::size_t)>& delay,
                                      std::size_t iters) {
  std::vector<Vector> xs{x0};
  for (std::size_t n = 0; n < iters; ++n) {
    const std::size_t k = delay(n) > n ? 0 : n - delay(n);
    const Vector g = f.subgradient(t.apply(xs[k]));
    Vector next = t.apply(xs[n]);
    for (std::size_t i = 0; i < next.size(); ++i) next[i] -= alpha(n) * g[i];
    xs.push_back(std::move(next));
  }
  return xs;
}

// Rate bound summed in long double.
inline long double rate_bound_ld(long double d0, long double c, const std::vector<long double>& alpha,
                                 long double a) {
  long double s1 = 0, s2 = 0, sa = 0;
  for (long double x : alpha) {
    s1 += x;
    s2 += x * x;
    sa += std::pow(x, 2.0L - a);
  }
  return (d0 + 2 * c * c * s2 + 40 * c * c * sa) / (2 * s1);
}

}  // namespace oracle
