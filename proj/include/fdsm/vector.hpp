#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fdsm {

using Vector = std::vector<double>;
using ConstView = std::span<const double>;

/// Invalid arguments: dimension mismatch, out-of-range parameters.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InputError(message);
}

inline void require_dim(std::size_t got, std::size_t expected, const char* what) {
  if (got != expected) {
    throw InputError(std::string(what) + ": dimension mismatch (got " + std::to_string(got) +
                     ", expected " + std::to_string(expected) + ")");
  }
}

inline double dot(ConstView x, ConstView y) {
  require_dim(y.size(), x.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

inline double norm_sq(ConstView x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

inline double norm(ConstView x) { return std::sqrt(norm_sq(x)); }

inline double norm1(ConstView x) {
  double s = 0.0;
  for (double v : x) s += std::abs(v);
  return s;
}

inline double dist_sq(ConstView x, ConstView y) {
  require_dim(y.size(), x.size(), "dist");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

inline double dist(ConstView x, ConstView y) { return std::sqrt(dist_sq(x, y)); }

inline Vector sub(ConstView x, ConstView y) {
  require_dim(y.size(), x.size(), "sub");
  Vector r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] - y[i];
  return r;
}

inline Vector add(ConstView x, ConstView y) {
  require_dim(y.size(), x.size(), "add");
  Vector r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] + y[i];
  return r;
}

inline Vector scaled(ConstView x, double s) {
  Vector r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = s * x[i];
  return r;
}

/// y += s * x
inline void axpy(double s, ConstView x, std::span<double> y) {
  require_dim(x.size(), y.size(), "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += s * x[i];
}

}  // namespace fdsm
