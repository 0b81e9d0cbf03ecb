#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "fdsm/transforms.hpp"
#include "fdsm/vector.hpp"

namespace fdsm {

/// Convex f : R^d -> R with a deterministic subgradient selection.
class SubgradientOracle {
 public:
  virtual ~SubgradientOracle() = default;
  virtual std::size_t dim() const = 0;
  virtual double value(ConstView x) const = 0;
  virtual Vector subgradient(ConstView x) const = 0;
};

using OraclePtr = std::shared_ptr<const SubgradientOracle>;

/// f(x) = ||W x - offset||_1, subgradient W^T s with s_i = sign((Wx - offset)_i)
/// and s_i = 0 on exact zeros. An empty offset means zero.
OraclePtr l1_composite(LinearMapPtr map, Vector offset = {});

/// f(x) = ||x - center||_1.
OraclePtr l1_distance(Vector center);

/// f(x) = max_i <c_i, x> + b_i; ties resolve to the smallest index.
OraclePtr max_affine(std::vector<Vector> slopes, Vector intercepts);

/// f(x) = 0.
OraclePtr zero_objective(std::size_t dim);

/// f(x) = base(x) + (mu/2) ||x - center||^2, mu > 0.
OraclePtr add_quadratic(OraclePtr base, double mu, Vector center);

/// f = sum_j f_j evaluated in list order.
class SumOracle final : public SubgradientOracle {
 public:
  explicit SumOracle(std::vector<OraclePtr> terms);

  std::size_t dim() const override { return terms_.front()->dim(); }
  double value(ConstView x) const override;
  Vector subgradient(ConstView x) const override;

  const std::vector<OraclePtr>& terms() const { return terms_; }

 private:
  std::vector<OraclePtr> terms_;
};

std::shared_ptr<const SumOracle> sum_oracle(std::vector<OraclePtr> terms);

enum class EpsMode { kShrink, kOffset };

struct EpsSubgradient {
  Vector g;
  double eps = 0.0;
  /// Shrink factor t in g = (1 - t) * subgradient(x); always 0 in offset mode.
  double shrink = 0.0;
  /// Number of validation points the accepted g was checked against.
  std::size_t validated_points = 0;
};

/// Emits epsilon-subgradients g with <g, y - x> <= f(y) - f(x) + eps.
///
/// Offset mode returns the exact subgradient (always an eps-subgradient).
/// Shrink mode returns (1 - t) * subgradient(x) for the largest t on the
/// ladder 1, 1/2, 1/4, ... (down to 2^-40, then t = 0) whose eps-inequality
/// holds on a seeded validation sample of 1024 points, backed off by one
/// rung. The sample mixes points on the ray x - r g, the segment
/// {lambda x : lambda in [-1, 2]} and random directions at log-spaced radii.
/// eps = 0 returns the base subgradient unchanged in both modes.
class EpsOracle {
 public:
  static constexpr std::size_t kValidationPoints = 1024;

  EpsOracle(OraclePtr base, EpsMode mode);

  EpsSubgradient subgradient(ConstView x, double eps, std::uint64_t seed) const;

  const SubgradientOracle& base() const { return *base_; }
  const OraclePtr& base_ptr() const { return base_; }
  EpsMode mode() const { return mode_; }

 private:
  OraclePtr base_;
  EpsMode mode_;
};

EpsOracle make_eps_oracle(OraclePtr base, EpsMode mode);

struct SubgradientReport {
  double min_slack = 0.0;  ///< min of f(y) - f(x) - <g, y - x> (+ eps)
  bool pass = false;
};

/// Checks the subgradient inequality on seeded pairs uniform on [-scale, scale]^d.
SubgradientReport check_subgradient(const SubgradientOracle& f, std::size_t samples,
                                    std::uint64_t seed, double scale = 10.0, double tol = 1e-9);

/// Same for eps-subgradients emitted at the given eps.
SubgradientReport check_eps_subgradient(const EpsOracle& f, double eps, std::size_t samples,
                                        std::uint64_t seed, double scale = 10.0,
                                        double tol = 1e-9);

}  // namespace fdsm
