#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "fdsm/transforms.hpp"
#include "fdsm/vector.hpp"

namespace fdsm {

/// A map T : R^d -> R^d, expected to be firmly nonexpansive:
/// <Tx - Ty, x - y> >= ||Tx - Ty||^2.
class FneOperator {
 public:
  virtual ~FneOperator() = default;
  virtual std::size_t dim() const = 0;
  virtual void apply_into(ConstView x, std::span<double> out) const = 0;

  Vector apply(ConstView x) const;
  /// ||Tx - x||
  double residual(ConstView x) const;
};

using FneOperatorPtr = std::shared_ptr<const FneOperator>;

// Metric projections.
Vector project_box(ConstView x, ConstView lo, ConstView hi);
Vector project_ball(ConstView x, ConstView center, double radius);
Vector project_halfspace(ConstView x, ConstView a, double beta);

FneOperatorPtr identity_operator(std::size_t dim);
FneOperatorPtr box_projection(Vector lo, Vector hi);
FneOperatorPtr ball_projection(Vector center, double radius);
FneOperatorPtr halfspace_projection(Vector a, double beta);

/// Wraps an arbitrary callable. No firm nonexpansiveness is implied; used for
/// negative controls and ad-hoc experiments.
FneOperatorPtr function_operator(std::size_t dim, std::function<Vector(ConstView)> fn);

/// x -> x - (1/norm_sq) B^T (B x - b).
class LandweberOperator final : public FneOperator {
 public:
  LandweberOperator(LinearMapPtr map, Vector target, double norm_sq);

  std::size_t dim() const override { return target_.size(); }
  void apply_into(ConstView x, std::span<double> out) const override;

  const LinearMap& map() const { return *map_; }
  const Vector& target() const { return target_; }
  double norm_sq() const { return norm_sq_; }

 private:
  LinearMapPtr map_;
  Vector target_;
  double norm_sq_;
};

/// Landweber operator for B x = b. ||B|| is exact (max |entry|) for diagonal
/// maps and estimated with `op_norm` otherwise. Throws InputError if B is zero.
std::shared_ptr<const LandweberOperator> make_landweber(LinearMapPtr map, Vector target);

/// x -> (1/m) sum_j T_j x, summed in member order.
class AveragedOperator final : public FneOperator {
 public:
  explicit AveragedOperator(std::vector<FneOperatorPtr> members);

  std::size_t dim() const override { return members_.front()->dim(); }
  void apply_into(ConstView x, std::span<double> out) const override;

  const std::vector<FneOperatorPtr>& members() const { return members_; }

 private:
  std::vector<FneOperatorPtr> members_;
};

std::shared_ptr<const AveragedOperator> average_ops(std::vector<FneOperatorPtr> ops);

struct FneReport {
  double min_slack = 0.0;       ///< min over pairs of <Tx-Ty,x-y> - ||Tx-Ty||^2
  double max_expansion = 0.0;   ///< max over pairs of ||Tx-Ty|| - ||x-y||
  bool pass = false;            ///< min_slack >= -1e-10
};

/// Seeded sampling of pairs componentwise uniform on [-10, 10].
FneReport check_fne(const FneOperator& op, std::size_t samples, std::uint64_t seed);

struct OpNormResult {
  double norm = 0.0;  ///< estimate times the (1 + 1e-6) safeguard
  std::size_t iterations = 0;
  bool converged = false;
};

inline constexpr double kOpNormSafeguard = 1.0 + 1e-6;

/// Power iteration on B^T B from a seeded random start. On non-convergence the
/// current estimate is returned with `converged == false`.
OpNormResult op_norm(const LinearMap& map, double tol = 1e-12, std::size_t max_iter = 10000,
                     std::uint64_t seed = 0x5eed);

}  // namespace fdsm
