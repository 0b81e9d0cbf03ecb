#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "fdsm/vector.hpp"

namespace fdsm {

/// A real linear map R^in_dim -> R^out_dim with an exact adjoint.
///
/// Implementations are immutable after construction and may be shared
/// across threads. The virtual `*_into` methods write into caller-owned
/// buffers; `apply` / `adjoint` are the checked allocating wrappers.
class LinearMap {
 public:
  virtual ~LinearMap() = default;

  virtual std::size_t in_dim() const = 0;
  virtual std::size_t out_dim() const = 0;

  virtual void apply_into(ConstView x, std::span<double> y) const = 0;
  virtual void adjoint_into(ConstView y, std::span<double> x) const = 0;

  /// Diagonal entries when the map is a square diagonal matrix.
  virtual std::optional<Vector> diagonal() const { return std::nullopt; }

  Vector apply(ConstView x) const;
  Vector adjoint(ConstView y) const;
};

using LinearMapPtr = std::shared_ptr<const LinearMap>;

/// Row-major dense matrix; only used for small materializations.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Vector data;

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

LinearMapPtr identity_map(std::size_t dim);
LinearMapPtr diagonal_map(Vector entries);
LinearMapPtr dense_map(DenseMatrix matrix);

/// (Rx)_{i,j} = x_{i+1,j} - x_{i,j}, zero on the last row. Row-major h x w grid.
LinearMapPtr row_diff(std::size_t h, std::size_t w);

/// (Cx)_{i,j} = x_{i,j+1} - x_{i,j}, zero on the last column.
LinearMapPtr col_diff(std::size_t h, std::size_t w);

/// Two-sided orthonormal Haar transform X -> Q X Q^T on an n x n grid, where
/// Q = W_{n,levels} ... W_{n,2} W_{n,1} and W_{n,k} applies the averaging /
/// differencing block of size n / 2^(k-1) to the leading coordinates.
/// Requires n = 2^p, p >= 1, and 1 <= levels <= p.
LinearMapPtr haar(std::size_t n, std::size_t levels);

/// The one-sided product matrix Q used by `haar`, materialized densely.
DenseMatrix haar_matrix(std::size_t n, std::size_t levels);

/// Concatenation of member outputs; all members share in_dim.
LinearMapPtr stack(std::vector<LinearMapPtr> maps);

/// Anisotropic TV dictionary L = stack(R, C).
LinearMapPtr tv_map(std::size_t h, std::size_t w);

/// Materialize `map` column by column. Rejects maps with more than
/// 4096 x 4096 entries.
DenseMatrix to_dense(const LinearMap& map);

DenseMatrix transpose(const DenseMatrix& m);

struct AdjointReport {
  double max_abs_error = 0.0;
  /// |<Ax,y> - <x,A^T y>| / max(1, ||Ax|| ||y||)
  double max_rel_error = 0.0;
  bool pass = false;
};

/// Samples `samples` seeded (x, y) pairs uniform on [-1,1] and compares
/// <Ax, y> with <x, A^T y>.
AdjointReport check_adjoint(const LinearMap& map, std::size_t samples, std::uint64_t seed,
                            double tol = 1e-10);

}  // namespace fdsm
