#include "fdsm/transforms.hpp"

#include <algorithm>
#include <bit>
#include <random>

namespace fdsm {

Vector LinearMap::apply(ConstView x) const {
  require_dim(x.size(), in_dim(), "LinearMap::apply");
  Vector y(out_dim());
  apply_into(x, y);
  return y;
}

Vector LinearMap::adjoint(ConstView y) const {
  require_dim(y.size(), out_dim(), "LinearMap::adjoint");
  Vector x(in_dim());
  adjoint_into(y, x);
  return x;
}

namespace {

class DiagonalMap final : public LinearMap {
 public:
  explicit DiagonalMap(Vector entries) : entries_(std::move(entries)) {}

  std::size_t in_dim() const override { return entries_.size(); }
  std::size_t out_dim() const override { return entries_.size(); }

  void apply_into(ConstView x, std::span<double> y) const override {
    for (std::size_t i = 0; i < entries_.size(); ++i) y[i] = entries_[i] * x[i];
  }
  void adjoint_into(ConstView y, std::span<double> x) const override { apply_into(y, x); }

  std::optional<Vector> diagonal() const override { return entries_; }

 private:
  Vector entries_;
};

class DenseMap final : public LinearMap {
 public:
  explicit DenseMap(DenseMatrix m) : m_(std::move(m)) {}

  std::size_t in_dim() const override { return m_.cols; }
  std::size_t out_dim() const override { return m_.rows; }

  void apply_into(ConstView x, std::span<double> y) const override {
    for (std::size_t r = 0; r < m_.rows; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < m_.cols; ++c) s += m_(r, c) * x[c];
      y[r] = s;
    }
  }
  void adjoint_into(ConstView y, std::span<double> x) const override {
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t r = 0; r < m_.rows; ++r) {
      for (std::size_t c = 0; c < m_.cols; ++c) x[c] += m_(r, c) * y[r];
    }
  }

 private:
  DenseMatrix m_;
};

class RowDiff final : public LinearMap {
 public:
  RowDiff(std::size_t h, std::size_t w) : h_(h), w_(w) {}

  std::size_t in_dim() const override { return h_ * w_; }
  std::size_t out_dim() const override { return h_ * w_; }

  void apply_into(ConstView x, std::span<double> y) const override {
    for (std::size_t i = 0; i + 1 < h_; ++i) {
      for (std::size_t j = 0; j < w_; ++j) y[i * w_ + j] = x[(i + 1) * w_ + j] - x[i * w_ + j];
    }
    std::fill(y.begin() + static_cast<std::ptrdiff_t>((h_ - 1) * w_), y.end(), 0.0);
  }

  void adjoint_into(ConstView y, std::span<double> x) const override {
    for (std::size_t i = 0; i < h_; ++i) {
      for (std::size_t j = 0; j < w_; ++j) {
        double v = 0.0;
        if (i >= 1) v += y[(i - 1) * w_ + j];
        if (i + 1 < h_) v -= y[i * w_ + j];
        x[i * w_ + j] = v;
      }
    }
  }

 private:
  std::size_t h_, w_;
};

class ColDiff final : public LinearMap {
 public:
  ColDiff(std::size_t h, std::size_t w) : h_(h), w_(w) {}

  std::size_t in_dim() const override { return h_ * w_; }
  std::size_t out_dim() const override { return h_ * w_; }

  void apply_into(ConstView x, std::span<double> y) const override {
    for (std::size_t i = 0; i < h_; ++i) {
      const std::size_t row = i * w_;
      for (std::size_t j = 0; j + 1 < w_; ++j) y[row + j] = x[row + j + 1] - x[row + j];
      y[row + w_ - 1] = 0.0;
    }
  }

  void adjoint_into(ConstView y, std::span<double> x) const override {
    for (std::size_t i = 0; i < h_; ++i) {
      const std::size_t row = i * w_;
      for (std::size_t j = 0; j < w_; ++j) {
        double v = 0.0;
        if (j >= 1) v += y[row + j - 1];
        if (j + 1 < w_) v -= y[row + j];
        x[row + j] = v;
      }
    }
  }

 private:
  std::size_t h_, w_;
};

// One-dimensional Haar analysis / synthesis on a strided line of length n.
// Level k (1-based) acts on the leading n >> (k-1) coordinates: the first
// half receives (v[2i] + v[2i+1]) / sqrt(2), the second (v[2i] - v[2i+1]) / sqrt(2).
class HaarLine {
 public:
  HaarLine(std::size_t n, std::size_t levels) : n_(n), levels_(levels), scratch_(n) {}

  void forward(std::span<double> data, std::size_t offset, std::size_t stride) {
    for (std::size_t k = 0; k < levels_; ++k) {
      const std::size_t len = n_ >> k;
      const std::size_t half = len / 2;
      for (std::size_t i = 0; i < half; ++i) {
        const double a = data[offset + (2 * i) * stride];
        const double b = data[offset + (2 * i + 1) * stride];
        scratch_[i] = (a + b) * kInvSqrt2;
        scratch_[half + i] = (a - b) * kInvSqrt2;
      }
      for (std::size_t i = 0; i < len; ++i) data[offset + i * stride] = scratch_[i];
    }
  }

  void inverse(std::span<double> data, std::size_t offset, std::size_t stride) {
    for (std::size_t k = levels_; k-- > 0;) {
      const std::size_t len = n_ >> k;
      const std::size_t half = len / 2;
      for (std::size_t i = 0; i < half; ++i) {
        const double a = data[offset + i * stride];
        const double d = data[offset + (half + i) * stride];
        scratch_[2 * i] = (a + d) * kInvSqrt2;
        scratch_[2 * i + 1] = (a - d) * kInvSqrt2;
      }
      for (std::size_t i = 0; i < len; ++i) data[offset + i * stride] = scratch_[i];
    }
  }

 private:
  static constexpr double kInvSqrt2 = 0.70710678118654752440;
  std::size_t n_, levels_;
  Vector scratch_;
};

class Haar2D final : public LinearMap {
 public:
  Haar2D(std::size_t n, std::size_t levels) : n_(n), levels_(levels) {}

  std::size_t in_dim() const override { return n_ * n_; }
  std::size_t out_dim() const override { return n_ * n_; }

  // Q X Q^T: transform every column, then every row.
  void apply_into(ConstView x, std::span<double> y) const override {
    std::copy(x.begin(), x.end(), y.begin());
    HaarLine line(n_, levels_);
    for (std::size_t j = 0; j < n_; ++j) line.forward(y, j, n_);
    for (std::size_t i = 0; i < n_; ++i) line.forward(y, i * n_, 1);
  }

  // Q^T Y Q; Q is orthogonal so this is also the inverse.
  void adjoint_into(ConstView y, std::span<double> x) const override {
    std::copy(y.begin(), y.end(), x.begin());
    HaarLine line(n_, levels_);
    for (std::size_t i = 0; i < n_; ++i) line.inverse(x, i * n_, 1);
    for (std::size_t j = 0; j < n_; ++j) line.inverse(x, j, n_);
  }

 private:
  std::size_t n_, levels_;
};

class StackedMap final : public LinearMap {
 public:
  explicit StackedMap(std::vector<LinearMapPtr> maps) : maps_(std::move(maps)) {
    for (const auto& m : maps_) out_dim_ += m->out_dim();
  }

  std::size_t in_dim() const override { return maps_.front()->in_dim(); }
  std::size_t out_dim() const override { return out_dim_; }

  void apply_into(ConstView x, std::span<double> y) const override {
    std::size_t offset = 0;
    for (const auto& m : maps_) {
      m->apply_into(x, y.subspan(offset, m->out_dim()));
      offset += m->out_dim();
    }
  }

  void adjoint_into(ConstView y, std::span<double> x) const override {
    std::fill(x.begin(), x.end(), 0.0);
    Vector part(in_dim());
    std::size_t offset = 0;
    for (const auto& m : maps_) {
      m->adjoint_into(y.subspan(offset, m->out_dim()), part);
      for (std::size_t i = 0; i < part.size(); ++i) x[i] += part[i];
      offset += m->out_dim();
    }
  }

 private:
  std::vector<LinearMapPtr> maps_;
  std::size_t out_dim_ = 0;
};

void check_haar_args(std::size_t n, std::size_t levels) {
  require(n >= 2 && std::has_single_bit(n), "haar: n must be a power of two >= 2");
  const auto p = static_cast<std::size_t>(std::countr_zero(n));
  require(levels >= 1 && levels <= p, "haar: levels must lie in [1, log2(n)]");
}

}  // namespace

LinearMapPtr identity_map(std::size_t dim) {
  require(dim >= 1, "identity_map: dim must be positive");
  return std::make_shared<DiagonalMap>(Vector(dim, 1.0));
}

LinearMapPtr diagonal_map(Vector entries) {
  require(!entries.empty(), "diagonal_map: empty diagonal");
  return std::make_shared<DiagonalMap>(std::move(entries));
}

LinearMapPtr dense_map(DenseMatrix matrix) {
  require(matrix.rows >= 1 && matrix.cols >= 1, "dense_map: empty matrix");
  require_dim(matrix.data.size(), matrix.rows * matrix.cols, "dense_map");
  return std::make_shared<DenseMap>(std::move(matrix));
}

LinearMapPtr row_diff(std::size_t h, std::size_t w) {
  require(h >= 1 && w >= 1, "row_diff: grid must be non-empty");
  return std::make_shared<RowDiff>(h, w);
}

LinearMapPtr col_diff(std::size_t h, std::size_t w) {
  require(h >= 1 && w >= 1, "col_diff: grid must be non-empty");
  return std::make_shared<ColDiff>(h, w);
}

LinearMapPtr haar(std::size_t n, std::size_t levels) {
  check_haar_args(n, levels);
  return std::make_shared<Haar2D>(n, levels);
}

DenseMatrix haar_matrix(std::size_t n, std::size_t levels) {
  check_haar_args(n, levels);
  DenseMatrix q{n, n, Vector(n * n, 0.0)};
  HaarLine line(n, levels);
  Vector e(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::fill(e.begin(), e.end(), 0.0);
    e[c] = 1.0;
    line.forward(e, 0, 1);
    for (std::size_t r = 0; r < n; ++r) q(r, c) = e[r];
  }
  return q;
}

LinearMapPtr stack(std::vector<LinearMapPtr> maps) {
  require(!maps.empty(), "stack: no maps");
  for (const auto& m : maps) {
    require(m != nullptr, "stack: null map");
    require_dim(m->in_dim(), maps.front()->in_dim(), "stack");
  }
  if (maps.size() == 1) return maps.front();
  return std::make_shared<StackedMap>(std::move(maps));
}

LinearMapPtr tv_map(std::size_t h, std::size_t w) { return stack({row_diff(h, w), col_diff(h, w)}); }

DenseMatrix to_dense(const LinearMap& map) {
  require(map.in_dim() <= 4096 && map.out_dim() <= 4096, "to_dense: map too large");
  DenseMatrix m{map.out_dim(), map.in_dim(), Vector(map.out_dim() * map.in_dim(), 0.0)};
  Vector e(map.in_dim(), 0.0);
  Vector col(map.out_dim());
  for (std::size_t c = 0; c < map.in_dim(); ++c) {
    e[c] = 1.0;
    map.apply_into(e, col);
    e[c] = 0.0;
    for (std::size_t r = 0; r < map.out_dim(); ++r) m(r, c) = col[r];
  }
  return m;
}

DenseMatrix transpose(const DenseMatrix& m) {
  DenseMatrix t{m.cols, m.rows, Vector(m.data.size())};
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) t(c, r) = m(r, c);
  }
  return t;
}

AdjointReport check_adjoint(const LinearMap& map, std::size_t samples, std::uint64_t seed,
                            double tol) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Vector x(map.in_dim()), y(map.out_dim()), ax(map.out_dim()), aty(map.in_dim());
  AdjointReport report;
  for (std::size_t s = 0; s < samples; ++s) {
    for (auto& v : x) v = unif(rng);
    for (auto& v : y) v = unif(rng);
    map.apply_into(x, ax);
    map.adjoint_into(y, aty);
    const double err = std::abs(dot(ax, y) - dot(x, aty));
    const double scale = std::max(1.0, norm(ax) * norm(y));
    report.max_abs_error = std::max(report.max_abs_error, err);
    report.max_rel_error = std::max(report.max_rel_error, err / scale);
  }
  report.pass = report.max_rel_error <= tol;
  return report;
}

}  // namespace fdsm
