#include "fdsm/operators.hpp"

#include <algorithm>
#include <limits>
#include <random>

namespace fdsm {

Vector FneOperator::apply(ConstView x) const {
  require_dim(x.size(), dim(), "FneOperator::apply");
  Vector out(dim());
  apply_into(x, out);
  return out;
}

double FneOperator::residual(ConstView x) const { return dist(apply(x), x); }

Vector project_box(ConstView x, ConstView lo, ConstView hi) {
  require_dim(lo.size(), x.size(), "project_box");
  require_dim(hi.size(), x.size(), "project_box");
  Vector r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(lo[i] <= hi[i], "project_box: lo must not exceed hi");
    r[i] = std::clamp(x[i], lo[i], hi[i]);
  }
  return r;
}

Vector project_ball(ConstView x, ConstView center, double radius) {
  require_dim(center.size(), x.size(), "project_ball");
  require(radius > 0.0, "project_ball: radius must be positive");
  const double d = dist(x, center);
  if (d <= radius) return Vector(x.begin(), x.end());
  Vector r(x.size());
  const double s = radius / d;
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = center[i] + s * (x[i] - center[i]);
  return r;
}

Vector project_halfspace(ConstView x, ConstView a, double beta) {
  require_dim(a.size(), x.size(), "project_halfspace");
  const double aa = norm_sq(a);
  require(aa > 0.0, "project_halfspace: normal vector must be non-zero");
  const double excess = dot(a, x) - beta;
  Vector r(x.begin(), x.end());
  if (excess <= 0.0) return r;
  axpy(-excess / aa, a, r);
  return r;
}

namespace {

class FunctionOperator final : public FneOperator {
 public:
  FunctionOperator(std::size_t dim, std::function<Vector(ConstView)> fn)
      : dim_(dim), fn_(std::move(fn)) {}

  std::size_t dim() const override { return dim_; }
  void apply_into(ConstView x, std::span<double> out) const override {
    const Vector r = fn_(x);
    require_dim(r.size(), dim_, "function_operator");
    std::copy(r.begin(), r.end(), out.begin());
  }

 private:
  std::size_t dim_;
  std::function<Vector(ConstView)> fn_;
};

class IdentityOperator final : public FneOperator {
 public:
  explicit IdentityOperator(std::size_t dim) : dim_(dim) {}
  std::size_t dim() const override { return dim_; }
  void apply_into(ConstView x, std::span<double> out) const override {
    std::copy(x.begin(), x.end(), out.begin());
  }

 private:
  std::size_t dim_;
};

class BoxProjection final : public FneOperator {
 public:
  BoxProjection(Vector lo, Vector hi) : lo_(std::move(lo)), hi_(std::move(hi)) {}
  std::size_t dim() const override { return lo_.size(); }
  void apply_into(ConstView x, std::span<double> out) const override {
    for (std::size_t i = 0; i < lo_.size(); ++i) out[i] = std::clamp(x[i], lo_[i], hi_[i]);
  }

 private:
  Vector lo_, hi_;
};

class BallProjection final : public FneOperator {
 public:
  BallProjection(Vector center, double radius) : center_(std::move(center)), radius_(radius) {}
  std::size_t dim() const override { return center_.size(); }
  void apply_into(ConstView x, std::span<double> out) const override {
    const Vector r = project_ball(x, center_, radius_);
    std::copy(r.begin(), r.end(), out.begin());
  }

 private:
  Vector center_;
  double radius_;
};

class HalfspaceProjection final : public FneOperator {
 public:
  HalfspaceProjection(Vector a, double beta) : a_(std::move(a)), beta_(beta) {}
  std::size_t dim() const override { return a_.size(); }
  void apply_into(ConstView x, std::span<double> out) const override {
    const Vector r = project_halfspace(x, a_, beta_);
    std::copy(r.begin(), r.end(), out.begin());
  }

 private:
  Vector a_;
  double beta_;
};

}  // namespace

FneOperatorPtr identity_operator(std::size_t dim) {
  require(dim >= 1, "identity_operator: dim must be positive");
  return std::make_shared<IdentityOperator>(dim);
}

FneOperatorPtr box_projection(Vector lo, Vector hi) {
  require(!lo.empty(), "box_projection: empty box");
  require_dim(hi.size(), lo.size(), "box_projection");
  for (std::size_t i = 0; i < lo.size(); ++i) {
    require(lo[i] <= hi[i], "box_projection: lo must not exceed hi");
  }
  return std::make_shared<BoxProjection>(std::move(lo), std::move(hi));
}

FneOperatorPtr ball_projection(Vector center, double radius) {
  require(!center.empty(), "ball_projection: empty center");
  require(radius > 0.0, "ball_projection: radius must be positive");
  return std::make_shared<BallProjection>(std::move(center), radius);
}

FneOperatorPtr halfspace_projection(Vector a, double beta) {
  require(!a.empty() && norm_sq(a) > 0.0, "halfspace_projection: normal vector must be non-zero");
  return std::make_shared<HalfspaceProjection>(std::move(a), beta);
}

FneOperatorPtr function_operator(std::size_t dim, std::function<Vector(ConstView)> fn) {
  require(dim >= 1 && fn != nullptr, "function_operator: invalid arguments");
  return std::make_shared<FunctionOperator>(dim, std::move(fn));
}

LandweberOperator::LandweberOperator(LinearMapPtr map, Vector target, double norm_sq)
    : map_(std::move(map)), target_(std::move(target)), norm_sq_(norm_sq) {}

void LandweberOperator::apply_into(ConstView x, std::span<double> out) const {
  Vector residual = map_->apply(x);
  for (std::size_t i = 0; i < residual.size(); ++i) residual[i] -= target_[i];
  const Vector back = map_->adjoint(residual);
  const double step = 1.0 / norm_sq_;
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - step * back[i];
}

std::shared_ptr<const LandweberOperator> make_landweber(LinearMapPtr map, Vector target) {
  require(map != nullptr, "make_landweber: null map");
  require(map->in_dim() == map->out_dim(), "make_landweber: map must be square");
  require_dim(target.size(), map->out_dim(), "make_landweber");
  double op = 0.0;
  if (auto diag = map->diagonal()) {
    for (double v : *diag) op = std::max(op, std::abs(v));
  } else {
    op = op_norm(*map).norm;
  }
  if (!(op > 0.0)) throw InputError("make_landweber: B is the zero map, ||B||^2 = 0");
  return std::make_shared<LandweberOperator>(std::move(map), std::move(target), op * op);
}

AveragedOperator::AveragedOperator(std::vector<FneOperatorPtr> members)
    : members_(std::move(members)) {}

void AveragedOperator::apply_into(ConstView x, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  Vector part(dim());
  for (const auto& op : members_) {
    op->apply_into(x, part);
    for (std::size_t i = 0; i < part.size(); ++i) out[i] += part[i];
  }
  const double inv = 1.0 / static_cast<double>(members_.size());
  for (auto& v : out) v *= inv;
}

std::shared_ptr<const AveragedOperator> average_ops(std::vector<FneOperatorPtr> ops) {
  require(!ops.empty(), "average_ops: empty operator list");
  for (const auto& op : ops) {
    require(op != nullptr, "average_ops: null operator");
    require_dim(op->dim(), ops.front()->dim(), "average_ops");
  }
  return std::make_shared<AveragedOperator>(std::move(ops));
}

FneReport check_fne(const FneOperator& op, std::size_t samples, std::uint64_t seed) {
  require(samples >= 1, "check_fne: samples must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-10.0, 10.0);
  const std::size_t d = op.dim();
  Vector x(d), y(d), tx(d), ty(d);
  FneReport report;
  report.min_slack = std::numeric_limits<double>::infinity();
  report.max_expansion = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < samples; ++s) {
    for (auto& v : x) v = unif(rng);
    for (auto& v : y) v = unif(rng);
    op.apply_into(x, tx);
    op.apply_into(y, ty);
    double inner = 0.0, img_sq = 0.0, dom_sq = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double dt = tx[i] - ty[i];
      const double dx = x[i] - y[i];
      inner += dt * dx;
      img_sq += dt * dt;
      dom_sq += dx * dx;
    }
    report.min_slack = std::min(report.min_slack, inner - img_sq);
    report.max_expansion = std::max(report.max_expansion, std::sqrt(img_sq) - std::sqrt(dom_sq));
  }
  report.pass = report.min_slack >= -1e-10;
  return report;
}

OpNormResult op_norm(const LinearMap& map, double tol, std::size_t max_iter, std::uint64_t seed) {
  require(tol > 0.0 && max_iter >= 1, "op_norm: tol and max_iter must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Vector v(map.in_dim());
  for (auto& e : v) e = gauss(rng);
  double nv = norm(v);
  require(nv > 0.0, "op_norm: degenerate start vector");
  for (auto& e : v) e /= nv;

  OpNormResult result;
  double lambda = 0.0;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    Vector w = map.adjoint(map.apply(v));
    const double nw = norm(w);
    result.iterations = it;
    if (nw == 0.0) {
      // v lies in the kernel; B^T B v = 0 cannot identify the spectrum from here.
      throw InputError("op_norm: power iteration collapsed (zero map?)");
    }
    const double next = nw;  // ||B^T B v|| with ||v|| = 1 -> dominant eigenvalue
    for (std::size_t i = 0; i < w.size(); ++i) v[i] = w[i] / nw;
    const bool close = std::abs(next - lambda) <= tol * next;
    lambda = next;
    if (close) {
      result.converged = true;
      break;
    }
  }
  result.norm = std::sqrt(lambda) * kOpNormSafeguard;
  return result;
}

}  // namespace fdsm
