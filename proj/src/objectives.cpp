#include "fdsm/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace fdsm {

namespace {

class L1Composite final : public SubgradientOracle {
 public:
  L1Composite(LinearMapPtr map, Vector offset) : map_(std::move(map)), offset_(std::move(offset)) {}

  std::size_t dim() const override { return map_->in_dim(); }

  double value(ConstView x) const override { return norm1(residual(x)); }

  Vector subgradient(ConstView x) const override {
    Vector s = residual(x);
    for (auto& v : s) v = (v > 0.0) ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
    return map_->adjoint(s);
  }

 private:
  Vector residual(ConstView x) const {
    require_dim(x.size(), dim(), "l1_composite");
    Vector r = map_->apply(x);
    if (!offset_.empty()) {
      for (std::size_t i = 0; i < r.size(); ++i) r[i] -= offset_[i];
    }
    return r;
  }

  LinearMapPtr map_;
  Vector offset_;
};

class MaxAffine final : public SubgradientOracle {
 public:
  MaxAffine(std::vector<Vector> slopes, Vector intercepts)
      : slopes_(std::move(slopes)), intercepts_(std::move(intercepts)) {}

  std::size_t dim() const override { return slopes_.front().size(); }

  double value(ConstView x) const override {
    const std::size_t i = argmax(x);
    return dot(slopes_[i], x) + intercepts_[i];
  }

  Vector subgradient(ConstView x) const override { return slopes_[argmax(x)]; }

 private:
  std::size_t argmax(ConstView x) const {
    require_dim(x.size(), dim(), "max_affine");
    std::size_t best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < slopes_.size(); ++i) {
      const double v = dot(slopes_[i], x) + intercepts_[i];
      if (v > best_value) {
        best_value = v;
        best = i;
      }
    }
    return best;
  }

  std::vector<Vector> slopes_;
  Vector intercepts_;
};

class ZeroObjective final : public SubgradientOracle {
 public:
  explicit ZeroObjective(std::size_t dim) : dim_(dim) {}
  std::size_t dim() const override { return dim_; }
  double value(ConstView x) const override {
    require_dim(x.size(), dim_, "zero_objective");
    return 0.0;
  }
  Vector subgradient(ConstView x) const override {
    require_dim(x.size(), dim_, "zero_objective");
    return Vector(dim_, 0.0);
  }

 private:
  std::size_t dim_;
};

class AddQuadratic final : public SubgradientOracle {
 public:
  AddQuadratic(OraclePtr base, double mu, Vector center)
      : base_(std::move(base)), mu_(mu), center_(std::move(center)) {}

  std::size_t dim() const override { return base_->dim(); }

  double value(ConstView x) const override {
    return base_->value(x) + 0.5 * mu_ * dist_sq(x, center_);
  }

  Vector subgradient(ConstView x) const override {
    Vector g = base_->subgradient(x);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += mu_ * (x[i] - center_[i]);
    return g;
  }

 private:
  OraclePtr base_;
  double mu_;
  Vector center_;
};

}  // namespace

OraclePtr l1_composite(LinearMapPtr map, Vector offset) {
  require(map != nullptr, "l1_composite: null map");
  if (!offset.empty()) require_dim(offset.size(), map->out_dim(), "l1_composite offset");
  return std::make_shared<L1Composite>(std::move(map), std::move(offset));
}

OraclePtr l1_distance(Vector center) {
  require(!center.empty(), "l1_distance: empty center");
  auto id = identity_map(center.size());
  return l1_composite(std::move(id), std::move(center));
}

OraclePtr max_affine(std::vector<Vector> slopes, Vector intercepts) {
  require(!slopes.empty(), "max_affine: no pieces");
  require_dim(intercepts.size(), slopes.size(), "max_affine intercepts");
  require(!slopes.front().empty(), "max_affine: zero-dimensional slopes");
  for (const auto& c : slopes) require_dim(c.size(), slopes.front().size(), "max_affine slopes");
  return std::make_shared<MaxAffine>(std::move(slopes), std::move(intercepts));
}

OraclePtr zero_objective(std::size_t dim) {
  require(dim >= 1, "zero_objective: dim must be positive");
  return std::make_shared<ZeroObjective>(dim);
}

OraclePtr add_quadratic(OraclePtr base, double mu, Vector center) {
  require(base != nullptr, "add_quadratic: null base");
  require(mu > 0.0, "add_quadratic: mu must be positive");
  require_dim(center.size(), base->dim(), "add_quadratic center");
  return std::make_shared<AddQuadratic>(std::move(base), mu, std::move(center));
}

SumOracle::SumOracle(std::vector<OraclePtr> terms) : terms_(std::move(terms)) {}

double SumOracle::value(ConstView x) const {
  double s = 0.0;
  for (const auto& t : terms_) s += t->value(x);
  return s;
}

Vector SumOracle::subgradient(ConstView x) const {
  Vector g(dim(), 0.0);
  for (const auto& t : terms_) {
    const Vector gt = t->subgradient(x);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += gt[i];
  }
  return g;
}

std::shared_ptr<const SumOracle> sum_oracle(std::vector<OraclePtr> terms) {
  require(!terms.empty(), "sum_oracle: no terms");
  for (const auto& t : terms) {
    require(t != nullptr, "sum_oracle: null term");
    require_dim(t->dim(), terms.front()->dim(), "sum_oracle");
  }
  return std::make_shared<SumOracle>(std::move(terms));
}

EpsOracle::EpsOracle(OraclePtr base, EpsMode mode) : base_(std::move(base)), mode_(mode) {
  require(base_ != nullptr, "EpsOracle: null base oracle");
}

namespace {

std::vector<Vector> validation_points(ConstView x, ConstView g, std::uint64_t seed) {
  constexpr std::size_t kBlock = EpsOracle::kValidationPoints / 4;
  const double scale = 1.0 + norm(x);
  const double gn = norm(g);
  std::vector<Vector> points;
  points.reserve(EpsOracle::kValidationPoints);

  for (std::size_t k = 0; k < kBlock; ++k) {
    const double r = scale * std::pow(10.0, -4.0 + 8.0 * static_cast<double>(k) / (kBlock - 1));
    Vector y(x.begin(), x.end());
    axpy(-r / gn, g, y);
    points.push_back(std::move(y));
  }
  for (std::size_t k = 0; k < kBlock; ++k) {
    const double lambda = -1.0 + 3.0 * static_cast<double>(k) / (kBlock - 1);
    points.push_back(scaled(x, lambda));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> expo(-4.0, 4.0);
  Vector u(x.size());
  while (points.size() < EpsOracle::kValidationPoints) {
    for (auto& v : u) v = gauss(rng);
    const double un = norm(u);
    if (un == 0.0) continue;
    const double r = scale * std::pow(10.0, expo(rng));
    Vector y(x.begin(), x.end());
    axpy(r / un, u, y);
    points.push_back(std::move(y));
  }
  return points;
}

}  // namespace

EpsSubgradient EpsOracle::subgradient(ConstView x, double eps, std::uint64_t seed) const {
  require(eps >= 0.0, "EpsOracle: eps must be non-negative");
  EpsSubgradient out;
  out.g = base_->subgradient(x);
  out.eps = eps;
  if (eps == 0.0 || mode_ == EpsMode::kOffset || norm(out.g) == 0.0) return out;

  const double fx = base_->value(x);
  const auto points = validation_points(x, out.g, seed);
  Vector fy(points.size());
  Vector gy(points.size());  // <g, y - x>
  for (std::size_t k = 0; k < points.size(); ++k) {
    fy[k] = base_->value(points[k]);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += out.g[i] * (points[k][i] - x[i]);
    gy[k] = s;
  }
  auto valid = [&](double t) {
    for (std::size_t k = 0; k < points.size(); ++k) {
      if ((1.0 - t) * gy[k] > fy[k] - fx + eps) return false;
    }
    return true;
  };

  double t = 1.0;
  for (int rung = 0; rung <= 40 && !valid(t); ++rung) t *= 0.5;
  t = valid(t) ? 0.5 * t : 0.0;
  for (auto& v : out.g) v *= (1.0 - t);
  out.shrink = t;
  out.validated_points = points.size();
  return out;
}

EpsOracle make_eps_oracle(OraclePtr base, EpsMode mode) { return EpsOracle(std::move(base), mode); }

SubgradientReport check_subgradient(const SubgradientOracle& f, std::size_t samples,
                                    std::uint64_t seed, double scale, double tol) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-scale, scale);
  Vector x(f.dim()), y(f.dim());
  SubgradientReport report;
  report.min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < samples; ++s) {
    for (auto& v : x) v = unif(rng);
    for (auto& v : y) v = unif(rng);
    const Vector g = f.subgradient(x);
    const double slack = f.value(y) - f.value(x) - dot(g, sub(y, x));
    report.min_slack = std::min(report.min_slack, slack);
  }
  report.pass = report.min_slack >= -tol;
  return report;
}

SubgradientReport check_eps_subgradient(const EpsOracle& f, double eps, std::size_t samples,
                                        std::uint64_t seed, double scale, double tol) {
  const auto& base = f.base();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-scale, scale);
  Vector x(base.dim()), y(base.dim());
  SubgradientReport report;
  report.min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < samples; ++s) {
    for (auto& v : x) v = unif(rng);
    for (auto& v : y) v = unif(rng);
    const auto eg = f.subgradient(x, eps, rng());
    const double slack = base.value(y) - base.value(x) - dot(eg.g, sub(y, x)) + eps;
    report.min_slack = std::min(report.min_slack, slack);
  }
  report.pass = report.min_slack >= -tol;
  return report;
}

}  // namespace fdsm
