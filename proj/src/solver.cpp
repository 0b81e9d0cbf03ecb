#include "fdsm/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace fdsm {

DelaySchedule DelaySchedule::zero() { return {Kind::kZero, 0, {}}; }

DelaySchedule DelaySchedule::fixed(std::size_t tau) { return {Kind::kFixed, tau, {}}; }

DelaySchedule DelaySchedule::cyclic(std::size_t tau) { return {Kind::kCyclic, tau, {}}; }

DelaySchedule DelaySchedule::custom(std::vector<std::size_t> delays) {
  require(!delays.empty(), "DelaySchedule::custom: empty delay list");
  const std::size_t bound = *std::max_element(delays.begin(), delays.end());
  return {Kind::kCustom, bound, std::move(delays)};
}

std::size_t DelaySchedule::at(std::size_t n) const {
  switch (kind_) {
    case Kind::kZero:
      return 0;
    case Kind::kFixed:
      return bound_;
    case Kind::kCyclic:
      return n % (bound_ + 1);
    case Kind::kCustom:
      return values_[n % values_.size()];
  }
  return 0;
}

StepSchedule StepSchedule::harmonic(double a0, double a, std::size_t tau, double coefficient) {
  require(a0 > 0.0, "StepSchedule::harmonic: a0 must be positive");
  require(a > 0.0 && a < 1.0, "StepSchedule::harmonic: a must lie in (0,1)");
  require(coefficient > 0.0, "StepSchedule::harmonic: coefficient must be positive");
  const double t1 = static_cast<double>(tau) + 1.0;
  const double alpha = a0 * std::pow(8.0 / (coefficient + 2.0 * t1 * t1), 1.0 / a);
  return {Kind::kHarmonic, alpha, {}};
}

StepSchedule StepSchedule::inverse(double alpha) {
  require(alpha > 0.0, "StepSchedule::inverse: alpha must be positive");
  return {Kind::kInverse, alpha, {}};
}

StepSchedule StepSchedule::custom(std::vector<double> steps) {
  require(!steps.empty(), "StepSchedule::custom: empty step list");
  for (double s : steps) require(s > 0.0, "StepSchedule::custom: steps must be positive");
  const double first = steps.front();
  return {Kind::kCustom, first, std::move(steps)};
}

double StepSchedule::at(std::size_t n) const {
  if (kind_ == Kind::kCustom) return values_[std::min(n, values_.size() - 1)];
  return alpha_ / (static_cast<double>(n) + 1.0);
}

EpsSchedule EpsSchedule::harmonic(double eps0) {
  require(eps0 >= 0.0, "EpsSchedule::harmonic: eps0 must be non-negative");
  return EpsSchedule([eps0](std::size_t n) { return eps0 / (static_cast<double>(n) + 1.0); });
}

EpsSchedule EpsSchedule::custom(std::function<double(std::size_t)> fn) {
  require(fn != nullptr, "EpsSchedule::custom: empty function");
  return EpsSchedule(std::move(fn));
}

double EpsSchedule::at(std::size_t n) const {
  const double e = fn_(n);
  require(e >= 0.0, "EpsSchedule: eps_n must be non-negative");
  return e;
}

namespace {

struct Direction {
  Vector g;
  double eps = 0.0;
  double shrink = 0.0;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void validate_run(const FneOperator& op, std::size_t f_dim, ConstView x0, const RunOptions& options) {
  require_dim(op.dim(), x0.size(), "run: operator");
  require_dim(f_dim, x0.size(), "run: objective");
  require(options.stop.max_iters.has_value() || options.stop.max_seconds.has_value(),
          "run: stop rule needs max_iters or max_seconds");
  if (options.guard) {
    require(options.delays.bound() == 0,
            "run: the guarded (projected) recursion is undelayed; use a zero delay schedule");
    require_dim(options.guard->center.size(), x0.size(), "run: guard center");
    require(options.guard->radius > 0.0, "run: guard radius must be positive");
  }
}

// Shared driver. `direction(k, Tx_k)` returns the (eps-)subgradient used for
// history index k, where Tx_k = T x_k.
template <class DirectionFn>
RunResult drive(const FneOperator& op, const SubgradientOracle& f, ConstView x0,
                const RunOptions& options, DirectionFn&& direction) {
  validate_run(op, f.dim(), x0, options);
  const std::size_t d = x0.size();
  const auto start = Clock::now();

  RunResult result;
  RunTrace& trace = result.trace;
  HistoryBuffer<Direction> history(options.delays.bound(), Vector(x0.begin(), x0.end()));
  if (options.record_iterates) trace.iterates.emplace_back(x0.begin(), x0.end());

  Vector x(x0.begin(), x0.end());
  Vector tx(d), next(d);
  double best = std::numeric_limits<double>::infinity();
  double c_hat = 0.0;
  double m_hat = norm(x);

  for (std::size_t n = 0;; ++n) {
    if (options.stop.max_iters && n >= *options.stop.max_iters) {
      trace.status = StopReason::kMaxIters;
      break;
    }
    if (options.stop.max_seconds && seconds_since(start) >= *options.stop.max_seconds) {
      trace.status = StopReason::kMaxSeconds;
      break;
    }
    try {
      const double alpha = options.steps.at(n);
      op.apply_into(x, tx);
      const std::size_t tau_n = options.guard ? 0 : options.delays.at(n);
      const std::size_t k = HistoryBuffer<Direction>::resolve(n, tau_n);
      const Direction& dir = history.payload(k, [&] {
        if (k == n) return direction(k, ConstView(tx));
        const Vector txk = op.apply(history.iterate(k));
        return direction(k, ConstView(txk));
      });
      for (std::size_t i = 0; i < d; ++i) next[i] = tx[i] - alpha * dir.g[i];
      if (options.guard) next = project_ball(next, options.guard->center, options.guard->radius);

      IterationRecord rec;
      rec.n = n;
      rec.alpha = alpha;
      rec.tau = tau_n;
      rec.f_next = f.value(next);
      best = std::min(best, rec.f_next);
      rec.best_f = best;
      rec.residual = dist(tx, x);
      rec.step_norm = dist(next, x);
      c_hat = std::max(c_hat, norm(dir.g));
      rec.c_hat = c_hat;
      m_hat = std::max(m_hat, norm(next));
      rec.m_hat = m_hat;
      rec.oracle_calls = history.oracle_calls();
      rec.eps = dir.eps;
      rec.shrink = dir.shrink;
      rec.elapsed_s = seconds_since(start);
      trace.records.push_back(rec);

      x = next;
      history.push(x);
      if (options.record_iterates) trace.iterates.push_back(x);
    } catch (const SolverError&) {
      throw;
    } catch (const std::exception& e) {
      throw SolverError(n, e.what());
    }
  }
  result.final = std::move(x);
  return result;
}

}  // namespace

RunResult run_fdsm(const FneOperator& op, const SubgradientOracle& f, ConstView x0,
                   const RunOptions& options) {
  return drive(op, f, x0, options, [&](std::size_t, ConstView point) {
    return Direction{f.subgradient(point), 0.0, 0.0};
  });
}

RunResult run_inexact(const FneOperator& op, const EpsOracle& f, const EpsSchedule& eps,
                      ConstView x0, const RunOptions& options, std::uint64_t seed) {
  return drive(op, f.base(), x0, options, [&](std::size_t k, ConstView point) {
    auto eg = f.subgradient(point, eps.at(k), seed + k);
    return Direction{std::move(eg.g), eg.eps, eg.shrink};
  });
}

void check_step_hypothesis(double alpha0, double a, std::size_t tau, double coefficient) {
  require(a > 0.0 && a < 1.0, "step hypothesis: a must lie in (0,1)");
  const double t1 = static_cast<double>(tau) + 1.0;
  const double product = (coefficient + 2.0 * t1 * t1) * std::pow(alpha0, a);
  if (!(product < 8.0)) {
    std::ostringstream msg;
    msg << "step hypothesis violated: (" << coefficient << " + 2(" << tau
        << "+1)^2) * alpha_0^a = " << product << " is not < 8";
    throw HypothesisError(msg.str());
  }
}

std::vector<double> rate_bound_curve(double dist0_sq, double c, const StepSchedule& steps,
                                     std::size_t tau, double a, std::size_t n_max) {
  require(dist0_sq >= 0.0 && c >= 0.0, "rate_bound: dist0_sq and C must be non-negative");
  check_step_hypothesis(steps.at(0), a, tau);
  std::vector<double> curve;
  curve.reserve(n_max + 1);
  double s1 = 0.0, s2 = 0.0, s2a = 0.0;
  const double c2 = c * c;
  for (std::size_t n = 0; n <= n_max; ++n) {
    const double alpha = steps.at(n);
    s1 += alpha;
    s2 += alpha * alpha;
    s2a += std::pow(alpha, 2.0 - a);
    curve.push_back((dist0_sq + 2.0 * c2 * s2 + 40.0 * c2 * s2a) / (2.0 * s1));
  }
  return curve;
}

double rate_bound(double dist0_sq, double c, const StepSchedule& steps, std::size_t tau, double a,
                  std::size_t n_max) {
  return rate_bound_curve(dist0_sq, c, steps, tau, a, n_max).back();
}

double log_rate_bound(double dist0_sq, double c, double alpha, double a, std::size_t tau,
                      std::size_t n) {
  require(a > 0.0, "log_rate_bound: a must be positive");
  require(a < 1.0, "log_rate_bound: a must be < 1 ((2-a)/(1-a) is undefined at a = 1)");
  require(alpha > 0.0, "log_rate_bound: alpha must be positive");
  check_step_hypothesis(alpha, a, tau);
  const double c2 = c * c;
  const double numer =
      dist0_sq + 4.0 * c2 * alpha * alpha + 40.0 * c2 * std::pow(alpha, 2.0 - a) * (2.0 - a) / (1.0 - a);
  return numer / (2.0 * alpha) / std::log(static_cast<double>(n) + 2.0);
}

CertificateReport check_certificate(const FneOperator& op, const SubgradientOracle& f,
                                    const RunTrace& trace, ConstView x_star, double c_hat,
                                    double tol) {
  require(trace.iterates.size() == trace.records.size() + 1,
          "check_certificate: trace lacks recorded iterates");
  CertificateReport report;
  report.max_excess = -std::numeric_limits<double>::infinity();
  const double f_star = f.value(x_star);
  for (const auto& rec : trace.records) {
    const std::size_t n = rec.n;
    const auto& xn = trace.iterates[n];
    const auto& xn1 = trace.iterates[n + 1];
    const auto& xd = trace.iterates[HistoryBuffer<int>::resolve(n, rec.tau)];
    const double step = dist(xn1, xn);
    const double lhs = dist_sq(xn1, x_star);
    const double rhs = dist_sq(xn, x_star) - step * step + 2.0 * rec.alpha * c_hat * dist(xd, xn) +
                       2.0 * rec.alpha * c_hat * step +
                       2.0 * rec.alpha * (f_star - f.value(op.apply(xd))) + 2.0 * rec.alpha * rec.eps;
    const double excess = lhs - rhs;
    report.max_excess = std::max(report.max_excess, excess);
    if (excess > tol) report.violations.push_back(n);
  }
  return report;
}

}  // namespace fdsm
