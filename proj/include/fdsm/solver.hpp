#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdsm/objectives.hpp"
#include "fdsm/operators.hpp"
#include "fdsm/vector.hpp"

namespace fdsm {

/// Delay sequence tau_n with 0 <= tau_n <= bound().
class DelaySchedule {
 public:
  enum class Kind { kZero, kFixed, kCyclic, kCustom };

  static DelaySchedule zero();
  /// tau_n = tau for every n.
  static DelaySchedule fixed(std::size_t tau);
  /// tau_n = n mod (tau + 1): the subgradient is refreshed every tau + 1 steps.
  static DelaySchedule cyclic(std::size_t tau);
  /// tau_n = delays[n mod delays.size()].
  static DelaySchedule custom(std::vector<std::size_t> delays);

  std::size_t at(std::size_t n) const;
  std::size_t bound() const { return bound_; }
  Kind kind() const { return kind_; }

 private:
  DelaySchedule(Kind kind, std::size_t bound, std::vector<std::size_t> values)
      : kind_(kind), bound_(bound), values_(std::move(values)) {}

  Kind kind_;
  std::size_t bound_;
  std::vector<std::size_t> values_;
};

/// Step sizes alpha_n > 0.
class StepSchedule {
 public:
  enum class Kind { kHarmonic, kInverse, kCustom };

  /// alpha_n = (a0 / (n+1)) * (8 / (c + 2 (tau+1)^2))^(1/a), with c = 3 for the
  /// single-agent method. With c = 4 the same schedule meets the distributed
  /// hypothesis (4 + 2(tau+1)^2) alpha_0^a = 8 a0^a.
  static StepSchedule harmonic(double a0, double a, std::size_t tau, double coefficient = 3.0);
  /// alpha_n = alpha / (n+1).
  static StepSchedule inverse(double alpha);
  /// alpha_n = steps[min(n, size-1)].
  static StepSchedule custom(std::vector<double> steps);

  double at(std::size_t n) const;
  Kind kind() const { return kind_; }

  /// Leading constant: alpha_0 for harmonic/inverse schedules.
  double alpha() const { return alpha_; }

 private:
  StepSchedule(Kind kind, double alpha, std::vector<double> values)
      : kind_(kind), alpha_(alpha), values_(std::move(values)) {}

  Kind kind_;
  double alpha_;
  std::vector<double> values_;
};

/// eps_n for the inexact method.
class EpsSchedule {
 public:
  /// eps_n = eps0 / (n+1).
  static EpsSchedule harmonic(double eps0);
  static EpsSchedule custom(std::function<double(std::size_t)> fn);

  double at(std::size_t n) const;

 private:
  explicit EpsSchedule(std::function<double(std::size_t)> fn) : fn_(std::move(fn)) {}
  std::function<double(std::size_t)> fn_;
};

struct StopRule {
  std::optional<std::size_t> max_iters;
  std::optional<double> max_seconds;
};

struct BallGuard {
  Vector center;
  double radius = 0.0;
};

struct IterationRecord {
  std::size_t n = 0;
  double alpha = 0.0;
  std::size_t tau = 0;
  double f_next = 0.0;       ///< f(x_{n+1})
  double best_f = 0.0;       ///< min_{k<=n} f(x_{k+1})
  double residual = 0.0;     ///< ||T x_n - x_n||
  double step_norm = 0.0;    ///< ||x_{n+1} - x_n||
  double c_hat = 0.0;        ///< max subgradient norm used so far
  double m_hat = 0.0;        ///< max iterate norm so far (including x_0)
  std::size_t oracle_calls = 0;
  double elapsed_s = 0.0;
  double eps = 0.0;          ///< eps_{n - tau_n} (inexact runs)
  double shrink = 0.0;       ///< shrink factor of the eps-subgradient (inexact runs)
};

enum class StopReason { kMaxIters, kMaxSeconds };

struct RunTrace {
  std::vector<IterationRecord> records;
  StopReason status = StopReason::kMaxIters;
  /// x_0 .. x_N when RunOptions::record_iterates is set.
  std::vector<Vector> iterates;

  std::size_t iterations() const { return records.size(); }
  std::size_t oracle_calls() const { return records.empty() ? 0 : records.back().oracle_calls; }
};

struct RunOptions {
  StepSchedule steps = StepSchedule::harmonic(0.5, 0.5, 0);
  DelaySchedule delays = DelaySchedule::zero();
  StopRule stop{500, 10.0};
  /// Guarded mode: x_{n+1} = P_ball(T x_n - alpha_n g(T x_n)). Undelayed by
  /// construction; combining it with a non-zero delay bound is rejected.
  std::optional<BallGuard> guard;
  bool record_iterates = false;
};

struct RunResult {
  Vector final;
  RunTrace trace;
};

/// Failure inside an iteration; `iteration()` is the n being computed.
class SolverError : public std::runtime_error {
 public:
  SolverError(std::size_t iteration, const std::string& what)
      : std::runtime_error("iteration " + std::to_string(iteration) + ": " + what),
        iteration_(iteration) {}
  std::size_t iteration() const { return iteration_; }

 private:
  std::size_t iteration_;
};

/// Sliding window of iterates x_{n-tau} .. x_n plus a lazily filled cache of
/// per-index payloads (subgradients at T x_k). Negative indices resolve to 0,
/// i.e. x_{-1} = ... = x_{-tau} = x_0.
template <class Payload>
class HistoryBuffer {
 public:
  HistoryBuffer(std::size_t tau, Vector x0) : tau_(tau) { window_.push_back(std::move(x0)); }

  std::size_t newest() const { return base_ + window_.size() - 1; }

  static std::size_t resolve(std::size_t n, std::size_t delay) { return delay > n ? 0 : n - delay; }

  const Vector& iterate(std::size_t index) const {
    if (index < base_ || index > newest()) {
      throw std::out_of_range("HistoryBuffer: index " + std::to_string(index) +
                              " outside the retained window");
    }
    return window_[index - base_];
  }

  /// Cached payload for `index`, computing it with `compute()` on first use.
  template <class Compute>
  const Payload& payload(std::size_t index, Compute&& compute) {
    auto it = cache_.find(index);
    if (it == cache_.end()) {
      it = cache_.emplace(index, compute()).first;
      ++calls_;
    }
    return it->second;
  }

  void push(Vector x) {
    window_.push_back(std::move(x));
    while (window_.size() > tau_ + 1) {
      window_.erase(window_.begin());
      ++base_;
    }
    cache_.erase(cache_.begin(), cache_.lower_bound(base_));
  }

  std::size_t oracle_calls() const { return calls_; }

 private:
  std::size_t tau_;
  std::size_t base_ = 0;
  std::vector<Vector> window_;
  std::map<std::size_t, Payload> cache_;
  std::size_t calls_ = 0;
};

/// Fixed-point delayed subgradient method:
/// x_{n+1} = T x_n - alpha_n g(T x_{n - tau_n}).
RunResult run_fdsm(const FneOperator& op, const SubgradientOracle& f, ConstView x0,
                   const RunOptions& options);

/// Approximate variant: x_{n+1} = T x_n - alpha_n g_eps(T x_{n - tau_n}) with
/// eps = eps_{n - tau_n}. The validation seed of the eps-oracle call for index
/// k is seed + k.
RunResult run_inexact(const FneOperator& op, const EpsOracle& f, const EpsSchedule& eps,
                      ConstView x0, const RunOptions& options, std::uint64_t seed = 0);

/// Raised when a step-size hypothesis of a rate bound fails.
class HypothesisError : public InputError {
 public:
  using InputError::InputError;
};

/// Throws HypothesisError unless (coefficient + 2 (tau+1)^2) alpha0^a < 8.
void check_step_hypothesis(double alpha0, double a, std::size_t tau, double coefficient = 3.0);

/// (dist0_sq + 2C^2 sum alpha_n^2 + 40 C^2 sum alpha_n^(2-a)) / (2 sum alpha_n), n = 0..N.
double rate_bound(double dist0_sq, double c, const StepSchedule& steps, std::size_t tau, double a,
                  std::size_t n_max);

/// rate_bound for every N in 0..n_max, in one pass.
std::vector<double> rate_bound_curve(double dist0_sq, double c, const StepSchedule& steps,
                                     std::size_t tau, double a, std::size_t n_max);

/// Closed form for alpha_n = alpha/(n+1):
/// ((dist0_sq + 4C^2 alpha^2 + 40 C^2 alpha^(2-a)(2-a)/(1-a)) / (2 alpha)) / log(N+2).
double log_rate_bound(double dist0_sq, double c, double alpha, double a, std::size_t tau,
                      std::size_t n);

struct CertificateReport {
  std::vector<std::size_t> violations;
  double max_excess = 0.0;  ///< max of lhs - rhs (negative when all hold)
};

/// Checks, for each recorded n,
///   ||x_{n+1}-x*||^2 <= ||x_n-x*||^2 - ||x_{n+1}-x_n||^2 + 2 a_n C ||x_{n-tau_n}-x_n||
///                      + 2 a_n C ||x_{n+1}-x_n|| + 2 a_n (f(x*) - f(T x_{n-tau_n}))
///                      + 2 a_n eps_n + tol
/// where eps_n is the recorded eps (zero for exact runs). Needs a trace
/// recorded with `record_iterates` and a point x* in Fix T.
CertificateReport check_certificate(const FneOperator& op, const SubgradientOracle& f,
                                    const RunTrace& trace, ConstView x_star, double c_hat,
                                    double tol = 1e-8);

}  // namespace fdsm
